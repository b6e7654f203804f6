from rest_framework import serializers


class ErrorEntrySerializer(serializers.Serializer):
    stage = serializers.CharField()
    type = serializers.CharField()
    message = serializers.CharField()
    details = serializers.JSONField(required=False)


class InputDigestSerializer(serializers.Serializer):
    name = serializers.CharField()
    sha256 = serializers.CharField()
    vertices = serializers.IntegerField(allow_null=True)
    faces = serializers.IntegerField(allow_null=True)


class SymmetrySummarySerializer(serializers.Serializer):
    automorphisms = serializers.IntegerField()
    kernel_order = serializers.IntegerField()
    quotient_order = serializers.IntegerField()
    quotient = serializers.CharField()
    free_action = serializers.BooleanField()
    orbits = serializers.JSONField()
    invariant_cells = serializers.JSONField()


class GroupSummarySerializer(serializers.Serializer):
    expr = serializers.CharField()
    kernel_expr = serializers.CharField()
    quotient = serializers.CharField()


class AnalysisReportSerializer(serializers.Serializer):
    schema = serializers.IntegerField()
    input = InputDigestSerializer()
    validation = serializers.JSONField(allow_null=True)
    reeb = serializers.JSONField(allow_null=True)
    edge_types = serializers.JSONField(allow_null=True)
    lemma = serializers.JSONField(allow_null=True)
    distinguished = serializers.JSONField(allow_null=True)
    decomposition = serializers.JSONField(allow_null=True)
    symmetry = SymmetrySummarySerializer(allow_null=True)
    group = GroupSummarySerializer(allow_null=True)
    errors = ErrorEntrySerializer(many=True)
    skipped = serializers.ListField(child=serializers.CharField())
    counterexample = serializers.JSONField(allow_null=True)


class ReebResultSerializer(serializers.Serializer):
    dot = serializers.CharField(help_text="DOT digraph, edges labelled A/B on a Moebius band.")
    vertices = serializers.IntegerField()
    edges = serializers.IntegerField()
    is_tree = serializers.BooleanField()
