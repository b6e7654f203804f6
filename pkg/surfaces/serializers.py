from rest_framework import serializers


class MeshTextSerializer(serializers.Serializer):
    mesh = serializers.CharField(
        trim_whitespace=False,
        help_text="Surface in 'plmorse 1' text: header, 'V F' counts, V lines 'f [x y z]', F lines 'i j k'.",
    )


class CoverResultSerializer(serializers.Serializer):
    mesh = serializers.CharField(help_text="Total surface of the orientation cover with the lifted field.")
    sidecar = serializers.CharField(help_text="One 'total base xi' triple per total vertex.")
    components = serializers.IntegerField()
    euler_characteristic = serializers.IntegerField()
    boundary_cycles = serializers.IntegerField()


class FixtureSummarySerializer(serializers.Serializer):
    name = serializers.CharField()
    description = serializers.CharField()


class FixtureDetailSerializer(serializers.Serializer):
    name = serializers.CharField()
    description = serializers.CharField()
    mesh = serializers.CharField()


class RandomFixtureSerializer(serializers.Serializer):
    saddles = serializers.IntegerField(help_text="Saddle budget, 1 to 6.")
    seed = serializers.IntegerField(help_text="Non-negative seed; equal seeds give equal meshes.")
