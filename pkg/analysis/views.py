import logging

from drf_spectacular.utils import extend_schema
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from surfaces.serializers import MeshTextSerializer
from surfaces.views import read_mesh_payload

from .pipeline import analyze_text, reeb_dot
from .reeb import is_tree
from .serializers import AnalysisReportSerializer, ReebResultSerializer

logger = logging.getLogger(__name__)

EXIT_STATUS = {
    0: status.HTTP_200_OK,
    2: status.HTTP_400_BAD_REQUEST,
    3: status.HTTP_500_INTERNAL_SERVER_ERROR,
}


class AnalyzeView(APIView):
    @extend_schema(
        tags=["Analysis"],
        request=MeshTextSerializer,
        responses={200: AnalysisReportSerializer, 400: AnalysisReportSerializer, 500: AnalysisReportSerializer},
        summary="Analyze a field on a surface",
        description="Runs the full pipeline on a 'plmorse 1' mesh and returns the schema 1 report. Rejected input answers 400 and a failed structural check answers 500; both still carry the report with its 'errors' list.",
    )
    def post(self, request):
        serializer = MeshTextSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        result = analyze_text(serializer.validated_data["mesh"], name="request")
        if result.exit_code:
            logger.warning(f"analysis request failed with exit code {result.exit_code}")
        return Response(
            AnalysisReportSerializer(result.report).data,
            status=EXIT_STATUS.get(result.exit_code, status.HTTP_400_BAD_REQUEST),
        )


class ReebView(APIView):
    @extend_schema(
        tags=["Analysis"],
        request=MeshTextSerializer,
        responses={200: ReebResultSerializer},
        summary="Reeb graph as DOT",
        description="Builds the Reeb graph of the field. On a Moebius band the edges carry their A/B type.",
    )
    def post(self, request):
        parsed = read_mesh_payload(request)
        dot, g = reeb_dot(parsed.mesh, parsed.values)
        data = {"dot": dot, "vertices": g.n_vertices, "edges": g.n_edges, "is_tree": is_tree(g)}
        return Response(ReebResultSerializer(data).data, status=status.HTTP_200_OK)
