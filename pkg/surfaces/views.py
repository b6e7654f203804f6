import logging

from django.conf import settings
from drf_spectacular.utils import extend_schema
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from .cover import orientation_double_cover
from .fixtures import FIXTURES, RandomFieldSpec, fixture_names, load_fixture, random_moebius_field
from .meshio import parse_mesh, write_mesh, write_sidecar
from .serializers import (
    CoverResultSerializer,
    FixtureDetailSerializer,
    FixtureSummarySerializer,
    MeshTextSerializer,
    RandomFixtureSerializer,
)

logger = logging.getLogger(__name__)


def read_mesh_payload(request):
    """Validate a ``{"mesh": text}`` body and parse the text."""
    serializer = MeshTextSerializer(data=request.data)
    serializer.is_valid(raise_exception=True)
    return parse_mesh(serializer.validated_data["mesh"])


class CoverView(APIView):
    @extend_schema(
        tags=["Surfaces - Orientation Cover"],
        request=MeshTextSerializer,
        responses={200: CoverResultSerializer},
        summary="Build the orientation double cover",
        description="Parses a 'plmorse 1' mesh and returns its orientation double cover with the lifted field, plus the 'total base xi' vertex map. Orientable inputs yield two copies swapped by xi.",
    )
    def post(self, request):
        parsed = read_mesh_payload(request)
        cover = orientation_double_cover(parsed.mesh)
        total = cover.total
        data = {
            "mesh": write_mesh(total, cover.lift_values(parsed.values)),
            "sidecar": write_sidecar(cover),
            "components": len(total.components),
            "euler_characteristic": total.euler_characteristic(),
            "boundary_cycles": len(total.boundary_cycles),
        }
        return Response(CoverResultSerializer(data).data, status=status.HTTP_200_OK)


class FixtureListView(APIView):
    @extend_schema(
        tags=["Surfaces - Fixtures"],
        responses={200: FixtureSummarySerializer(many=True)},
        summary="List named fixtures",
        description="Names and short descriptions of the built-in test surfaces.",
    )
    def get(self, request):
        data = [{"name": name, "description": FIXTURES[name][1]} for name in fixture_names()]
        return Response(FixtureSummarySerializer(data, many=True).data)


class FixtureDetailView(APIView):
    @extend_schema(
        tags=["Surfaces - Fixtures"],
        responses={200: FixtureDetailSerializer},
        summary="Get a named fixture as mesh text",
        description="Returns the fixture in 'plmorse 1' format. Unknown names answer 404.",
    )
    def get(self, request, name):
        fixture = load_fixture(name)
        data = {
            "name": fixture.name,
            "description": fixture.description,
            "mesh": write_mesh(fixture.mesh, fixture.values),
        }
        return Response(FixtureDetailSerializer(data).data)


class RandomFixtureView(APIView):
    @extend_schema(
        tags=["Surfaces - Fixtures"],
        request=RandomFixtureSerializer,
        responses={200: FixtureDetailSerializer},
        summary="Generate a random Moebius field",
        description="Rejection-samples a valid field with the requested number of saddles on a Moebius band triangulation. The same seed always gives the same mesh.",
    )
    def post(self, request):
        serializer = RandomFixtureSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        spec = RandomFieldSpec(**serializer.validated_data)
        fixture = random_moebius_field(spec, max_attempts=settings.PLMORSE_RANDOM_MAX_ATTEMPTS)
        data = {
            "name": fixture.name,
            "description": fixture.description,
            "mesh": write_mesh(fixture.mesh, fixture.values),
        }
        return Response(FixtureDetailSerializer(data).data)
