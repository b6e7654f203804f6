import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from surfaces.cover import orientation_double_cover
from surfaces.exceptions import PLMorseError
from surfaces.meshio import read_mesh_file, write_mesh, write_sidecar

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        "Builds the orientation double cover of a mesh. With --out the cover goes to PATH "
        "and the 'total base xi' map to PATH.map; otherwise the cover is printed with the "
        "map appended as comment lines."
    )

    def add_arguments(self, parser):
        parser.add_argument("path", help="Mesh file in 'plmorse 1' format.")
        parser.add_argument("--out", help="Output path for the cover mesh.")

    def handle(self, *args, **options):
        try:
            parsed = read_mesh_file(options["path"])
            cover = orientation_double_cover(parsed.mesh)
        except PLMorseError as e:
            self.stderr.write(self.style.ERROR(f"{e.error_type}: {e}"))
            raise CommandError(str(e), returncode=e.exit_code) from e

        mesh_text = write_mesh(cover.total, cover.lift_values(parsed.values))
        sidecar = write_sidecar(cover)
        total = cover.total
        summary = (
            f"cover: {len(total.components)} component(s), chi={total.euler_characteristic()}, "
            f"{len(total.boundary_cycles)} boundary cycle(s)"
        )
        if options["out"]:
            out = Path(options["out"])
            out.write_text(mesh_text, encoding="utf-8")
            Path(f"{out}.map").write_text(sidecar, encoding="utf-8")
            self.stdout.write(self.style.SUCCESS(f"Wrote {out} and {out}.map; {summary}"))
        else:
            self.stdout.write(mesh_text, ending="")
            self.stdout.write("# total base xi")
            for line in sidecar.splitlines():
                self.stdout.write(f"# {line}")
        logger.info(summary)
