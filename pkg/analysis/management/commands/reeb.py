import logging

from django.core.management.base import BaseCommand, CommandError

from analysis.pipeline import reeb_dot
from analysis.reeb import is_tree
from surfaces.exceptions import PLMorseError
from surfaces.meshio import read_mesh_file

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Prints the Reeb graph of a mesh field, as DOT with --dot or as a one-line summary."

    def add_arguments(self, parser):
        parser.add_argument("path", help="Mesh file in 'plmorse 1' format.")
        parser.add_argument("--dot", action="store_true", help="Print the graph in DOT format.")

    def handle(self, *args, **options):
        try:
            parsed = read_mesh_file(options["path"])
            dot, g = reeb_dot(parsed.mesh, parsed.values)
            logger.info(f"Reeb graph of {options['path']}: {g.n_vertices} vertices, {g.n_edges} edges")
        except PLMorseError as e:
            self.stderr.write(self.style.ERROR(f"{e.error_type}: {e}"))
            raise CommandError(str(e), returncode=e.exit_code) from e

        if options["dot"]:
            self.stdout.write(dot, ending="")
        else:
            self.stdout.write(
                f"{g.n_vertices} vertices, {g.n_edges} edges, {'tree' if is_tree(g) else 'not a tree'}"
            )
