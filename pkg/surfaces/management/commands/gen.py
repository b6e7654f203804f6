import logging
from pathlib import Path

import pydantic
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from surfaces.exceptions import PLMorseError
from surfaces.fixtures import RandomFieldSpec, fixture_names, load_fixture, random_moebius_field
from surfaces.meshio import write_mesh

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Writes a named fixture or a seeded random Moebius field in 'plmorse 1' format."

    def add_arguments(self, parser):
        parser.add_argument("name", nargs="?", help=f"Fixture name: {', '.join(fixture_names())}")
        parser.add_argument("--random", action="store_true", help="Generate a random Moebius field.")
        parser.add_argument("--saddles", type=int, default=1, help="Saddle budget for --random (1-6).")
        parser.add_argument("--seed", type=int, default=0, help="Seed for --random.")
        parser.add_argument("--out", help="Write to this path instead of stdout.")

    def handle(self, *args, **options):
        if options["random"] == bool(options["name"]):
            raise CommandError("give either a fixture name or --random", returncode=2)

        try:
            if options["random"]:
                spec = RandomFieldSpec(saddles=options["saddles"], seed=options["seed"])
                fixture = random_moebius_field(spec, max_attempts=settings.PLMORSE_RANDOM_MAX_ATTEMPTS)
            else:
                fixture = load_fixture(options["name"])
        except pydantic.ValidationError as e:
            raise CommandError(f"invalid generator parameters: {e}", returncode=2) from e
        except PLMorseError as e:
            raise CommandError(f"{e.error_type}: {e}", returncode=e.exit_code) from e

        text = write_mesh(fixture.mesh, fixture.values)
        if options["out"]:
            Path(options["out"]).write_text(text, encoding="utf-8")
            self.stdout.write(
                self.style.SUCCESS(
                    f"Wrote {fixture.name} ({fixture.mesh.n_vertices} vertices, "
                    f"{fixture.mesh.n_faces} faces) to {options['out']}"
                )
            )
        else:
            self.stdout.write(text, ending="")
