import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from analysis.pipeline import analyze_batch, analyze_path, dump_report

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        "Runs the full analysis on a 'plmorse 1' mesh and writes the JSON report. "
        "Exit code 2 means the input was rejected, 3 means a structural check failed."
    )

    def add_arguments(self, parser):
        parser.add_argument("path", nargs="?", help="Mesh file to analyze.")
        parser.add_argument("--dir", help="Analyze every *.plm file in this directory.")
        parser.add_argument(
            "--out",
            help="Report path; with --dir a directory that receives one <name>.json per mesh.",
        )
        parser.add_argument("--json-compact", action="store_true", help="Write JSON without indentation.")

    def handle(self, *args, **options):
        if bool(options["path"]) == bool(options["dir"]):
            raise CommandError("give either a mesh path or --dir", returncode=2)
        compact = options["json_compact"]
        if options["dir"]:
            exit_code = self._handle_dir(Path(options["dir"]), options["out"], compact)
        else:
            exit_code = self._handle_file(Path(options["path"]), options["out"], compact)
        if exit_code:
            raise CommandError(f"analysis finished with exit code {exit_code}", returncode=exit_code)

    def _report_errors(self, name, result):
        for error in result.report["errors"]:
            self.stderr.write(self.style.ERROR(f"{name}: {error['stage']}: {error['type']}: {error['message']}"))

    def _handle_file(self, path, out, compact):
        result = analyze_path(path)
        text = dump_report(result.report, compact=compact)
        if out:
            Path(out).write_text(text + "\n", encoding="utf-8")
            self.stdout.write(self.style.SUCCESS(f"Wrote report for {path.name} to {out}"))
        else:
            self.stdout.write(text)
        self._report_errors(path.name, result)
        return result.exit_code

    def _handle_dir(self, directory, out, compact):
        if not directory.is_dir():
            raise CommandError(f"{directory} is not a directory", returncode=2)
        paths = sorted(directory.glob("*.plm"))
        if not paths:
            self.stdout.write(self.style.WARNING(f"No *.plm files in {directory}"))
            return 0
        results = analyze_batch(paths)
        if out:
            target = Path(out)
            target.mkdir(parents=True, exist_ok=True)
            for path in paths:
                report = results[path.name].report
                (target / f"{path.stem}.json").write_text(dump_report(report, compact=compact) + "\n", encoding="utf-8")
            self.stdout.write(self.style.SUCCESS(f"Wrote {len(paths)} report(s) to {target}"))
        else:
            combined = {name: result.report for name, result in results.items()}
            self.stdout.write(dump_report(combined, compact=compact))
        for name, result in results.items():
            self._report_errors(name, result)
        failed = sum(1 for result in results.values() if result.exit_code)
        logger.info(f"analyzed {len(paths)} file(s) in {directory}, {failed} with errors")
        return max(result.exit_code for result in results.values())
