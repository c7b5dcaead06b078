import argparse
import subprocess

from funlog import log_calls
from rich import get_console, reconfigure
from rich import print as rprint

SRC_PATHS = ["src"]
DEV_PATHS = ["tests", "devtools"]
DOC_PATHS = ["README.md", "development.md", "DESIGN.md"]
TEMPLATE_PATHS = ["src/isom_codec/templates"]


reconfigure(emoji=not get_console().options.legacy_windows)  # No emojis on legacy windows.


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Lint and type-check isom-codec.")
    parser.add_argument(
        "--check", action="store_true", help="report problems without rewriting files (for CI)"
    )
    args = parser.parse_args(argv)
    code_paths = [*SRC_PATHS, *DEV_PATHS]

    rprint()

    errcount = 0
    if args.check:
        errcount += run(["codespell", *code_paths, *DOC_PATHS, *TEMPLATE_PATHS])
        errcount += run(["ruff", "check", *code_paths])
        errcount += run(["ruff", "format", "--check", *code_paths])
    else:
        errcount += run(["codespell", "--write-changes", *code_paths, *DOC_PATHS, *TEMPLATE_PATHS])
        errcount += run(["ruff", "check", "--fix", *code_paths])
        errcount += run(["ruff", "format", *code_paths])
    # Paths come from [tool.mypy] files, tests included.
    errcount += run(["mypy"])

    rprint()

    if errcount != 0:
        rprint(f"[bold red]:x: Lint failed with {errcount} errors.[/bold red]")
    else:
        rprint("[bold green]:white_check_mark: Lint passed![/bold green]")
    rprint()

    return errcount


@log_calls(level="warning", show_timing_only=True)
def run(cmd: list[str]) -> int:
    rprint()
    rprint(f"[bold green]>> {' '.join(cmd)}[/bold green]")
    try:
        subprocess.run(cmd, text=True, check=True)
    except KeyboardInterrupt:
        rprint("[yellow]Keyboard interrupt - Cancelled[/yellow]")
        return 1
    except subprocess.CalledProcessError as e:
        rprint(f"[bold red]Error: {e}[/bold red]")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
