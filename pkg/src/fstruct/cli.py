"""Command line: ``fstruct classify|report|verify``.

Exit codes: 0 success (including "no adapted connection" answers), 1 internal error,
2 invalid input structure, 3 verification failures.
"""

from __future__ import annotations

import json
import sys
import warnings
from typing import Any, Callable

import click

from . import arith, catalog
from .errors import ExactModeUnsupported, FStructError, InvalidStructure
from .fstructure import MetricFManifold
from .pipeline import (build_report, classification_section, properties_section, property_line, render_text,
                       structure_section, validation_section)
from .suites import verify as run_verify

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load(example: str | None, path: str | None, mode: str | None) -> MetricFManifold:
    if (example is None) == (path is None):
        raise _Fail(EXIT_INVALID, "give exactly one of --example NAME or FILE")
    try:
        if example is not None:
            return catalog.example(example)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return catalog.load_structure(path, mode)
    except KeyError as exc:
        raise _Fail(EXIT_INVALID, str(exc.args[0])) from None
    except (InvalidStructure, ExactModeUnsupported, OSError) as exc:
        raise _Fail(EXIT_INVALID, str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _dump(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _run(mode: str | None, tol: float | None, body: Callable[[], int]) -> None:
    try:
        with arith.arithmetic(mode, tol):
            code = body()
    except _Fail as exc:
        click.echo(f"error: {exc}", err=True)
        code = exc.code
    except InvalidStructure as exc:
        click.echo(f"error: {exc}", err=True)
        code = EXIT_INVALID
    except FStructError as exc:
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        code = EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - the exit code contract covers every failure
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        code = EXIT_INTERNAL
    sys.exit(code)


def _common(f):
    f = click.option("--out", "out", type=click.Path(dir_okay=False), help="Write output to PATH.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")(f)
    f = click.option("--tol", type=float, default=None, help="Float-mode zero tolerance.")(f)
    f = click.option("--mode", type=click.Choice([arith.EXACT, arith.FLOAT]), default=None,
                     help="Arithmetic mode (default: FSTRUCT_MODE or exact).")(f)
    f = click.option("--example", default=None, help="Catalog name, e.g. u2 or product:h3:4.")(f)
    f = click.argument("path", required=False, type=click.Path(dir_okay=False))(f)
    return f


@click.group()
def main() -> None:
    """Metric f-structures on Lie groups: classification, characteristic connection, curvature."""


@main.command()
@_common
def classify(path, example, mode, tol, fmt, out):
    """Validate and classify a structure."""
    def body() -> int:
        M = _load(example, path, mode)
        data = {"structure": structure_section(M), "validation": validation_section(M),
                "classification": classification_section(M)}
        if fmt == "json":
            _emit(_dump(data), out)
        else:
            lines = [data["classification"]["summary"]]
            if not data["validation"]["ok"]:
                lines.append("validation failures: " + "; ".join(data["validation"]["failures"]))
            _emit("\n".join(lines) + "\n", out)
        return EXIT_OK if data["validation"]["ok"] else EXIT_INVALID
    _run(mode, tol, body)


@main.command()
@_common
def report(path, example, mode, tol, fmt, out):
    """Full geometry report."""
    def body() -> int:
        M = _load(example, path, mode)
        data = build_report(M)
        _emit(_dump(data) if fmt == "json" else render_text(data), out)
        return EXIT_OK if data["validation"]["ok"] else EXIT_INVALID
    _run(mode, tol, body)


def catalog_names() -> list[str]:
    return sorted(list(catalog.EXAMPLES) + ["product:h3:4"])


@main.command()
@_common
@click.option("--all", "run_all", is_flag=True, help="Verify every catalog example.")
def verify(path, example, mode, tol, fmt, out, run_all):
    """Run every applicable identity suite; exit 3 on any defect above tolerance."""
    def body() -> int:
        if run_all:
            if path or example:
                raise _Fail(EXIT_INVALID, "--all takes no source")
            items = [(name, catalog.example(name)) for name in catalog_names()]
        else:
            M = _load(example, path, mode)
            items = [(M.name, M)]
        results = {name: run_verify(M) for name, M in items}
        ok = all(r.ok for r in results.values())
        if fmt == "json":
            data = {name: {"ok": r.ok, "checks": properties_section(r)} for name, r in sorted(results.items())}
            _emit(_dump(data), out)
        else:
            lines = []
            for name, r in sorted(results.items()):
                lines.append(f"{name}: {'ok' if r.ok else 'FAILED'}")
                lines.extend("  " + property_line(p) for p in properties_section(r))
            _emit("\n".join(lines) + "\n", out)
        return EXIT_OK if ok else EXIT_VERIFY
    _run(mode, tol, body)


if __name__ == "__main__":
    main()
