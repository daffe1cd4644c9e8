"""Shared fixtures: catalog modules and cached analyze runs."""

from __future__ import annotations

import contextlib
import io
import json
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from brauer_udr.cli import main
from brauer_udr.presentation import build_presentation
from brauer_udr.report import AnalyzeConfig, catalog_specs
from brauer_udr.repbuild import parse_module_spec

GOLDEN = Path(__file__).parent / "golden"
PRIMES = (3, 5, 7)
EDGES = (1, 2, 3, 4)

settings.register_profile(
    "brauer",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("brauer")


@lru_cache(maxsize=None)
def catalog(e: int, p: int) -> tuple:
    """(spec, module) for every row analyze would produce at (e, p)."""
    q = build_presentation(e)
    return tuple((spec, parse_module_spec(spec, q, p)) for spec, _ in catalog_specs(AnalyzeConfig(e, p)))


@lru_cache(maxsize=None)
def catalog_specs_only(e: int, p: int) -> tuple:
    return tuple(spec for spec, _ in catalog_specs(AnalyzeConfig(e, p)))


def run_cli(argv: list[str]) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


_ANALYZE: dict = {}


def analyze_run(e: int, p: int, tmp_root: Path) -> tuple[int, str]:
    """``analyze --reproducible`` through the CLI, once per session."""
    key = (e, p)
    if key not in _ANALYZE:
        out = tmp_root / f"report_e{e}_p{p}.json"
        code, _, err = run_cli(["analyze", "--edges", str(e), "--prime", str(p), "--reproducible", "--out", str(out)])
        assert code in (0, 2), err
        _ANALYZE[key] = (code, out.read_text())
    return _ANALYZE[key]


@pytest.fixture(scope="session")
def analyze_cache(tmp_path_factory):
    root = tmp_path_factory.mktemp("analyze")

    def get(e: int, p: int) -> tuple[int, dict, str]:
        code, text = analyze_run(e, p, root)
        return code, json.loads(text), text

    return get
