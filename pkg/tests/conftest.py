"""Shared fixtures: cached (spec, profile, B) triples for the worked examples."""

import sys

import pytest

from liouville_workbench import build_G, build_psi0, catalog


def pytest_terminal_summary(terminalreporter):
    """Echo the one-line acceptance verdicts collected during the run."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None) if mod else None
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def problem():
    """Factory returning cached (spec, profile, B) for catalog example k.

    t_max defaults to 10 for polynomial g and just below the boundary
    blow-up time for the singular family.
    """
    cache = {}

    def make(k, n_alpha=513, t_max=None, method="auto"):
        key = (k, n_alpha, t_max, method)
        if key not in cache:
            spec = catalog.example_spec(k, n_alpha=n_alpha)
            tm = t_max
            if tm is None:
                tm = 1.0 - 1e-6 if spec.g.kind == "singular_boundary" else 10.0
            profile = build_psi0(spec, method=method)
            B = build_G(spec, t_max=tm, method=method)
            cache[key] = (spec, profile, B)
        return cache[key]

    return make
