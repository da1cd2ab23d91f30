from __future__ import annotations

import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ncomm.diffop import DiffOp, field_from_terms
from ncomm.polyring import Poly

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=list(HealthCheck))
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

small = st.integers(min_value=-3, max_value=3)


def exponents(n: int, max_deg: int):
    return st.lists(st.integers(0, max_deg), min_size=n, max_size=n).map(tuple).filter(lambda e: sum(e) <= max_deg)


@st.composite
def polys(draw, n: int = 2, max_deg: int = 3, max_terms: int = 4):
    terms = draw(st.dictionaries(exponents(n, max_deg), small, max_size=max_terms))
    return Poly(n, terms)


@st.composite
def fields(draw, n: int = 2, max_deg: int = 3, max_terms: int = 3):
    spec = draw(st.lists(st.tuples(small, exponents(n, max_deg), st.integers(1, n)), min_size=1, max_size=max_terms))
    return field_from_terms(n, spec)


@st.composite
def operators(draw, n: int = 2, max_deg: int = 2, max_order: int = 2, max_terms: int = 3):
    out = DiffOp.zero(n)
    for _ in range(draw(st.integers(1, max_terms))):
        a = draw(exponents(n, max_deg))
        alpha = draw(exponents(n, max_order))
        out = out + DiffOp.monomial(a, alpha, draw(small))
    return out


@st.composite
def divfree_fields(draw, max_deg: int = 3):
    """``D12(u)`` for a random potential ``u``."""
    from ncomm.diffop import d12

    u = draw(polys(2, max_deg + 1, 3))
    return d12(u)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(lines):
        terminalreporter.write_line(lines[num])
