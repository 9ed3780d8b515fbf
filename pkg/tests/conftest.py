"""Shared hypothesis strategies for exact polynomial data."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from susyfact.polyalg import Poly, VarSpace

NAMES = ("x1", "x2", "x3", "x4")


@pytest.fixture(scope="session")
def space2() -> VarSpace:
    return VarSpace.make(NAMES[:2])


def spaces(max_n: int = 4):
    return st.integers(1, max_n).map(lambda n: VarSpace.make(NAMES[:n]))


def rationals(max_num: int = 9, max_den: int = 5):
    return st.builds(Fraction,
                     st.integers(-max_num, max_num),
                     st.integers(1, max_den))


def polys(space: VarSpace, max_deg: int = 3, max_hpow: int = 2,
          max_terms: int = 5):
    exps = st.tuples(*[st.integers(0, max_deg) for _ in range(space.n)])
    keys = st.tuples(exps, st.integers(0, max_hpow))
    return st.dictionaries(keys, rationals(), max_size=max_terms).map(
        lambda d: Poly(space, d))


def poly_pairs(max_n: int = 4, **kw):
    return spaces(max_n).flatmap(
        lambda sp: st.tuples(polys(sp, **kw), polys(sp, **kw)))


def poly_triples(max_n: int = 4, **kw):
    return spaces(max_n).flatmap(
        lambda sp: st.tuples(polys(sp, **kw), polys(sp, **kw), polys(sp, **kw)))
