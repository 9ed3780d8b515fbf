"""Exact polynomial ring: parsing, arithmetic, calculus, evaluation."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyfact.polyalg import Poly, PolyError, VarSpace, parse_poly, parse_rational

from conftest import poly_pairs, poly_triples, polys, spaces

SP = VarSpace.make(["x1", "x2"])
X1 = Poly.var(SP, "x1")
X2 = Poly.var(SP, "x2")
H = Poly.h(SP)


# ------------------------------------------------------------------ parsing

def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == Fraction(-2)
    with pytest.raises(PolyError):
        parse_rational("1/0")


def test_parse_poly_basic():
    p = parse_poly(SP, "1/4*x1^4 - 1/2*x1^2 + 1/4")
    assert p == (X1 ** 4) * Fraction(1, 4) - (X1 ** 2) * Fraction(1, 2) + Fraction(1, 4)


def test_parse_poly_h_and_products():
    p = parse_poly(SP, "h*x1*x2 + 2*h^2 - x2^3")
    assert p == H * X1 * X2 + 2 * H ** 2 - X2 ** 3


def test_parse_poly_rejects_unknown_variable():
    with pytest.raises(PolyError):
        parse_poly(SP, "x1 + y7")


def test_repr_round_trips_through_parser():
    p = parse_poly(SP, "1/4*x1^4 - 1/2*x1^2 + 1/4 + h*x2")
    assert parse_poly(SP, repr(p)) == p
    assert parse_poly(SP, repr(Poly.zero(SP))) == Poly.zero(SP)


# ---------------------------------------------------------------- structure

def test_no_zero_terms_stored():
    p = X1 - X1
    assert p.terms == {}
    assert p.is_zero


def test_h_power_nonnegative():
    with pytest.raises(PolyError):
        Poly(SP, {((0, 0), -1): Fraction(1)})


def test_var_space_duplicate_names_rejected():
    with pytest.raises(PolyError):
        VarSpace.make(["x1", "x1"])


def test_blocks_must_partition():
    with pytest.raises(PolyError):
        VarSpace.make(["x1", "x2"], blocks={"a": ["x1"]})
    sp = VarSpace.make(["x1", "x2"], blocks={"a": ["x1"], "b": ["x2"]})
    assert sp.block_vars("a") == ("x1",)
    assert sp.block_indices("b") == (1,)


def test_with_duals():
    d = SP.with_duals()
    assert d.names == ("x1", "x2", "x1'", "x2'")


# ------------------------------------------------------------- known values

def test_binomial_cube():
    p = (X1 + X2) ** 3
    assert p == X1 ** 3 + 3 * X1 ** 2 * X2 + 3 * X1 * X2 ** 2 + X2 ** 3


def test_partial_derivative():
    p = (X1 ** 2) * X2 + H * X2 ** 3
    assert p.partial("x1") == 2 * X1 * X2
    assert p.partial("x2") == X1 ** 2 + 3 * H * X2 ** 2


def test_h_shift_and_components():
    p = X1 + H * X2
    assert p.h_shift(1) == H * X1 + H ** 2 * X2
    comps = p.h_components()
    assert comps[0] == X1 and comps[1] == X2
    assert p.h0() == X1
    assert p.max_hpow() == 1
    assert not p.is_h_free()
    assert (X1 * X2).is_h_free()


def test_homogeneous_components_by_block():
    sp = VarSpace.make(["x1", "x2"], blocks={"a": ["x1"], "b": ["x2"]})
    p = parse_poly(sp, "x1 + x1*x2^2 + x2^3")
    comps = p.homogeneous_components("b")
    assert comps[0] == parse_poly(sp, "x1")
    assert comps[2] == parse_poly(sp, "x1*x2^2")
    assert comps[3] == parse_poly(sp, "x2^3")


def test_degrees():
    p = parse_poly(SP, "x1^2*x2 + h*x2^4")
    assert p.total_degree() == 4
    assert p.degree_in(["x1"]) == 2
    assert p.degree_in(["x2"]) == 4


def test_involves_restrict_substitute():
    p = parse_poly(SP, "x1*x2 + x1^2")
    assert p.involves(["x2"]) and not (X1 ** 2).involves(["x2"])
    assert p.restrict_zero(["x2"]) == X1 ** 2
    assert p.substitute({"x2": X1}) == X1 ** 2 * 2


def test_lift():
    small = VarSpace.make(["x1"])
    big = VarSpace.make(["x1", "x2"])
    p = Poly.var(small, "x1") ** 2
    assert p.lift(big) == Poly.var(big, "x1") ** 2


def test_evaluate_and_compiled():
    p = parse_poly(SP, "1/4*x1^4 - 1/2*x1^2 + h*x2")
    val = p.evaluate({"x1": 2.0, "x2": 3.0}, h=0.5)
    assert math.isclose(val, 4.0 - 2.0 + 1.5, rel_tol=1e-14)
    f = p.compiled()
    assert math.isclose(f([2.0, 3.0]), p.evaluate({"x1": 2.0, "x2": 3.0}, h=1.0),
                        rel_tol=1e-14)


def test_literal_round_trip():
    p = parse_poly(SP, "x1^2 - 7/3*h*x2 + 5")
    assert Poly.from_literal(SP, p.to_literal()) == p


# ----------------------------------------------------------- ring axioms

@given(poly_triples())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(fgh):
    f, g, h = fgh
    assert f + g == g + f
    assert (f + g) + h == f + (g + h)
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + Poly.zero(f.space) == f
    assert f * Poly.const(f.space, 1) == f
    assert f - f == Poly.zero(f.space)


@given(poly_pairs())
@settings(max_examples=60, deadline=None)
def test_derivations(fg):
    f, g = fg
    names = f.space.names
    for nm in names[:2]:
        # Leibniz rule
        assert (f * g).partial(nm) == f.partial(nm) * g + f * g.partial(nm)
    if len(names) >= 2:
        a, b = names[0], names[1]
        assert f.partial(a).partial(b) == f.partial(b).partial(a)


@given(spaces(3).flatmap(lambda sp: polys(sp, max_deg=3)))
@settings(max_examples=60, deadline=None)
def test_homogeneous_partition(p):
    sp = p.space
    block = sp.blocks[0][0]
    comps = p.homogeneous_components(block)
    total = Poly.zero(sp)
    for k, q in comps.items():
        assert q.degree_in(sp.block_vars(block)) in (k, 0) or q.is_zero
        total = total + q
    assert total == p


@given(poly_pairs(max_n=3, max_deg=3, max_hpow=1))
@settings(max_examples=50, deadline=None)
def test_evaluate_is_ring_homomorphism(fg):
    f, g = fg
    rng = random.Random(12345)
    pt = {nm: rng.uniform(-1.0, 1.0) for nm in f.space.names}
    hv = 0.7
    lhs = (f * g + f).evaluate(pt, hv)
    rhs = f.evaluate(pt, hv) * g.evaluate(pt, hv) + f.evaluate(pt, hv)
    scale = 1.0 + abs(lhs) + abs(rhs)
    assert abs(lhs - rhs) / scale < 1e-12


@given(spaces(3).flatmap(lambda sp: polys(sp)))
@settings(max_examples=50, deadline=None)
def test_repr_parse_round_trip_random(p):
    assert parse_poly(p.space, repr(p)) == p
