"""Second-order operators: application, adjoints, conjugation, symbols."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyfact.opcore import (OperatorError, SecondOrderOperator, identity_matrix,
                             laplacian, matrix_from_entries, zero_matrix)
from susyfact.polyalg import Poly, VarSpace, parse_poly

from conftest import NAMES, polys

SP = VarSpace.make(["x1", "x2"])


def operators(max_n: int = 3, **kw):
    def per_space(n):
        sp = VarSpace.make(NAMES[:n])
        upper = st.fixed_dictionaries({(j, k): polys(sp, **kw)
                                       for j in range(n) for k in range(j, n)})

        def build(parts):
            up, v, v0 = parts
            B = [[None] * n for _ in range(n)]
            for (j, k), p in up.items():
                B[j][k] = p
                B[k][j] = p
            return SecondOrderOperator(sp, tuple(tuple(r) for r in B),
                                       tuple(v), v0, True)
        return st.tuples(upper, st.tuples(*[polys(sp, **kw)] * n),
                         polys(sp, **kw)).map(build)
    return st.integers(1, max_n).flatmap(per_space)


def weights(max_n: int = 3, **kw):
    def per_space(n):
        sp = VarSpace.make(NAMES[:n])
        return st.tuples(st.just(sp), polys(sp, max_hpow=0, **kw))
    return st.integers(1, max_n).flatmap(per_space)


# -------------------------------------------------------------- construction

def test_symmetry_enforced():
    b01 = parse_poly(SP, "x1")
    b10 = parse_poly(SP, "x2")
    B = ((Poly.const(SP, 1), b01), (b10, Poly.const(SP, 1)))
    with pytest.raises(OperatorError):
        SecondOrderOperator(SP, B, (Poly.zero(SP), Poly.zero(SP)),
                            Poly.zero(SP), True)


def test_laplacian_application():
    P = laplacian(SP)
    f = parse_poly(SP, "x1^2*x2 + x2^3")
    # -sum_j (h d_j)^2 f
    assert P.apply(f) == parse_poly(SP, "2*x2 + 6*x2") * -1 * Poly.h(SP) ** 2


def test_apply_first_order_and_potential():
    v = (parse_poly(SP, "x2"), parse_poly(SP, "x1") * -1)
    P = SecondOrderOperator(SP, identity_matrix(SP), v, parse_poly(SP, "x1*x2"), True)
    f = parse_poly(SP, "x1")
    expected = parse_poly(SP, "x2") * Poly.h(SP) + parse_poly(SP, "x1^2*x2")
    assert P.apply(f) == expected


def test_apply_constant_picks_out_v0():
    P = laplacian(SP)
    assert P.apply(Poly.const(SP, 1)) == Poly.zero(SP)


# ------------------------------------------------------------------ adjoints

def test_adjoint_known_formula():
    v = (parse_poly(SP, "x1^2"), parse_poly(SP, "x2"))
    P = SecondOrderOperator(SP, identity_matrix(SP), v, Poly.zero(SP), True)
    Q = P.adjoint()
    assert Q.v == tuple(-w for w in v)
    # v0' = v0 - h div v
    assert Q.v0 == -(parse_poly(SP, "2*x1 + 1") * Poly.h(SP))


@given(operators(max_n=3, max_deg=2, max_hpow=1, max_terms=3))
@settings(max_examples=40, deadline=None)
def test_adjoint_involution(P):
    assert P.adjoint().adjoint() == P


@given(operators(max_n=2, max_deg=2, max_hpow=0, max_terms=2))
@settings(max_examples=40, deadline=None)
def test_adjoint_annihilates_one_iff_divergence(P):
    sp = P.space
    div = Poly.zero(sp)
    for j, nm in enumerate(sp.names):
        div = div + P.v[j].partial(nm)
    residual = P.adjoint().apply(Poly.const(sp, 1))
    assert residual == P.v0 - div.h_shift(1)


# --------------------------------------------------------------- conjugation

@given(weights(max_n=2, max_deg=3, max_terms=3).flatmap(
    lambda sw: st.tuples(st.just(sw[1]),
                         polys(sw[0], max_deg=3, max_hpow=0, max_terms=3))),
    operators(max_n=2, max_deg=2, max_hpow=1, max_terms=2))
@settings(max_examples=30, deadline=None)
def test_conjugation_is_a_group_action(phipsi, P):
    phi, psi = phipsi
    if phi.space != P.space:
        return
    one_step = P.exp_conjugate(phi + psi, 1)
    two_step = P.exp_conjugate(phi, 1).exp_conjugate(psi, 1)
    assert one_step == two_step
    assert P.exp_conjugate(phi, 1).exp_conjugate(phi, -1) == P


def test_conjugation_witten_normal_form():
    # e^{V/h} Lap_h e^{-V/h}: drift 2 dV . hd, zero order h V'' - |dV|^2
    sp = VarSpace.make(["x1"])
    V = parse_poly(sp, "1/2*x1^2")
    P = laplacian(sp)
    Q = P.exp_conjugate(V, 1)
    assert Q.v == (parse_poly(sp, "2*x1"),)
    assert Q.v0 == Poly.h(sp) - parse_poly(sp, "x1^2")


def test_kernel_test():
    sp = VarSpace.make(["x1"])
    V = parse_poly(sp, "1/2*x1^2")
    P = laplacian(sp)
    rep_bad = P.kernel_test(V)
    assert not rep_bad.vanishes
    assert rep_bad.residual == Poly.h(sp) - parse_poly(sp, "x1^2")
    assert rep_bad.leading_h_order == 0
    # the drift operator with matching zero-order term annihilates e^{-2V/h}
    Q = SecondOrderOperator(sp, P.B, (parse_poly(sp, "-2*x1"),),
                            -2 * Poly.h(sp), True)
    rep = Q.kernel_test(2 * V)
    assert rep.vanishes and rep.residual.is_zero


# ------------------------------------------------------------------- symbols

def test_symbols_of_drift_laplacian():
    v = (parse_poly(SP, "x2"), parse_poly(SP, "x1") * -1)
    P = SecondOrderOperator(SP, identity_matrix(SP), v, parse_poly(SP, "x1"), True)
    p_re, p_im, q, phase = P.symbols()
    assert "x1'" in phase.names and "x2'" in phase.names
    assert p_re == parse_poly(phase, "x1'^2 + x2'^2 + x1")
    assert p_im == parse_poly(phase, "x2*x1' - x1*x2'")
    assert q == parse_poly(phase, "x1'^2 + x2'^2 + x2*x1' - x1*x2' - x1")


def test_eikonal_residual_witten():
    # the stationary density is e^{-2 phi0/h}, so the eikonal weight is 2 phi0
    sp = VarSpace.make(["x1"])
    phi = parse_poly(sp, "x1^2")  # 2 phi0 for V = x1^2/2
    P = SecondOrderOperator(sp, identity_matrix(sp),
                            (parse_poly(sp, "-2*x1"),), Poly.zero(sp), True)
    assert P.eikonal_residual(phi, "forward").is_zero
    assert P.adjoint().eikonal_residual(phi, "adjoint").is_zero
    assert not P.eikonal_residual(parse_poly(sp, "x1^3"), "forward").is_zero


# ---------------------------------------------------------------- round trip

@given(operators(max_n=2, max_deg=2, max_hpow=1, max_terms=2))
@settings(max_examples=30, deadline=None)
def test_json_round_trip(P):
    assert SecondOrderOperator.from_json_dict(P.to_json_dict()) == P


def test_matrix_helpers():
    Z = zero_matrix(SP)
    assert all(p.is_zero for row in Z for p in row)
    I2 = identity_matrix(SP, Fraction(1, 2))
    assert I2[0][0] == Poly.const(SP, Fraction(1, 2)) and I2[0][1].is_zero
    M = matrix_from_entries(SP, {(0, 1): parse_poly(SP, "x1")})
    assert M[0][1] == parse_poly(SP, "x1") and M[1][0].is_zero
