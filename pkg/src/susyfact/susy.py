"""Supersymmetric factorization: testing, construction, verification.

A supersymmetric structure for a second-order operator P is a triple
(A, phi, psi) with

    P u = sum_j (-D_j + d_j psi) [ sum_k A_{kj} (D_k u + (d_k phi) u) ],

D_j the (semiclassical) derivative.  `assemble_factorization` expands the
right side into divergence normal form; `check_necessary` runs the two kernel
conditions P(e^{-phi/h}) = 0 and P*(e^{-psi/h}) = 0; `construct` builds the
antisymmetric correction C so that A = B + C factorizes P, by solving the
weighted divergence equation

    sum_j (D_j - g_j) C_{jk} = vtilde_k,       g = d(phi + psi),

either through the exterior-calculus homotopy (unweighted case) or through an
exact bounded-degree linear solve over the rationals (weighted case).  Every
construction is re-verified against the factorization identity before a
verdict is issued.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional, Sequence

from .extcalc import Section, antisym_matrix_from_2vector, homotopy_inverse_delta
from .opcore import SecondOrderOperator, zero_matrix
from .polyalg import Poly, VarSpace


class SusyError(ValueError):
    pass


@dataclass(frozen=True)
class SusyStructure:
    A: tuple[tuple[Poly, ...], ...]
    phi: Poly
    psi: Poly

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(tuple(row) for row in self.A))

    @property
    def space(self) -> VarSpace:
        return self.phi.space

    @property
    def sym_part(self) -> tuple[tuple[Poly, ...], ...]:
        n = len(self.A)
        return tuple(tuple((self.A[j][k] + self.A[k][j]) * Fraction(1, 2) for k in range(n))
                     for j in range(n))

    @property
    def antisym_part(self) -> tuple[tuple[Poly, ...], ...]:
        n = len(self.A)
        return tuple(tuple((self.A[j][k] - self.A[k][j]) * Fraction(1, 2) for k in range(n))
                     for j in range(n))

    def to_json_dict(self) -> dict:
        return {
            "A": [{"i": j, "j": k, "poly": self.A[j][k].to_literal()}
                  for j in range(len(self.A)) for k in range(len(self.A))
                  if not self.A[j][k].is_zero],
            "phi": self.phi.to_literal(),
            "psi": self.psi.to_literal(),
        }


@dataclass(frozen=True)
class SusyVerdict:
    status: str  # verified | constructed | necessary_condition_failed | construction_failed
    structure: Optional[SusyStructure] = None
    failure_witness: Optional[Poly] = None

    def __post_init__(self):
        if self.status not in ("verified", "constructed",
                               "necessary_condition_failed", "construction_failed"):
            raise SusyError(f"unknown verdict status {self.status!r}")

    def to_json_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.failure_witness is not None:
            out["witness"] = self.failure_witness.to_literal()
        if self.structure is not None:
            out["structure"] = self.structure.to_json_dict()
        return out


def assemble_factorization(A: Sequence[Sequence[Poly]], phi: Poly, psi: Poly,
                           semiclassical: bool = True) -> SecondOrderOperator:
    """Expand u -> sum_j (-D_j + d_j psi)[ sum_k A_{kj} (D_k u + (d_k phi) u) ]
    into divergence normal form.  The second-order block is exactly the
    symmetric part of A."""
    space = phi.space
    n = space.n
    if psi.space != space or any(p.space != space for row in A for p in row):
        raise SusyError("A, phi, psi must share one variable space")
    if len(A) != n or any(len(row) != n for row in A):
        raise SusyError("A must be square over the variable space")

    def D(f: Poly, j: int) -> Poly:
        df = f.partial(space.names[j])
        return df.h_shift(1) if semiclassical else df

    gphi = [phi.partial(name) for name in space.names]
    gpsi = [psi.partial(name) for name in space.names]

    B = [[(A[j][k] + A[k][j]) * Fraction(1, 2) for k in range(n)] for j in range(n)]
    v = [Poly.zero(space) for _ in range(n)]
    v0 = Poly.zero(space)
    for j in range(n):
        for k in range(n):
            T_jk = (A[k][j] - A[j][k]) * Fraction(1, 2)
            v[k] = v[k] - D(T_jk, j)
            v[j] = v[j] - A[k][j] * gphi[k]
            v[k] = v[k] + gpsi[j] * A[k][j]
            v0 = v0 - D(A[k][j] * gphi[k], j)
            v0 = v0 + gpsi[j] * A[k][j] * gphi[k]
    return SecondOrderOperator(space, tuple(tuple(r) for r in B), tuple(v), v0, semiclassical)


def check_necessary(P: SecondOrderOperator, phi: Poly, psi: Poly) -> SusyVerdict:
    """The two kernel conditions of the factorization theorem: P must kill the
    Maxwellian e^{-phi/h} and its adjoint must kill e^{-psi/h}."""
    r1 = P.kernel_test(phi)
    if not r1.vanishes:
        return SusyVerdict("necessary_condition_failed", failure_witness=r1.residual)
    r2 = P.adjoint().kernel_test(psi)
    if not r2.vanishes:
        return SusyVerdict("necessary_condition_failed", failure_witness=r2.residual)
    return SusyVerdict("verified")


# ----------------------------------------------------------------- construct

def _monomial_basis(space: VarSpace, max_deg: int, max_hpow: int):
    n = space.n
    keys = []
    for hp in range(max_hpow + 1):
        for deg in range(max_deg + 1):
            for combo in combinations_with_replacement(range(n), deg):
                exps = [0] * n
                for i in combo:
                    exps[i] += 1
                keys.append((tuple(exps), hp))
    return keys


def _solve_linear_fraction(rows: list[dict[int, Fraction]], rhs: list[Fraction],
                           ncols: int) -> Optional[list[Fraction]]:
    """Exact Gaussian elimination for a sparse rational system; returns one
    solution (free unknowns set to 0) or None if inconsistent."""
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    pivot_of_col: dict[int, int] = {}
    order: list[tuple[int, int]] = []  # (row, col) pivots in elimination order
    for r in range(len(rows)):
        row, b = rows[r], rhs[r]
        # eliminate with existing pivots
        for pc, pr in list(pivot_of_col.items()):
            f = row.get(pc)
            if f:
                prow = rows[pr]
                for c, val in prow.items():
                    nv = row.get(c, Fraction(0)) - f * val
                    if nv:
                        row[c] = nv
                    else:
                        row.pop(c, None)
                b -= f * rhs[pr]
        rhs[r] = b
        row = {c: v for c, v in row.items() if v}
        rows[r] = row
        if not row:
            if b != 0:
                return None
            continue
        pc = min(row)
        inv = 1 / row[pc]
        rows[r] = {c: v * inv for c, v in row.items()}
        rhs[r] = b * inv
        pivot_of_col[pc] = r
        order.append((r, pc))
    sol = [Fraction(0)] * ncols
    for r, pc in reversed(order):
        val = rhs[r]
        for c, coef in rows[r].items():
            if c != pc:
                val -= coef * sol[c]
        sol[pc] = val
    return sol


def _weighted_divergence_solve(space: VarSpace, g: list[Poly], vtilde: list[Poly],
                               semiclassical: bool) -> Optional[list[list[Poly]]]:
    """Find an antisymmetric polynomial matrix C with
    sum_j (D_j - g_j) C_{jk} = vtilde_k for all k, or None.

    Bounded-degree ansatz, grown over a short ladder of degree caps; each
    candidate system is solved exactly over the rationals.
    """
    n = space.n
    deg_v = max((p.total_degree() for p in vtilde), default=0)
    deg_g = max((p.total_degree() for p in g), default=0)
    hmax = max((p.max_hpow() for p in vtilde), default=0) + 1
    ladder = sorted({max(0, deg_v - deg_g + 1), deg_v, deg_v + 2})
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]

    def L(C: dict[tuple[int, int], Poly]) -> list[Poly]:
        out = [Poly.zero(space) for _ in range(n)]
        for k in range(n):
            for j in range(n):
                if j == k:
                    continue
                a, b = (j, k) if j < k else (k, j)
                Cjk = C.get((a, b), Poly.zero(space))
                if j > k:
                    Cjk = -Cjk
                dC = Cjk.partial(space.names[j])
                if semiclassical:
                    dC = dC.h_shift(1)
                out[k] = out[k] + dC - g[j] * Cjk
        return out

    for D in ladder:
        basis = _monomial_basis(space, D, hmax)
        unknowns = [(pair, key) for pair in pairs for key in basis]
        col_of = {u: i for i, u in enumerate(unknowns)}
        # image of each basis unknown under L
        eq_rows: dict[tuple[int, tuple], dict[int, Fraction]] = {}
        for (pair, key), col in col_of.items():
            img = L({pair: Poly(space, {key: Fraction(1)})})
            for k in range(n):
                for tk, c in img[k].terms.items():
                    eq_rows.setdefault((k, tk), {})[col] = \
                        eq_rows.get((k, tk), {}).get(col, Fraction(0)) + c
        for k in range(n):
            for tk in vtilde[k].terms:
                eq_rows.setdefault((k, tk), {})
        keys = sorted(eq_rows.keys())
        rows = [eq_rows[k] for k in keys]
        rhs = [vtilde[k].terms.get(tk, Fraction(0)) for (k, tk) in keys]
        sol = _solve_linear_fraction(rows, rhs, len(unknowns))
        if sol is None:
            continue
        C = zero_matrix(space)
        for (pair, key), col in col_of.items():
            c = sol[col]
            if c:
                j, k = pair
                mono = Poly(space, {key: c})
                C[j][k] = C[j][k] + mono
                C[k][j] = C[k][j] - mono
        check = L({(j, k): C[j][k] for j in range(n) for k in range(j + 1, n)})
        if all((chk - vt).is_zero for chk, vt in zip(check, vtilde)):
            return C
    return None


def construct(P: SecondOrderOperator, phi: Poly, psi: Poly) -> SusyVerdict:
    """Build a supersymmetric structure A = B + C for P with the given
    weights, or report why none was produced.

    Steps: verify the kernel conditions; conjugate by e^{phi/h} so the zero
    order vanishes; reduce to the weighted divergence equation for the
    antisymmetric part; solve it (homotopy operator when the combined weight
    is constant, exact linear algebra otherwise); re-verify the factorization
    identity exactly.
    """
    nec = check_necessary(P, phi, psi)
    if nec.status != "verified":
        return nec
    space = P.space
    n = space.n
    P1 = P.exp_conjugate(phi, +1)
    g_poly = phi + psi
    g = [g_poly.partial(name) for name in space.names]
    vtilde = [P1.v[k] for k in range(n)]
    for k in range(n):
        for j in range(n):
            vtilde[k] = vtilde[k] - g[j] * P.B[j][k]

    # compatibility: sum_k (D_k - g_k) vtilde_k = 0 is forced by the adjoint
    # kernel condition; a violation signals an internal arithmetic fault
    compat = Poly.zero(space)
    for k in range(n):
        dv = vtilde[k].partial(space.names[k])
        if P.semiclassical:
            dv = dv.h_shift(1)
        compat = compat + dv - g[k] * vtilde[k]
    if not compat.is_zero:
        return SusyVerdict("construction_failed", failure_witness=compat)

    C: Optional[list[list[Poly]]]
    if all(gj.is_zero for gj in g):
        # unweighted divergence equation sum_j D_j C_{jk} = vtilde_k
        rhs = vtilde
        if P.semiclassical:
            try:
                rhs = [p.h_shift(-1) for p in vtilde]
            except Exception:
                return SusyVerdict("construction_failed",
                                   failure_witness=next(p for p in vtilde if not p.is_zero))
        if all(p.is_zero for p in rhs):
            C = zero_matrix(space)
        else:
            vfield = Section(space, 1, {(k,): rhs[k] for k in range(n)})
            try:
                gamma = homotopy_inverse_delta(vfield)
            except Exception:
                return SusyVerdict("construction_failed",
                                   failure_witness=next(p for p in rhs if not p.is_zero))
            C = zero_matrix(space)
            for (j, k), p in antisym_matrix_from_2vector(gamma).items():
                C[j][k] = p
            # matrix convention check: sum_j d_j C_{jk} = rhs_k
            for k in range(n):
                acc = Poly.zero(space)
                for j in range(n):
                    acc = acc + C[j][k].partial(space.names[j])
                if not (acc - rhs[k]).is_zero:
                    return SusyVerdict("construction_failed", failure_witness=acc - rhs[k])
    else:
        C = _weighted_divergence_solve(space, g, vtilde, P.semiclassical)
        if C is None:
            return SusyVerdict("construction_failed",
                               failure_witness=next((p for p in vtilde if not p.is_zero),
                                                    Poly.zero(space)))

    A = [[P.B[j][k] + C[j][k] for k in range(n)] for j in range(n)]
    Q = assemble_factorization(A, phi, psi, P.semiclassical)
    diff = _operator_difference(P, Q)
    if diff is not None:
        return SusyVerdict("construction_failed", failure_witness=diff)
    return SusyVerdict("constructed", structure=SusyStructure(tuple(tuple(r) for r in A), phi, psi))


def _operator_difference(P: SecondOrderOperator, Q: SecondOrderOperator) -> Optional[Poly]:
    """First nonzero coefficient difference between two operators, or None."""
    n = P.space.n
    for j in range(n):
        for k in range(n):
            d = P.B[j][k] - Q.B[j][k]
            if not d.is_zero:
                return d
    for j in range(n):
        d = P.v[j] - Q.v[j]
        if not d.is_zero:
            return d
    d = P.v0 - Q.v0
    return None if d.is_zero else d


def verify_structure(P: SecondOrderOperator, s: SusyStructure) -> SusyVerdict:
    """Exact check of the factorization identity for a candidate structure."""
    Q = assemble_factorization(s.A, s.phi, s.psi, P.semiclassical)
    diff = _operator_difference(P, Q)
    if diff is None:
        return SusyVerdict("verified", structure=s)
    return SusyVerdict("necessary_condition_failed", failure_witness=diff)


def verify_reference_structures() -> list[dict]:
    """Check every bundled model that ships a reference structure: the
    assembled factorization must reproduce the model's conjugated operator
    exactly.  Returns one record per model."""
    from . import models

    report = []
    for name, bundle in models.reference_bundles().items():
        rec: dict = {"model": name}
        if bundle.reference_susy is None:
            rec["status"] = "no_reference_structure"
        else:
            verdict = verify_structure(bundle.conjugated, bundle.reference_susy)
            rec["status"] = "ok" if verdict.status == "verified" else "mismatch"
            if verdict.status != "verified":
                rec["difference"] = repr(verdict.failure_witness)
        report.append(rec)
    return report
