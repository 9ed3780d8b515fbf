"""Second-order real differential operators in divergence normal form.

An operator is the triple (B, v, v0) representing

    P = - sum_{j,k} D_j ∘ B_{jk} ∘ D_k + sum_j v_j D_j + v0,

where D_j = h d/dx_j in the semiclassical convention and D_j = d/dx_j in the
non-semiclassical one (the `semiclassical` flag records which).  B is exactly
symmetric and every coefficient is a rational polynomial, possibly carrying a
finite h-expansion.

All the structural manipulations used downstream live here: application to a
polynomial, the formal Lebesgue-L2 adjoint, conjugation by exponential
weights e^{s phi/h} (which keeps the normal form polynomial), the kernel test
P(e^{-phi/h}) = 0 as an exact h-graded identity, leading semiclassical
symbols, and the two eikonal residuals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polyalg import Poly, PolyError, VarSpace


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class SecondOrderOperator:
    space: VarSpace
    B: tuple[tuple[Poly, ...], ...]
    v: tuple[Poly, ...]
    v0: Poly
    semiclassical: bool = True

    def __post_init__(self):
        n = self.space.n
        B = tuple(tuple(row) for row in self.B)
        if len(B) != n or any(len(row) != n for row in B):
            raise OperatorError("B must be an n x n matrix over the variable space")
        if len(self.v) != n:
            raise OperatorError("v must have one entry per variable")
        for row in B:
            for p in row:
                if p.space != self.space:
                    raise PolyError("B entry over a different variable space")
        for j in range(n):
            for k in range(j + 1, n):
                if B[j][k] != B[k][j]:
                    raise OperatorError(f"B is not symmetric at entry ({j},{k})")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "v", tuple(self.v))

    # ------------------------------------------------------------- helpers
    def _D(self, f: Poly, j: int) -> Poly:
        df = f.partial(self.space.names[j])
        return df.h_shift(1) if self.semiclassical else df

    def __eq__(self, other) -> bool:
        return (isinstance(other, SecondOrderOperator) and self.space == other.space
                and self.semiclassical == other.semiclassical and self.B == other.B
                and self.v == other.v and self.v0 == other.v0)

    # ---------------------------------------------------------------- apply
    def apply(self, f: Poly) -> Poly:
        if f.space != self.space:
            raise PolyError("operand lives over a different variable space")
        n = self.space.n
        out = self.v0 * f
        for j in range(n):
            out = out + self.v[j] * self._D(f, j)
            for k in range(n):
                out = out - self._D(self.B[j][k] * self._D(f, k), j)
        return out

    # -------------------------------------------------------------- adjoint
    def adjoint(self) -> "SecondOrderOperator":
        """Formal adjoint with respect to the Lebesgue L2 pairing."""
        n = self.space.n
        div_v = Poly.zero(self.space)
        for j in range(n):
            div_v = div_v + self.v[j].partial(self.space.names[j])
        if self.semiclassical:
            div_v = div_v.h_shift(1)
        return SecondOrderOperator(self.space, self.B,
                                   tuple(-vj for vj in self.v),
                                   self.v0 - div_v, self.semiclassical)

    # --------------------------------------------------------- conjugation
    def exp_conjugate(self, phi: Poly, sign: int = 1) -> "SecondOrderOperator":
        """Return e^{s phi/h} ∘ P ∘ e^{-s phi/h} in normal form (s = sign).

        Built from the identity e^{s phi/h} D_j e^{-s phi/h} = D_j - s d_j phi,
        so every coefficient stays polynomial in x and h.
        """
        if sign not in (1, -1):
            raise OperatorError("sign must be +1 or -1")
        if phi.space != self.space:
            raise PolyError("weight lives over a different variable space")
        n = self.space.n
        g = [phi.partial(name) * sign for name in self.space.names]
        B = self.B
        v_new = []
        for j in range(n):
            vj = self.v[j]
            for k in range(n):
                vj = vj + 2 * B[j][k] * g[k]
            v_new.append(vj)
        v0_new = self.v0
        for j in range(n):
            v0_new = v0_new - self.v[j] * g[j]
            for k in range(n):
                v0_new = v0_new + self._D(B[j][k] * g[k], j)
                v0_new = v0_new - g[j] * B[j][k] * g[k]
        return SecondOrderOperator(self.space, B, tuple(v_new), v0_new, self.semiclassical)

    # ---------------------------------------------------------- kernel test
    def kernel_test(self, phi: Poly) -> "KernelTestReport":
        """Exact residual r with P(e^{-phi/h}) = r e^{-phi/h}; r is the zero-
        order coefficient of the conjugated operator."""
        r = self.exp_conjugate(phi, +1).v0
        if r.is_zero:
            return KernelTestReport(r, True, None)
        return KernelTestReport(r, False, min(h for (_, h) in r.terms))

    # -------------------------------------------------------------- symbols
    def symbols(self) -> tuple[Poly, Poly, Poly, VarSpace]:
        """Leading semiclassical symbols.

        Returns (p_re, p_im, q, phase_space) over the doubled variable space
        (x, x') where x'_j is dual to x_j:

            p(x, xi) = sum B0_{jk} xi_j xi_k + i sum v0_j xi_j + v00,
            q(x, Xi) = -p(x, i Xi) = sum B0 Xi Xi + sum v0 Xi - v00,

        using the h^0 parts of the coefficients.  q is real by construction.
        """
        phase = self.space.with_duals()
        n = self.space.n
        xi = [Poly.var(phase, name + "'") for name in self.space.names]
        B0 = [[self.B[j][k].h0().lift(phase) for k in range(n)] for j in range(n)]
        v0_ = [self.v[j].h0().lift(phase) for j in range(n)]
        c0 = self.v0.h0().lift(phase)
        quad = Poly.zero(phase)
        lin = Poly.zero(phase)
        for j in range(n):
            lin = lin + v0_[j] * xi[j]
            for k in range(n):
                quad = quad + B0[j][k] * xi[j] * xi[k]
        p_re = quad + c0
        p_im = lin
        q = quad + lin - c0
        return p_re, p_im, q, phase

    # ------------------------------------------------------------- eikonal
    def eikonal_residual(self, phi0: Poly, which: str = "forward") -> Poly:
        """Residual of the eikonal equation for the h-free leading weight.

        forward:  sum B0 d phi0 d phi0 + sum v0 d phi0 - v00
        adjoint: -sum B0 d psi0 d psi0 + sum v0 d psi0 + v00
        """
        if not phi0.is_h_free():
            raise OperatorError("eikonal weight must be h-free")
        if which not in ("forward", "adjoint"):
            raise OperatorError("which must be 'forward' or 'adjoint'")
        n = self.space.n
        grad = [phi0.partial(name) for name in self.space.names]
        quad = Poly.zero(self.space)
        lin = Poly.zero(self.space)
        for j in range(n):
            lin = lin + self.v[j].h0() * grad[j]
            for k in range(n):
                quad = quad + self.B[j][k].h0() * grad[j] * grad[k]
        c0 = self.v0.h0()
        if which == "forward":
            return quad + lin - c0
        return -quad + lin + c0

    # -------------------------------------------------------- serialization
    def to_json_dict(self) -> dict:
        d = self.space.to_json_dict()
        return {
            "variables": d["variables"],
            "blocks": d["blocks"],
            "semiclassical": self.semiclassical,
            "B": [{"i": j, "j": k, "poly": self.B[j][k].to_literal()}
                  for j in range(self.space.n) for k in range(j, self.space.n)
                  if not self.B[j][k].is_zero],
            "v": [{"i": j, "poly": self.v[j].to_literal()}
                  for j in range(self.space.n) if not self.v[j].is_zero],
            "v0": self.v0.to_literal(),
        }

    @staticmethod
    def from_json_dict(data: dict) -> "SecondOrderOperator":
        space = VarSpace.from_json_dict(data)
        n = space.n
        B = [[Poly.zero(space) for _ in range(n)] for _ in range(n)]
        for item in data.get("B", []):
            j, k = int(item["i"]), int(item["j"])
            p = Poly.from_literal(space, item["poly"])
            B[j][k] = B[j][k] + p
            if j != k:
                B[k][j] = B[k][j] + p
        v = [Poly.zero(space) for _ in range(n)]
        for item in data.get("v", []):
            v[int(item["i"])] = Poly.from_literal(space, item["poly"])
        v0 = Poly.from_literal(space, data.get("v0", []))
        return SecondOrderOperator(space, tuple(tuple(r) for r in B), tuple(v), v0,
                                   bool(data.get("semiclassical", True)))


@dataclass(frozen=True)
class KernelTestReport:
    residual: Poly
    vanishes: bool
    leading_h_order: int | None


def zero_matrix(space: VarSpace) -> list[list[Poly]]:
    return [[Poly.zero(space) for _ in range(space.n)] for _ in range(space.n)]


def identity_matrix(space: VarSpace, scale=1) -> list[list[Poly]]:
    M = zero_matrix(space)
    for j in range(space.n):
        M[j][j] = Poly.const(space, Fraction(scale))
    return M


def matrix_from_entries(space: VarSpace, entries: dict[tuple[int, int], Poly]) -> list[list[Poly]]:
    M = zero_matrix(space)
    for (j, k), p in entries.items():
        M[j][k] = M[j][k] + p
    return M


def laplacian(space: VarSpace, semiclassical: bool = True) -> SecondOrderOperator:
    """-h^2 Delta (or -Delta when semiclassical=False)."""
    return SecondOrderOperator(space, tuple(tuple(r) for r in identity_matrix(space)),
                               tuple(Poly.zero(space) for _ in range(space.n)),
                               Poly.zero(space), semiclassical)
