"""Exterior calculus on R^n with polynomial coefficients.

Both differential forms and multivector fields are stored degree by degree as
maps from strictly increasing index tuples to polynomials.  The operators

    d  = sum_j dx_j^ ∘ d/dx_j          (on forms)
    delta = -sum_j d/dx_j ∘ dx_j_|     (on multivectors)

act with exact rational coefficients.  Exactness of the delta-complex in
degree 1 is made effective by a radial Poincare homotopy: a divergence-free
vector field v is dualized into a closed (n-1)-form by contraction with the
Lebesgue volume form, primitived by the homotopy operator

    K(omega)(x) = int_0^1 t^{p-1} (x _| omega)(t x) dt,

which on a monomial section integrates exactly over the rationals, and then
dualized back to a 2-vector.  Orientation and sign conventions are never
trusted: the returned primitive is always re-verified against the residual
identity before it leaves the function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .polyalg import Poly, PolyError, VarSpace


class ExtCalcError(ValueError):
    pass


def _check_increasing(idx: tuple[int, ...], n: int):
    if any(i < 0 or i >= n for i in idx):
        raise ExtCalcError(f"index out of range in {idx}")
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise ExtCalcError(f"index tuple {idx} is not strictly increasing")


@dataclass(frozen=True)
class Section:
    """A degree-k section (form or multivector alike: the algebra is the same).

    coefficients: strictly increasing index tuple (length k) -> Poly.
    """

    space: VarSpace
    degree: int
    coefficients: Mapping[tuple[int, ...], Poly]

    def __post_init__(self):
        clean = {}
        for idx, p in self.coefficients.items():
            idx = tuple(idx)
            _check_increasing(idx, self.space.n)
            if len(idx) != self.degree:
                raise ExtCalcError("index tuple length does not match the degree")
            if p.space != self.space:
                raise PolyError("coefficient over a different variable space")
            if not p.is_zero:
                clean[idx] = p
        object.__setattr__(self, "coefficients", clean)

    # ----------------------------------------------------------- vector space
    @staticmethod
    def zero(space: VarSpace, degree: int) -> "Section":
        return Section(space, degree, {})

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other: "Section") -> "Section":
        if self.space != other.space or self.degree != other.degree:
            raise ExtCalcError("cannot add sections of different type")
        out = dict(self.coefficients)
        for idx, p in other.coefficients.items():
            out[idx] = out.get(idx, Poly.zero(self.space)) + p
        return Section(self.space, self.degree, out)

    def __neg__(self) -> "Section":
        return Section(self.space, self.degree, {i: -p for i, p in self.coefficients.items()})

    def __sub__(self, other: "Section") -> "Section":
        return self + (-other)

    def scale(self, c) -> "Section":
        return Section(self.space, self.degree, {i: p * c for i, p in self.coefficients.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, Section) and self.space == other.space
                and self.degree == other.degree and self.coefficients == other.coefficients)

    def get(self, idx: tuple[int, ...]) -> Poly:
        return self.coefficients.get(tuple(idx), Poly.zero(self.space))

    def __repr__(self):
        if self.is_zero:
            return f"Section(deg={self.degree}, 0)"
        parts = [f"[{','.join(map(str, i))}]: {p}" for i, p in sorted(self.coefficients.items())]
        return f"Section(deg={self.degree}, " + "; ".join(parts) + ")"


FormField = Section
MultiVector = Section


def wedge_insert(j: int, idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted tuple for e_j ^ e_idx; None if j already occurs."""
    if j in idx:
        return None
    pos = sum(1 for i in idx if i < j)
    return (-1) ** pos, idx[:pos] + (j,) + idx[pos:]


def contract(j: int, idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and tuple for e_j _| e_idx (interior product); None if j absent."""
    if j not in idx:
        return None
    pos = idx.index(j)
    return (-1) ** pos, idx[:pos] + idx[pos + 1:]


def d(omega: FormField) -> FormField:
    """Exterior derivative; on top-degree forms returns the zero form."""
    space = omega.space
    out: dict[tuple[int, ...], Poly] = {}
    for idx, p in omega.coefficients.items():
        for j, name in enumerate(space.names):
            dp = p.partial(name)
            if dp.is_zero:
                continue
            w = wedge_insert(j, idx)
            if w is None:
                continue
            sign, new = w
            out[new] = out.get(new, Poly.zero(space)) + dp * sign
    return Section(space, omega.degree + 1, out)


def delta(X: MultiVector) -> MultiVector:
    """The divergence-type codifferential: delta = -sum_j d/dx_j ∘ dx_j_| ."""
    if X.degree < 1:
        raise ExtCalcError("delta is defined on degree >= 1")
    space = X.space
    out: dict[tuple[int, ...], Poly] = {}
    for idx, p in X.coefficients.items():
        for j, name in enumerate(space.names):
            c = contract(j, idx)
            if c is None:
                continue
            sign, new = c
            dp = p.partial(name)
            if dp.is_zero:
                continue
            out[new] = out.get(new, Poly.zero(space)) - dp * sign
    return Section(space, X.degree - 1, out)


# --------------------------------------------------------------------- duality

def _complement(idx: tuple[int, ...], n: int) -> tuple[int, ...]:
    s = set(idx)
    return tuple(i for i in range(n) if i not in s)


def _perm_sign(idx: tuple[int, ...], comp: tuple[int, ...]) -> int:
    """Sign of the permutation (idx, comp) of (0..n-1); both pieces increasing."""
    seq = idx + comp
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


def vector_to_form(X: MultiVector) -> FormField:
    """Contract a k-vector with the Lebesgue volume form dx_1^...^dx_n,
    producing an (n-k)-form.  The coefficient picks up the sign of the
    shuffle permutation."""
    n = X.space.n
    out = {}
    for idx, p in X.coefficients.items():
        comp = _complement(idx, n)
        out[comp] = p * _perm_sign(idx, comp)
    return Section(X.space, n - X.degree, out)


def form_to_vector(omega: FormField) -> MultiVector:
    """Inverse of vector_to_form."""
    n = omega.space.n
    out = {}
    for comp, p in omega.coefficients.items():
        idx = _complement(comp, n)
        out[idx] = p * _perm_sign(idx, comp)
    return Section(omega.space, n - omega.degree, out)


# ----------------------------------------------------------- Poincare homotopy

def poincare_homotopy(omega: FormField) -> FormField:
    """Radial homotopy operator K with d∘K + K∘d = identity on positive-degree
    forms over R^n (base point the origin).

    On a monomial section x^a dx_J of degree p the operator evaluates to

        sum_i (-1)^{i-1} x_{j_i} x^a / (|a| + p) dx_{J \\ j_i},

    the rational factor coming from int_0^1 t^{|a|+p-1} dt.
    """
    p = omega.degree
    if p < 1:
        raise ExtCalcError("the homotopy operator acts on degree >= 1")
    space = omega.space
    out: dict[tuple[int, ...], Poly] = {}
    for idx, poly in omega.coefficients.items():
        for (exps, hpow), c in poly.terms.items():
            weight = Fraction(1, sum(exps) + p)
            for pos, j in enumerate(idx):
                sign = (-1) ** pos
                new_exps = tuple(e + 1 if i == j else e for i, e in enumerate(exps))
                mono = Poly(space, {(new_exps, hpow): c * weight * sign})
                key = idx[:pos] + idx[pos + 1:]
                out[key] = out.get(key, Poly.zero(space)) + mono
    return Section(space, p - 1, out)


def homotopy_inverse_delta(v: MultiVector) -> MultiVector:
    """Given a divergence-free 1-vector field v, return a 2-vector Gamma with

        delta(Gamma) = -2 v      (exactly).

    Raises if delta(v) != 0 (the residual is attached to the exception) or,
    defensively, if the construction fails its own residual check.
    """
    if v.degree != 1:
        raise ExtCalcError("expected a 1-vector field")
    space = v.space
    n = space.n
    res = delta(v)
    if not res.is_zero:
        raise ExtCalcError(f"input is not divergence-free; delta(v) = {res.get(())}")
    if v.is_zero:
        return Section.zero(space, 2)
    if n == 1:
        # the only divergence-free field in one variable is constant 0
        raise ExtCalcError("nonzero divergence-free field cannot exist over R^1")
    omega = vector_to_form(v)          # closed (n-1)-form
    beta = poincare_homotopy(omega)    # primitive: d(beta) = omega
    gamma_raw = form_to_vector(beta)   # 2-vector with delta(gamma_raw) = ±v
    resid = delta(gamma_raw)
    if resid == v:
        gamma = gamma_raw.scale(-2)
    elif resid == -v:
        gamma = gamma_raw.scale(2)
    else:
        raise ExtCalcError("homotopy construction failed its residual check")
    check = delta(gamma) + v.scale(2)
    if not check.is_zero:
        raise ExtCalcError("normalization check failed")
    return gamma


def antisym_matrix_from_2vector(G: MultiVector) -> dict[tuple[int, int], Poly]:
    """Full antisymmetric matrix C with Gamma = sum_{j<k} G_{jk} d_j ^ d_k
    written as sum_{j,k} C_{jk} d_j ^ d_k over all pairs: C_{jk} = G_{jk}/2
    for j<k, C_{kj} = -C_{jk}."""
    if G.degree != 2:
        raise ExtCalcError("expected a 2-vector")
    out: dict[tuple[int, int], Poly] = {}
    for (j, k), p in G.coefficients.items():
        half = p * Fraction(1, 2)
        out[(j, k)] = half
        out[(k, j)] = -half
    return out


def two_vector_from_antisym_matrix(space: VarSpace, C: Mapping[tuple[int, int], Poly]) -> MultiVector:
    """Inverse of antisym_matrix_from_2vector for an antisymmetric C."""
    out: dict[tuple[int, ...], Poly] = {}
    for (j, k), p in C.items():
        if j == k:
            if not p.is_zero:
                raise ExtCalcError("antisymmetric matrix has a nonzero diagonal entry")
            continue
        a, b = (j, k) if j < k else (k, j)
        signed = p if j < k else -p
        out[(a, b)] = out.get((a, b), Poly.zero(space)) + signed
    return Section(space, 2, out)
