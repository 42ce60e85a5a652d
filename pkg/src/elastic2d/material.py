"""Symbolic construction of the truncated 2-D isotropic elastic energy.

Everything here is exact.  Starting from the seven Taylor coefficients of the
stored energy (as a function of the two principal strain invariants), the
module rebuilds, as polynomial identities in the displacement-gradient
entries:

* the Cauchy-Green strain ``C = G + G^T + G G^T`` and its invariants;
* the homogeneous energy parts ``l2, l3, l4`` (degree >= 5 discarded);
* the unique rewrite of each part in the divergence / perpendicular
  divergence / null-form basis ``D, R, Q``;
* the derived material constants ``c1^2, c2^2, d1..d3, e1..e6``;
* the Euler-Lagrange right-hand side as jet polynomials split into linear,
  quadratic and cubic parts, together with its flux (divergence) form;
* the constant six- and eight-index tensors whose contractions regenerate
  the quadratic and cubic nonlinearities.

The printed closed forms of the coefficient lists are kept only as audit
targets (`audit_printed_formulas`); the composition of the truncated energy
with the invariants is the ground truth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .poly import (JET1, JET2, Polynomial, Rat, VariableSpace, frac, g_name,
                   u2_name)

#: Field-form variable space: D = div u, R = perp-div u, Q = Q12(u^1, u^2).
#: Q carries grading weight 2 because it is quadratic in the jet variables.
DRQ = VariableSpace(("D", "R", "Q"), (1, 1, 2))

SIGMA_NAMES = ("sigma2", "sigma11", "sigma12", "sigma111",
               "sigma112", "sigma1111", "sigma22")


class FieldFormError(ValueError):
    """Input polynomial is not in the subalgebra generated by D, R, Q."""


@dataclass(frozen=True)
class MaterialModel:
    """Taylor coefficients of the stored energy at zero strain.

    The constant and linear coefficients are identically zero (stress-free
    reference configuration) and have no fields.
    """

    sigma2: Fraction = Fraction(0)
    sigma11: Fraction = Fraction(0)
    sigma12: Fraction = Fraction(0)
    sigma111: Fraction = Fraction(0)
    sigma112: Fraction = Fraction(0)
    sigma1111: Fraction = Fraction(0)
    sigma22: Fraction = Fraction(0)

    @classmethod
    def of(cls, **kwargs: Rat | str) -> "MaterialModel":
        unknown = set(kwargs) - set(SIGMA_NAMES)
        if unknown:
            raise ValueError(f"unknown material coefficients: {sorted(unknown)}")
        return cls(**{k: frac(v) for k, v in kwargs.items()})

    def validate(self) -> None:
        """Enforce hyperbolicity: c1 > c2 > 0."""
        if not self.sigma11 > 0:
            raise ValueError("sigma11 must be positive (pressure speed c1^2 = 4*sigma11)")
        if not self.sigma2 < 0:
            raise ValueError("sigma2 must be negative (shear speed c2^2 = -2*sigma2)")
        if not 4 * self.sigma11 > -2 * self.sigma2:
            raise ValueError("need c1 > c2, i.e. 4*sigma11 > -2*sigma2")

    def as_dict(self) -> dict[str, Fraction]:
        return {name: getattr(self, name) for name in SIGMA_NAMES}


# ---------------------------------------------------------------------------
# 2x2 polynomial matrices and strain invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Matrix2Poly:
    """A 2x2 matrix of polynomials over a common variable space."""

    a11: Polynomial
    a12: Polynomial
    a21: Polynomial
    a22: Polynomial

    def __add__(self, other: "Matrix2Poly") -> "Matrix2Poly":
        return Matrix2Poly(self.a11 + other.a11, self.a12 + other.a12,
                           self.a21 + other.a21, self.a22 + other.a22)

    def __matmul__(self, other: "Matrix2Poly") -> "Matrix2Poly":
        return Matrix2Poly(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22)

    @property
    def T(self) -> "Matrix2Poly":
        return Matrix2Poly(self.a11, self.a21, self.a12, self.a22)

    def trace(self) -> Polynomial:
        return self.a11 + self.a22

    def entry(self, i: int, l: int) -> Polynomial:
        return getattr(self, f"a{i}{l}")


def generic_gradient(space: VariableSpace = JET1) -> Matrix2Poly:
    """The symbolic displacement gradient with entries G11..G22."""
    return Matrix2Poly(*(Polynomial.var(space, g_name(i, l))
                         for i in (1, 2) for l in (1, 2)))


def strain_tensor(G: Matrix2Poly) -> Matrix2Poly:
    """Cauchy-Green strain C = G + G^T + G G^T."""
    return G + G.T + (G @ G.T)


def principal_invariants(C: Matrix2Poly) -> tuple[Polynomial, Polynomial]:
    """(k1, k2) = (tr C, det C) via the trace formulas; no eigenvalues."""
    k1 = C.trace()
    k2 = Fraction(1, 2) * (k1 * k1 - (C @ C).trace())
    return k1, k2


def div_poly(space: VariableSpace = JET1) -> Polynomial:
    return Polynomial.var(space, "G11") + Polynomial.var(space, "G22")


def rot_poly(space: VariableSpace = JET1) -> Polynomial:
    """perp-div: d2 u^1 - d1 u^2 = G12 - G21."""
    return Polynomial.var(space, "G12") - Polynomial.var(space, "G21")


def q12_poly(space: VariableSpace = JET1) -> Polynomial:
    """Q12(u^1, u^2) = G11*G22 - G21*G12 (the determinant of the gradient)."""
    v = lambda n: Polynomial.var(space, n)
    return v("G11") * v("G22") - v("G21") * v("G12")


# ---------------------------------------------------------------------------
# energy expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyExpansion:
    """Homogeneous energy parts as polynomials in the first-order jets."""

    l2: Polynomial
    l3: Polynomial
    l4: Polynomial


def energy_expansion(M: MaterialModel) -> EnergyExpansion:
    """Compose the truncated energy with the strain invariants and grade it.

    The quadratic through quartic Taylor groups are composed with (k1, k2) of
    a generic symbolic gradient; homogeneous parts of degree 2, 3, 4 are
    extracted exactly and everything of degree >= 5 is discarded.
    """
    k1, k2 = principal_invariants(strain_tensor(generic_gradient()))
    sigma = (Fraction(1, 2) * M.sigma11 * k1 ** 2 + M.sigma2 * k2
             + Fraction(1, 6) * M.sigma111 * k1 ** 3 + M.sigma12 * k1 * k2
             + Fraction(1, 24) * M.sigma1111 * k1 ** 4
             + Fraction(1, 2) * M.sigma112 * k1 ** 2 * k2
             + Fraction(1, 2) * M.sigma22 * k2 ** 2)
    return EnergyExpansion(sigma.homogeneous_part(2),
                           sigma.homogeneous_part(3),
                           sigma.homogeneous_part(4))


# ---------------------------------------------------------------------------
# field form (D, R, Q basis)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldFormEnergy:
    """l2, l3, l4 rewritten in the algebraically independent D, R, Q symbols."""

    l2: Polynomial
    l3: Polynomial
    l4: Polynomial

    def expand(self) -> EnergyExpansion:
        """Substitute D, R, Q back into jet variables (exact round trip)."""
        bindings = {"D": div_poly(), "R": rot_poly(), "Q": q12_poly()}
        return EnergyExpansion(*(p.substitute(bindings, target=JET1)
                                 for p in (self.l2, self.l3, self.l4)))


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve an exact, full-column-rank linear system by Gauss elimination."""
    m, n = len(rows), len(rows[0]) if rows else 0
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if pivot is None:
            raise FieldFormError("singular column: D,R,Q monomials not independent?")
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            raise FieldFormError("input is not a polynomial in D, R, Q")
    if len(pivots) < n:
        raise FieldFormError("underdetermined system")
    return [aug[i][n] for i in range(n)]


def _express_in_drq(p: Polynomial, degree: int) -> Polynomial:
    """Unique representation of a homogeneous jet polynomial over D, R, Q."""
    if p.is_zero():
        return Polynomial.zero(DRQ)
    d, r, q = div_poly(), rot_poly(), q12_poly()
    candidates = [(a, b, (degree - a - b) // 2)
                  for a in range(degree + 1) for b in range(degree + 1 - a)
                  if (degree - a - b) % 2 == 0]
    columns = [d ** a * r ** b * q ** cq for a, b, cq in candidates]
    row_keys = sorted(set().union(*(set(col.terms) for col in columns), set(p.terms)))
    rows = [[col.terms.get(k, Fraction(0)) for col in columns] for k in row_keys]
    rhs = [p.terms.get(k, Fraction(0)) for k in row_keys]
    sol = _solve_exact(rows, rhs)
    return Polynomial(DRQ, {(a, b, cq): x for (a, b, cq), x in zip(candidates, sol)})


def field_form(E: EnergyExpansion) -> FieldFormEnergy:
    """Rewrite each homogeneous part over {D, R, Q}; exact and unique."""
    return FieldFormEnergy(_express_in_drq(E.l2, 2),
                           _express_in_drq(E.l3, 3),
                           _express_in_drq(E.l4, 4))


# ---------------------------------------------------------------------------
# derived coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivedCoefficients:
    d1: Fraction
    d2: Fraction
    d3: Fraction
    e1: Fraction
    e2: Fraction
    e3: Fraction
    e4: Fraction
    e5: Fraction
    e6: Fraction
    c1sq: Fraction
    c2sq: Fraction

    def as_dict(self) -> dict[str, Fraction]:
        return {k: getattr(self, k) for k in
                ("d1", "d2", "d3", "e1", "e2", "e3", "e4", "e5", "e6", "c1sq", "c2sq")}


def derived_coefficients(M: MaterialModel, ff: FieldFormEnergy | None = None) -> DerivedCoefficients:
    """Read the material constants off the field-form energy."""
    if ff is None:
        ff = field_form(energy_expansion(M))
    return DerivedCoefficients(
        d1=ff.l3.coeff({"D": 3}),
        d2=ff.l3.coeff({"D": 1, "R": 2}),
        d3=ff.l3.coeff({"D": 1, "Q": 1}),
        e1=ff.l4.coeff({"D": 4}),
        e2=ff.l4.coeff({"R": 4}),
        e3=ff.l4.coeff({"D": 2, "R": 2}),
        e4=ff.l4.coeff({"Q": 2}),
        e5=ff.l4.coeff({"D": 2, "Q": 1}),
        e6=ff.l4.coeff({"R": 2, "Q": 1}),
        c1sq=4 * M.sigma11,
        c2sq=-2 * M.sigma2)


def printed_coefficients(M: MaterialModel) -> DerivedCoefficients:
    """The closed-form coefficient lists as printed; audit target only."""
    s2, s11, s12 = M.sigma2, M.sigma11, M.sigma12
    s111, s112, s1111, s22 = M.sigma111, M.sigma112, M.sigma1111, M.sigma22
    return DerivedCoefficients(
        d1=2 * s11 + Fraction(4, 3) * s111,
        d2=2 * (s11 - s12),
        d3=2 * (-2 * s11 + 4 * s12 + s2),
        e1=Fraction(1, 2) * s11 + 2 * s111 + Fraction(2, 3) * s1111,
        e2=Fraction(1, 2) * s11 - s12 + Fraction(1, 2) * s22,
        e3=s11 - s12 + 2 * s111 - 2 * s112,
        e4=2 * s11 - 8 * s12 + 8 * s22 + s2,
        e5=2 * (-s11 + 4 * s12 - 2 * s111 + 4 * s112),
        e6=2 * (-s11 + 3 * s12 - 2 * s22),
        c1sq=4 * s11,
        c2sq=-2 * s2)


# ---------------------------------------------------------------------------
# formal spatial differentiation and the Euler-Lagrange system
# ---------------------------------------------------------------------------

def embed(p: Polynomial, target: VariableSpace) -> Polynomial:
    """Reinterpret a polynomial over a larger space (names must be shared)."""
    return p.substitute({}, target=target)


def total_derivative(p: Polynomial, l: int) -> Polynomial:
    """Formal spatial derivative d/dx^l via the chain rule on jet variables.

    First-order jets G_jm are sent to the second-order jets u^j_{ml}; the
    input must not already contain second-order jets (the space stops there).
    """
    if p.space != JET2:
        p = embed(p, JET2)
    for name in p.variables_present():
        if name.startswith("u"):
            raise ValueError("cannot differentiate second-order jet variables (third order not in space)")
    out = Polynomial.zero(JET2)
    for j in (1, 2):
        for m in (1, 2):
            dp = p.diff(g_name(j, m))
            if not dp.is_zero():
                out = out + dp * Polynomial.var(JET2, u2_name(j, m, l))
    return out


class FieldMarker:
    """Stands for a displacement component u^i inside null-form combinators."""

    __slots__ = ("i",)

    def __init__(self, i: int):
        self.i = i


U1 = FieldMarker(1)
U2 = FieldMarker(2)


def _dx(expr: Polynomial | FieldMarker, l: int) -> Polynomial:
    if isinstance(expr, FieldMarker):
        return Polynomial.var(JET2, g_name(expr.i, l))
    return total_derivative(expr, l)


def q12(a: Polynomial | FieldMarker, b: Polynomial | FieldMarker) -> Polynomial:
    """The null form Q12(a, b) = d1(a) d2(b) - d1(b) d2(a) on jet expressions."""
    return _dx(a, 1) * _dx(b, 2) - _dx(b, 1) * _dx(a, 2)


@dataclass(frozen=True)
class SymbolicRHS:
    """The Euler-Lagrange right-hand side, componentwise and graded.

    ``fluxes[i-1][l-1]`` is the first-order-jet polynomial W_il with
    component_i = d/dx^1 W_i1 + d/dx^2 W_i2; this realizes the divergence
    structure used for conservative discretization and momentum conservation.
    """

    components: tuple[Polynomial, Polynomial]
    linear: tuple[Polynomial, Polynomial]
    n2: tuple[Polynomial, Polynomial]
    n3: tuple[Polynomial, Polynomial]
    fluxes: tuple[tuple[Polynomial, Polynomial], tuple[Polynomial, Polynomial]]


def euler_lagrange(M: MaterialModel) -> SymbolicRHS:
    """d/dx^l of d(l2+l3+l4)/dG_il for i = 1, 2, graded by jet degree."""
    E = energy_expansion(M)
    L = embed(E.l2 + E.l3 + E.l4, JET2)
    fluxes = tuple(tuple(L.diff(g_name(i, l)) for l in (1, 2)) for i in (1, 2))
    comps = tuple(total_derivative(fluxes[i][0], 1) + total_derivative(fluxes[i][1], 2)
                  for i in (0, 1))
    split = []
    for comp in comps:
        parts = tuple(comp.homogeneous_part(d) for d in (1, 2, 3))
        assert parts[0] + parts[1] + parts[2] == comp
        split.append(parts)
    return SymbolicRHS(
        components=comps,
        linear=(split[0][0], split[1][0]),
        n2=(split[0][1], split[1][1]),
        n3=(split[0][2], split[1][2]),
        fluxes=fluxes)


# ---------------------------------------------------------------------------
# displayed nonlinearities (independently typed from the coefficient lists)
# ---------------------------------------------------------------------------

def linear_display(dc: DerivedCoefficients) -> tuple[Polynomial, Polynomial]:
    """c2^2 Lap(u^i) + (c1^2 - c2^2) d_i (div u) as second-order jet polynomials."""
    out = []
    D = embed(div_poly(), JET2)
    for i in (1, 2):
        lap = (Polynomial.var(JET2, u2_name(i, 1, 1))
               + Polynomial.var(JET2, u2_name(i, 2, 2)))
        out.append(dc.c2sq * lap + (dc.c1sq - dc.c2sq) * total_derivative(D, i))
    return tuple(out)


def _drq_jets() -> tuple[Polynomial, Polynomial, Polynomial]:
    return embed(div_poly(), JET2), embed(rot_poly(), JET2), embed(q12_poly(), JET2)


def n2_display(dc: DerivedCoefficients) -> tuple[Polynomial, Polynomial]:
    """Quadratic nonlinearity built term by term from its displayed form."""
    D, R, Q = _drq_jets()
    d1, d2, d3 = dc.d1, dc.d2, dc.d3
    dt = total_derivative
    comp1 = (3 * d1 * dt(D * D, 1)
             + d2 * (dt(R * R, 1) + 2 * dt(D * R, 2))
             + d3 * dt(Q, 1) + d3 * q12(D, U2))
    comp2 = (3 * d1 * dt(D * D, 2)
             + d2 * (dt(R * R, 2) - 2 * dt(D * R, 1))
             + d3 * dt(Q, 2) + d3 * q12(U1, D))
    return comp1, comp2


def n3_display(dc: DerivedCoefficients) -> tuple[Polynomial, Polynomial]:
    """Cubic nonlinearity, including the iterated null-form block."""
    D, R, Q = _drq_jets()
    e1, e2, e3, e4, e5, e6 = dc.e1, dc.e2, dc.e3, dc.e4, dc.e5, dc.e6
    dt = total_derivative
    qt1 = (2 * e4 * q12(Q, U2) + 2 * e5 * dt(D * Q, 1) + e5 * q12(D * D, U2)
           + 2 * e6 * dt(R * Q, 2) + e6 * q12(R * R, U2))
    qt2 = (2 * e4 * q12(U1, Q) + 2 * e5 * dt(D * Q, 2) + e5 * q12(U1, D * D)
           - 2 * e6 * dt(R * Q, 1) + e6 * q12(U1, R * R))
    comp1 = (4 * e1 * dt(D ** 3, 1) + 4 * e2 * dt(R ** 3, 2)
             + 2 * e3 * (dt(D * R * R, 1) + dt(R * D * D, 2)) + qt1)
    comp2 = (4 * e1 * dt(D ** 3, 2) - 4 * e2 * dt(R ** 3, 1)
             + 2 * e3 * (dt(D * R * R, 2) - dt(R * D * D, 1)) + qt2)
    return comp1, comp2


def n2_reduced_display(dc: DerivedCoefficients) -> tuple[Polynomial, Polynomial]:
    """Quadratic nonlinearity of the curl-free (radial) reduction: d3 terms only."""
    D, _, Q = _drq_jets()
    d3 = dc.d3
    return (d3 * total_derivative(Q, 1) + d3 * q12(D, U2),
            d3 * total_derivative(Q, 2) + d3 * q12(U1, D))


def n3_reduced_display(dc: DerivedCoefficients) -> tuple[Polynomial, Polynomial]:
    """Cubic nonlinearity of the curl-free reduction: e4 and e5 terms only."""
    D, _, Q = _drq_jets()
    e4, e5 = dc.e4, dc.e5
    dt = total_derivative
    return (2 * e4 * q12(Q, U2) + 2 * e5 * dt(D * Q, 1) + e5 * q12(D * D, U2),
            2 * e4 * q12(U1, Q) + 2 * e5 * dt(D * Q, 2) + e5 * q12(U1, D * D))


def reduced_linear_display(dc: DerivedCoefficients) -> tuple[Polynomial, Polynomial]:
    """c1^2 Lap(u^i): the single-speed linear operator of the reduction."""
    out = []
    for i in (1, 2):
        lap = (Polynomial.var(JET2, u2_name(i, 1, 1))
               + Polynomial.var(JET2, u2_name(i, 2, 2)))
        out.append(dc.c1sq * lap)
    return tuple(out)


#: Curl-free jet constraints: d2 u^1 = d1 u^2 propagated to second order.
CURL_FREE_BINDINGS = {
    "G12": Polynomial.var(JET2, "G21"),
    "u1_12": Polynomial.var(JET2, "u2_11"),
    "u1_22": Polynomial.var(JET2, "u2_12"),
}


def curl_free_substitute(p: Polynomial) -> Polynomial:
    """Impose the curl-free constraints on a second-order jet polynomial."""
    if p.space != JET2:
        p = embed(p, JET2)
    return p.substitute(CURL_FREE_BINDINGS, target=JET2)


# ---------------------------------------------------------------------------
# B tensors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BTensors:
    """Constant tensors reproducing N2 and N3 as contractions.

    ``b6[(i,l,j,m,k,n)] = 1/2 * d^3 l3 / dG_il dG_jm dG_kn`` and
    ``b8[(i,l,j,m,k,n,p,q)] = 1/6 * d^4 l4 / dG_il dG_jm dG_kn dG_pq``.
    """

    b6: dict[tuple[int, ...], Fraction]
    b8: dict[tuple[int, ...], Fraction]


def _derivative_table(p: Polynomial, order: int) -> dict[tuple[str, ...], Fraction]:
    """All iterated G-derivatives of a fixed order, keyed by sorted name tuples."""
    names = [g_name(i, l) for i in (1, 2) for l in (1, 2)]
    table: dict[tuple[str, ...], Polynomial] = {(): p}
    for _ in range(order):
        nxt: dict[tuple[str, ...], Polynomial] = {}
        for key, poly in table.items():
            for name in names:
                newkey = tuple(sorted(key + (name,)))
                if newkey not in nxt:
                    nxt[newkey] = poly.diff(name)
        table = nxt
    return {key: poly.constant_value() for key, poly in table.items()}


def b_tensors(E: EnergyExpansion) -> BTensors:
    d3_table = _derivative_table(E.l3, 3)
    d4_table = _derivative_table(E.l4, 4)
    b6: dict[tuple[int, ...], Fraction] = {}
    for i, l, j, m, k, n in itertools.product((1, 2), repeat=6):
        key = tuple(sorted((g_name(i, l), g_name(j, m), g_name(k, n))))
        b6[(i, l, j, m, k, n)] = Fraction(1, 2) * d3_table[key]
    b8: dict[tuple[int, ...], Fraction] = {}
    for idx in itertools.product((1, 2), repeat=8):
        i, l, j, m, k, n, p, q = idx
        key = tuple(sorted((g_name(i, l), g_name(j, m), g_name(k, n), g_name(p, q))))
        b8[idx] = Fraction(1, 6) * d4_table[key]
    return BTensors(b6=b6, b8=b8)


def b6_symmetry_holds(B: BTensors) -> bool:
    """B^{ijk}_{lmn} = B^{jik}_{mln} = B^{kji}_{nml} for all index tuples."""
    for i, l, j, m, k, n in itertools.product((1, 2), repeat=6):
        v = B.b6[(i, l, j, m, k, n)]
        if v != B.b6[(j, m, i, l, k, n)] or v != B.b6[(k, n, j, m, i, l)]:
            return False
    return True


def b8_symmetry_holds(B: BTensors) -> bool:
    for idx in itertools.product((1, 2), repeat=8):
        i, l, j, m, k, n, p, q = idx
        v = B.b8[idx]
        if (v != B.b8[(j, m, i, l, k, n, p, q)]
                or v != B.b8[(k, n, j, m, i, l, p, q)]
                or v != B.b8[(p, q, j, m, k, n, i, l)]):
            return False
    return True


def n2_from_b6(B: BTensors) -> tuple[Polynomial, Polynomial]:
    """Reconstruct N2^i = B^{ijk}_{lmn} d_l (d_m u^j d_n u^k)."""
    out = []
    for i in (1, 2):
        acc = Polynomial.zero(JET2)
        for l, j, m, k, n in itertools.product((1, 2), repeat=5):
            coeff = B.b6[(i, l, j, m, k, n)]
            if coeff:
                prod = (Polynomial.var(JET2, g_name(j, m))
                        * Polynomial.var(JET2, g_name(k, n)))
                acc = acc + coeff * total_derivative(prod, l)
        out.append(acc)
    return tuple(out)


def n3_from_b8(B: BTensors) -> tuple[Polynomial, Polynomial]:
    """Reconstruct N3^i = B^{ijkp}_{lmnq} d_l (d_m u^j d_n u^k d_q u^p)."""
    out = []
    for i in (1, 2):
        acc = Polynomial.zero(JET2)
        for l, j, m, k, n, p, q in itertools.product((1, 2), repeat=7):
            coeff = B.b8[(i, l, j, m, k, n, p, q)]
            if coeff:
                prod = (Polynomial.var(JET2, g_name(j, m))
                        * Polynomial.var(JET2, g_name(k, n))
                        * Polynomial.var(JET2, g_name(p, q)))
                acc = acc + coeff * total_derivative(prod, l)
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# identity battery and the printed-formula audit
# ---------------------------------------------------------------------------

def _trace_exprs() -> dict[str, Polynomial]:
    G = generic_gradient()
    GGt = G @ G.T
    return {
        "trG": G.trace(),
        "trG2": (G @ G).trace(),
        "trGGt": GGt.trace(),
        "trG2Gt": (G @ G @ G.T).trace(),
        "trGGt_sq": (GGt @ GGt).trace(),
    }


def identity_battery() -> list[tuple[str, bool]]:
    """Exact polynomial identities relating traces of G to D, R, Q.

    Material-independent; every entry must hold for the derivation to be
    trusted.  Returns (name, holds) pairs.
    """
    t = _trace_exprs()
    D, R, Q = div_poly(), rot_poly(), q12_poly()
    G = generic_gradient()
    C = strain_tensor(G)
    k1, k2 = principal_invariants(C)
    checks = [
        ("k1 = 2 trG + trGG^T", k1 == 2 * t["trG"] + t["trGGt"]),
        ("k2 full expansion",
         k2 == 2 * t["trG"] ** 2 - (t["trG2"] + t["trGGt"])
         + 2 * (t["trG"] * t["trGGt"] - t["trG2Gt"])
         + Fraction(1, 2) * (t["trGGt"] ** 2 - t["trGGt_sq"])),
        ("trG = D", t["trG"] == D),
        ("trG^2 = D^2 - 2Q", t["trG2"] == D * D - 2 * Q),
        ("trGG^T = D^2 + R^2 - 2Q", t["trGGt"] == D * D + R * R - 2 * Q),
        ("trG trGG^T - trG^2G^T = D Q",
         t["trG"] * t["trGGt"] - t["trG2Gt"] == D * Q),
        ("(trGG^T)^2 - tr(GG^T)^2 = 2Q^2",
         t["trGGt"] ** 2 - t["trGGt_sq"] == 2 * Q * Q),
        ("(trGG^T)^2 expansion",
         t["trGGt"] ** 2 == D ** 4 + R ** 4 + 4 * Q * Q + 2 * D * D * R * R
         - 4 * D * D * Q - 4 * R * R * Q),
        ("(trG)^2 trGG^T expansion",
         t["trG"] ** 2 * t["trGGt"] == D ** 4 + D * D * R * R - 2 * D * D * Q),
        ("trG (trG trGG^T - trG^2G^T) = D^2 Q",
         t["trG"] * (t["trG"] * t["trGGt"] - t["trG2Gt"]) == D * D * Q),
        ("trG^2 trGG^T expansion",
         t["trG2"] * t["trGGt"] == D ** 4 + 4 * Q * Q + D * D * R * R
         - 4 * D * D * Q - 2 * R * R * Q),
        ("(trG)^2 trG^2 expansion",
         t["trG"] ** 2 * t["trG2"] == D ** 4 - 2 * D * D * Q),
        ("(trG^2)^2 expansion",
         t["trG2"] ** 2 == D ** 4 + 4 * Q * Q - 4 * D * D * Q),
    ]
    return checks


def isotropy_residuals(E: EnergyExpansion) -> list[Polynomial]:
    """Residuals of l_i under G -> R(theta) G R(theta)^T, reduced on the circle.

    All three must vanish for any material built through sigma(k1, k2).
    """
    space = JET1.extended(("c", "s"))
    c = Polynomial.var(space, "c")
    s = Polynomial.var(space, "s")
    R = Matrix2Poly(c, -1 * s, s, c)
    G = Matrix2Poly(*(Polynomial.var(space, g_name(i, l))
                      for i in (1, 2) for l in (1, 2)))
    rotated = R @ G @ R.T
    bindings = {g_name(i, l): rotated.entry(i, l) for i in (1, 2) for l in (1, 2)}
    out = []
    for li in (E.l2, E.l3, E.l4):
        image = embed(li, space).substitute(bindings, target=space)
        out.append((image - embed(li, space)).reduce_circle())
    return out


def printed_l4(M: MaterialModel, quartic_sign: int = 1) -> Polynomial:
    """The printed l4 display; ``quartic_sign`` picks (trG^2 +/- trGG^T)^2."""
    t = _trace_exprs()
    s2, s11, s12 = M.sigma2, M.sigma11, M.sigma12
    s111, s112, s1111, s22 = M.sigma111, M.sigma112, M.sigma1111, M.sigma22
    last = (t["trG2"] + quartic_sign * t["trGGt"]) ** 2
    return (Fraction(1, 2) * s11 * t["trGGt"] ** 2
            + Fraction(1, 2) * s2 * (t["trGGt"] ** 2 - t["trGGt_sq"])
            + 2 * (s111 + s12) * t["trG"] ** 2 * t["trGGt"]
            + 4 * s12 * t["trG"] * (t["trG"] * t["trGGt"] - t["trG2Gt"])
            - s12 * t["trGGt"] * (t["trGGt"] + t["trG2"])
            + (Fraction(2, 3) * s1111 + 4 * s112 + 2 * s22) * t["trG"] ** 4
            - 2 * (s112 + s22) * t["trG"] ** 2 * (t["trG2"] + t["trGGt"])
            + Fraction(1, 2) * s22 * last)


def printed_l2(M: MaterialModel) -> Polynomial:
    t = _trace_exprs()
    return (2 * (M.sigma11 + M.sigma2) * t["trG"] ** 2
            - M.sigma2 * (t["trG2"] + t["trGGt"]))


def printed_l3(M: MaterialModel) -> Polynomial:
    t = _trace_exprs()
    return (2 * (M.sigma11 - M.sigma12) * t["trG"] * t["trGGt"]
            + 2 * M.sigma2 * (t["trG"] * t["trGGt"] - t["trG2Gt"])
            + (Fraction(4, 3) * M.sigma111 + 4 * M.sigma12) * t["trG"] ** 3
            - 2 * M.sigma12 * t["trG"] * t["trG2"])


#: Field-form monomials allowed for an isotropic material.
_EXPECTED_L3 = {(3, 0, 0), (1, 2, 0), (1, 0, 1)}
_EXPECTED_L4 = {(4, 0, 0), (0, 4, 0), (2, 2, 0), (0, 0, 2), (2, 0, 1), (0, 2, 1)}


def audit_printed_formulas(M: MaterialModel) -> dict:
    """Compare the first-principles expansion against every printed closed form.

    The expansion is authoritative; the report records agreement (or not) of
    the printed l2/l3/l4 displays (both signs of the marked quartic term) and
    of the d- and e-coefficient lists, plus any unexpected field-form
    monomials.
    """
    E = energy_expansion(M)
    ff = field_form(E)
    dc = derived_coefficients(M, ff)
    pc = printed_coefficients(M)
    coeff_match = {k: dc.as_dict()[k] == pc.as_dict()[k] for k in dc.as_dict()}
    extra_l3 = [mono for mono in ff.l3.terms if mono not in _EXPECTED_L3]
    extra_l4 = [mono for mono in ff.l4.terms if mono not in _EXPECTED_L4]
    return {
        "l2_printed_matches": printed_l2(M) == E.l2,
        "l3_printed_matches": printed_l3(M) == E.l3,
        "l4_printed_plus_matches": printed_l4(M, +1) == E.l4,
        "l4_printed_minus_matches": printed_l4(M, -1) == E.l4,
        "coefficients_match": coeff_match,
        "derived": {k: str(v) for k, v in dc.as_dict().items()},
        "printed": {k: str(v) for k, v in pc.as_dict().items()},
        "unexpected_l3_monomials": extra_l3,
        "unexpected_l4_monomials": extra_l4,
    }
