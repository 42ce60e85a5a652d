"""Plane-wave classification and exact null-condition decision procedures.

The direction vector stays symbolic as (c, s) and every identity is decided
modulo the circle relation c^2 + s^2 = 1, so the "for all unit directions"
quantifier is exact rather than sampled.  Three independent procedures decide
the two null conditions:

1. restriction of the cubic / quartic energy to the pressure and shear
   plane-wave families;
2. the closed coefficient conditions (d1 = 0, respectively e1 = e2 = 0, in
   their sigma forms);
3. circle-reduced contractions of the six- and eight-index tensors.

They must agree on every material; `triple_flags` packages the comparison.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .material import (BTensors, DerivedCoefficients, MaterialModel,
                       b_tensors, derived_coefficients, energy_expansion)
from .poly import CIRCLE, Polynomial, g_name


@dataclass(frozen=True)
class PlaneWaveFamily:
    """One family of plane waves of the linearized system.

    ``polarization`` is a symbolic 2-vector over (c, s): the propagation
    direction itself for pressure waves, its rotation by 90 degrees for shear
    waves.  Profile symbols p (first derivative) and p2 (second derivative)
    are shared through the CIRCLE space.
    """

    kind: str  # "pressure" | "shear"
    speed_sq: Fraction
    polarization: tuple[Polynomial, Polynomial]


def _omega() -> tuple[Polynomial, Polynomial]:
    return Polynomial.var(CIRCLE, "c"), Polynomial.var(CIRCLE, "s")


def _omega_perp(sign: int = 1) -> tuple[Polynomial, Polynomial]:
    c, s = _omega()
    return (sign * s, -sign * c)


def plane_wave_ode_residuals(dc: DerivedCoefficients, fam: PlaneWaveFamily) -> tuple[Polynomial, Polynomial]:
    """Residual of (a^2 - c2^2) phi'' - (c1^2 - c2^2) omega (omega . phi'') = 0.

    With phi'' = polarization * p2; must reduce to zero on the circle.
    """
    omega = _omega()
    p2 = Polynomial.var(CIRCLE, "p2")
    dot = omega[0] * fam.polarization[0] + omega[1] * fam.polarization[1]
    out = []
    for i in (0, 1):
        res = ((fam.speed_sq - dc.c2sq) * fam.polarization[i] * p2
               - (dc.c1sq - dc.c2sq) * omega[i] * dot * p2)
        out.append(res.reduce_circle())
    return tuple(out)


def classify_plane_waves(M: MaterialModel) -> tuple[PlaneWaveFamily, PlaneWaveFamily]:
    """The pressure and shear families; each is checked against the plane-wave ODE."""
    M.validate()  # rejects degenerate speeds c1 = c2
    dc = derived_coefficients(M)
    pressure = PlaneWaveFamily("pressure", dc.c1sq, _omega())
    shear = PlaneWaveFamily("shear", dc.c2sq, _omega_perp())
    for fam in (pressure, shear):
        residuals = plane_wave_ode_residuals(dc, fam)
        if not all(r.is_zero() for r in residuals):
            raise RuntimeError(f"{fam.kind} family fails the plane-wave ODE")
    return pressure, shear


def restrict_to_plane_wave(expr: Polynomial, fam: PlaneWaveFamily) -> Polynomial:
    """Substitute the plane-wave jet values and reduce on the circle.

    First-order jets G_jm go to pol_j omega_m p; second-order jets u^j_{mn}
    go to pol_j omega_m omega_n p2.  The result lives over (c, s, p, p2).
    """
    omega = _omega()
    p = Polynomial.var(CIRCLE, "p")
    p2 = Polynomial.var(CIRCLE, "p2")
    bindings: dict[str, Polynomial] = {}
    for name in expr.space.names:
        if name.startswith("G"):
            j, m = int(name[1]), int(name[2])
            bindings[name] = fam.polarization[j - 1] * omega[m - 1] * p
        elif name.startswith("u"):
            j = int(name[1])
            m, n = int(name[3]), int(name[4])
            bindings[name] = fam.polarization[j - 1] * omega[m - 1] * omega[n - 1] * p2
        else:
            raise ValueError(f"unknown jet variable {name!r}")
    return expr.substitute(bindings, target=CIRCLE).reduce_circle()


# ---------------------------------------------------------------------------
# tensor contractions
# ---------------------------------------------------------------------------

def _contract(entries: dict[tuple[int, ...], Fraction],
              vectors: list[tuple[Polynomial, Polynomial]]) -> Polynomial:
    out = Polynomial.zero(CIRCLE)
    for idx, coeff in entries.items():
        if coeff:
            term = Polynomial.const(CIRCLE, coeff)
            for pos, component in enumerate(idx):
                term = term * vectors[pos][component - 1]
            out = out + term
    return out.reduce_circle()


def tensor_null_check(B: BTensors, perp_sign: int = 1) -> dict[str, Polynomial]:
    """The three contractions deciding d1 = 0, e1 = 0 and e2 = 0.

    Index layout of the stored tensors is (i, l, j, m, k, n[, p, q]); the
    upper (component) slots sit at even positions.  ``perp_sign`` flips the
    orthogonal direction, which must not change any zero/nonzero verdict.
    """
    omega = _omega()
    perp = _omega_perp(perp_sign)
    b6_full = _contract(B.b6, [omega] * 6)
    b8_full = _contract(B.b8, [omega] * 8)
    vectors = [perp if pos % 2 == 0 else omega for pos in range(8)]
    b8_perp = _contract(B.b8, vectors)
    return {
        "b6_omega6": b6_full,
        "b8_omega8": b8_full,
        "b8_perp4_omega4": b8_perp,
    }


# ---------------------------------------------------------------------------
# the null report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NullReport:
    first_null: bool
    second_null: bool
    restriction_flags: tuple[bool, bool]
    sigma_flags: tuple[bool, bool]
    tensor_flags: tuple[bool, bool]
    agreement: bool
    closed_forms_ok: bool
    residuals: dict[str, Polynomial]
    sigma_values: dict[str, Fraction]

    def to_json_obj(self) -> dict:
        return {
            "first_null": self.first_null,
            "second_null": self.second_null,
            "procedures": {
                "restriction": list(self.restriction_flags),
                "sigma_conditions": list(self.sigma_flags),
                "tensor_contractions": list(self.tensor_flags),
            },
            "agreement": self.agreement,
            "closed_forms_ok": self.closed_forms_ok,
            "residuals": {k: v.to_json_obj() for k, v in self.residuals.items()},
            "residuals_text": {k: v.to_text() for k, v in self.residuals.items()},
            "sigma_values": {k: str(v) for k, v in self.sigma_values.items()},
        }


def null_conditions(M: MaterialModel) -> NullReport:
    """Decide both null conditions by all three procedures and cross-check."""
    M.validate()
    E = energy_expansion(M)
    dc = derived_coefficients(M)
    pressure, shear = classify_plane_waves(M)

    residuals = {
        "l3_pressure": restrict_to_plane_wave(E.l3, pressure),
        "l3_shear": restrict_to_plane_wave(E.l3, shear),
        "l4_pressure": restrict_to_plane_wave(E.l4, pressure),
        "l4_shear": restrict_to_plane_wave(E.l4, shear),
    }
    p = Polynomial.var(CIRCLE, "p")
    closed_forms_ok = (
        residuals["l3_pressure"] == dc.d1 * p ** 3
        and residuals["l3_shear"].is_zero()
        and residuals["l4_pressure"] == dc.e1 * p ** 4
        and residuals["l4_shear"] == dc.e2 * p ** 4)

    restriction_flags = (
        residuals["l3_pressure"].is_zero() and residuals["l3_shear"].is_zero(),
        residuals["l4_pressure"].is_zero() and residuals["l4_shear"].is_zero())

    sigma_values = {
        "3*sigma11 + 2*sigma111": 3 * M.sigma11 + 2 * M.sigma111,
        "3*sigma11 + 12*sigma111 + 4*sigma1111":
            3 * M.sigma11 + 12 * M.sigma111 + 4 * M.sigma1111,
        "sigma11 - 2*sigma12 + sigma22": M.sigma11 - 2 * M.sigma12 + M.sigma22,
    }
    vals = list(sigma_values.values())
    sigma_flags = (vals[0] == 0, vals[1] == 0 and vals[2] == 0)

    contractions = tensor_null_check(b_tensors(E))
    contractions_alt = tensor_null_check(b_tensors(E), perp_sign=-1)
    residuals.update(contractions)
    residuals["b8_perp4_omega4_altsign"] = contractions_alt["b8_perp4_omega4"]
    tensor_flags = (
        contractions["b6_omega6"].is_zero(),
        contractions["b8_omega8"].is_zero()
        and contractions["b8_perp4_omega4"].is_zero()
        and contractions_alt["b8_perp4_omega4"].is_zero())

    agreement = (restriction_flags == sigma_flags == tensor_flags)
    return NullReport(
        first_null=restriction_flags[0],
        second_null=restriction_flags[1],
        restriction_flags=restriction_flags,
        sigma_flags=sigma_flags,
        tensor_flags=tensor_flags,
        agreement=agreement,
        closed_forms_ok=closed_forms_ok,
        residuals=residuals,
        sigma_values=sigma_values)


# ---------------------------------------------------------------------------
# random material sampling (seeded; used by the verification batteries)
# ---------------------------------------------------------------------------

def sample_material(rng: random.Random) -> MaterialModel:
    """A random valid rational material; every fourth sample is forced onto
    the first (and every eighth onto both) null manifolds so the zero branches
    of the decision procedures get exercised."""
    def rat(lo: int = -5, hi: int = 5) -> Fraction:
        return Fraction(rng.randint(lo * 6, hi * 6), rng.randint(1, 6))

    sigma11 = Fraction(rng.randint(1, 30), rng.randint(1, 6))
    # keep c2^2 = -2 sigma2 strictly between 0 and c1^2 = 4 sigma11
    sigma2 = -2 * sigma11 * Fraction(rng.randint(1, 9), 10)
    kwargs = dict(sigma2=sigma2, sigma11=sigma11, sigma12=rat(),
                  sigma111=rat(), sigma112=rat(), sigma1111=rat(),
                  sigma22=rat())
    mode = rng.randrange(4)
    if mode >= 2:  # force d1 = 0
        kwargs["sigma111"] = Fraction(-3, 2) * sigma11
    if mode == 3:  # additionally force e1 = e2 = 0
        kwargs["sigma1111"] = Fraction(-1, 4) * (3 * sigma11 + 12 * kwargs["sigma111"])
        kwargs["sigma22"] = 2 * kwargs["sigma12"] - sigma11
    return MaterialModel(**kwargs)


def triple_flags(M: MaterialModel) -> dict:
    """Flags of the three procedures for one material, plus their agreement."""
    report = null_conditions(M)
    return {
        "restriction": report.restriction_flags,
        "sigma": report.sigma_flags,
        "tensor": report.tensor_flags,
        "agreement": report.agreement,
        "l3_shear_zero": report.residuals["l3_shear"].is_zero(),
    }
