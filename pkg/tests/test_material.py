"""Tests for the symbolic energy expansion and Euler-Lagrange derivation."""

from fractions import Fraction

import pytest

from elastic2d.material import (DRQ, FieldFormError, Matrix2Poly, MaterialModel,
                                audit_printed_formulas, b6_symmetry_holds,
                                b8_symmetry_holds, b_tensors,
                                curl_free_substitute, derived_coefficients,
                                div_poly, embed, energy_expansion,
                                euler_lagrange, field_form, generic_gradient,
                                identity_battery, isotropy_residuals,
                                linear_display, n2_display, n2_from_b6,
                                n3_display, n3_from_b8, principal_invariants,
                                printed_coefficients, q12_poly, rot_poly,
                                strain_tensor, total_derivative)
from elastic2d.poly import JET1, JET2, Polynomial, VariableSpace

# A material with every Taylor coefficient distinct and generic.
GENERIC = MaterialModel.of(
    sigma2=Fraction(-3, 2), sigma11=2, sigma12=Fraction(5, 7),
    sigma111=Fraction(-11, 3), sigma112=Fraction(13, 5),
    sigma1111=Fraction(17, 2), sigma22=Fraction(-19, 11))


def poly_const(space, v):
    return Polynomial.const(space, v)


# ---------------------------------------------------------------------------
# strain tensor and invariants
# ---------------------------------------------------------------------------

def test_strain_of_zero_gradient():
    space = VariableSpace.make(("g",))
    zero = Polynomial.zero(space)
    C = strain_tensor(Matrix2Poly(zero, zero, zero, zero))
    assert all(p.is_zero() for p in (C.a11, C.a12, C.a21, C.a22))


def test_strain_single_entry():
    space = VariableSpace.make(("g",))
    g = Polynomial.var(space, "g")
    zero = Polynomial.zero(space)
    C = strain_tensor(Matrix2Poly(g, zero, zero, zero))
    assert C.a11 == 2 * g + g * g
    assert C.a12.is_zero() and C.a21.is_zero() and C.a22.is_zero()


def test_strain_rotationlike_gradient():
    space = VariableSpace.make(("w",))
    w = Polynomial.var(space, "w")
    zero = Polynomial.zero(space)
    C = strain_tensor(Matrix2Poly(zero, w, -1 * w, zero))
    assert C.a11 == w * w and C.a22 == w * w
    assert C.a12.is_zero() and C.a21.is_zero()


def test_invariants_identity_and_diagonal():
    space = VariableSpace.make(("a", "b"))
    one = poly_const(space, 1)
    zero = Polynomial.zero(space)
    k1, k2 = principal_invariants(Matrix2Poly(one, zero, zero, one))
    assert k1 == poly_const(space, 2) and k2 == one
    a, b = Polynomial.var(space, "a"), Polynomial.var(space, "b")
    k1, k2 = principal_invariants(Matrix2Poly(a, zero, zero, b))
    assert k1 == a + b and k2 == a * b


def test_k1_of_generic_strain():
    G = generic_gradient()
    k1, _ = principal_invariants(strain_tensor(G))
    sq = sum((Polynomial.var(JET1, n) ** 2 for n in JET1.names),
             Polynomial.zero(JET1))
    assert k1 == 2 * div_poly() + sq


# ---------------------------------------------------------------------------
# energy expansion
# ---------------------------------------------------------------------------

def test_energy_one_term_material():
    M = MaterialModel.of(sigma2=0, sigma11=1)
    E = energy_expansion(M)
    G = generic_gradient()
    trG = G.trace()
    trGGt = (G @ G.T).trace()
    assert E.l2 == 2 * trG ** 2
    assert E.l3 == 2 * trG * trGGt
    assert E.l4 == Fraction(1, 2) * trGGt ** 2


def test_energy_l2_printed_form():
    E = energy_expansion(GENERIC)
    G = generic_gradient()
    trG, trG2 = G.trace(), (G @ G).trace()
    trGGt = (G @ G.T).trace()
    expected = (2 * (GENERIC.sigma11 + GENERIC.sigma2) * trG ** 2
                - GENERIC.sigma2 * (trG2 + trGGt))
    assert E.l2 == expected


def test_energy_parts_homogeneous():
    E = energy_expansion(GENERIC)
    for i, li in ((2, E.l2), (3, E.l3), (4, E.l4)):
        assert li.homogeneous_part(i) == li


def test_l2_positive_on_pressure_and_shear_directions():
    E = energy_expansion(MaterialModel.of(sigma2=Fraction(-1, 2), sigma11=1))
    # rank-one gradients x * pol (x) omega with pol parallel / orthogonal to omega
    for pol, omega in (((Fraction(3, 5), Fraction(4, 5)),) * 2,
                       ((Fraction(-4, 5), Fraction(3, 5)), (Fraction(3, 5), Fraction(4, 5)))):
        vals = {f"G{i}{l}": pol[i - 1] * omega[l - 1]
                for i in (1, 2) for l in (1, 2)}
        assert E.l2.evaluate(vals) > 0


# ---------------------------------------------------------------------------
# field form
# ---------------------------------------------------------------------------

def test_field_form_l2():
    M = GENERIC
    ff = field_form(energy_expansion(M))
    D = Polynomial.var(DRQ, "D")
    R = Polynomial.var(DRQ, "R")
    Q = Polynomial.var(DRQ, "Q")
    # (2 s11 + s2) D^2 - s2 (D^2 + R^2 - 2Q) + 2 s2 Q, simplified over {D,R,Q}
    expected = ((2 * M.sigma11 + M.sigma2) * D * D
                - M.sigma2 * (D * D + R * R - 2 * Q) + 2 * M.sigma2 * Q)
    assert ff.l2 == expected


def test_field_form_l3_monomials():
    ff = field_form(energy_expansion(GENERIC))
    dc = derived_coefficients(GENERIC, ff)
    D = Polynomial.var(DRQ, "D")
    R = Polynomial.var(DRQ, "R")
    Q = Polynomial.var(DRQ, "Q")
    assert ff.l3 == dc.d1 * D ** 3 + dc.d2 * D * R * R + dc.d3 * D * Q


def test_field_form_zero():
    zero = Polynomial.zero(JET1)
    from elastic2d.material import EnergyExpansion
    ff = field_form(EnergyExpansion(zero, zero, zero))
    assert ff.l2.is_zero() and ff.l3.is_zero() and ff.l4.is_zero()


def test_field_form_round_trip():
    E = energy_expansion(GENERIC)
    back = field_form(E).expand()
    assert back.l2 == E.l2 and back.l3 == E.l3 and back.l4 == E.l4


def test_field_form_rejects_non_isotropic():
    from elastic2d.material import EnergyExpansion
    g11sq = Polynomial.monomial(JET1, {"G11": 2})
    zero = Polynomial.zero(JET1)
    with pytest.raises(FieldFormError):
        field_form(EnergyExpansion(g11sq, zero, zero))


# ---------------------------------------------------------------------------
# derived coefficients
# ---------------------------------------------------------------------------

def test_first_null_material_d1_zero():
    M = MaterialModel.of(sigma2=-1, sigma11=1, sigma111=Fraction(-3, 2))
    dc = derived_coefficients(M)
    assert dc.d1 == 0


def test_baseline_material_coefficients():
    M = MaterialModel.of(sigma2=-1, sigma11=1)
    dc = derived_coefficients(M)
    assert dc.c1sq == 4 and dc.c2sq == 2 and dc.d1 == 2


def test_all_zero_material_all_zero_coefficients():
    M = MaterialModel.of(sigma2=0, sigma11=0)
    dc = derived_coefficients(M)
    assert all(v == 0 for v in dc.as_dict().values())


def test_printed_coefficients_formula_level():
    # d/e are linear in the sigmas, so agreement on the 7 basis materials
    # (plus one generic point) proves formula-level equality.
    for name in ("sigma2", "sigma11", "sigma12", "sigma111",
                 "sigma112", "sigma1111", "sigma22"):
        M = MaterialModel.of(**{name: 1})
        assert derived_coefficients(M).as_dict() == printed_coefficients(M).as_dict()
    assert derived_coefficients(GENERIC).as_dict() == printed_coefficients(GENERIC).as_dict()


# ---------------------------------------------------------------------------
# Euler-Lagrange system
# ---------------------------------------------------------------------------

def test_quadratic_lagrangian_gives_linear_equation():
    # dropping l3, l4 leaves exactly the displayed linear operator
    M = MaterialModel.of(sigma2=-1, sigma11=1)
    E = energy_expansion(M)
    L2 = embed(E.l2, JET2)
    from elastic2d.poly import g_name
    comp = []
    for i in (1, 2):
        flux = [L2.diff(g_name(i, l)) for l in (1, 2)]
        comp.append(total_derivative(flux[0], 1) + total_derivative(flux[1], 2))
    expected = linear_display(derived_coefficients(M))
    assert comp[0] == expected[0] and comp[1] == expected[1]


def test_linear_part_matches_display():
    rhs = euler_lagrange(GENERIC)
    expected = linear_display(derived_coefficients(GENERIC))
    assert rhs.linear == expected


def test_n2_matches_display():
    rhs = euler_lagrange(GENERIC)
    assert rhs.n2 == n2_display(derived_coefficients(GENERIC))


def test_n3_matches_display():
    rhs = euler_lagrange(GENERIC)
    assert rhs.n3 == n3_display(derived_coefficients(GENERIC))


def test_parts_sum_to_components():
    rhs = euler_lagrange(GENERIC)
    for i in (0, 1):
        assert rhs.linear[i] + rhs.n2[i] + rhs.n3[i] == rhs.components[i]


def test_divergence_structure_per_degree():
    # each graded part is the divergence of the matching flux part
    rhs = euler_lagrange(GENERIC)
    for i in (0, 1):
        for deg, part in ((1, rhs.linear[i]), (2, rhs.n2[i]), (3, rhs.n3[i])):
            fl = [rhs.fluxes[i][l].homogeneous_part(deg) for l in (0, 1)]
            assert part == total_derivative(fl[0], 1) + total_derivative(fl[1], 2)


# ---------------------------------------------------------------------------
# B tensors
# ---------------------------------------------------------------------------

def test_zero_l3_gives_zero_b6():
    M = MaterialModel.of(sigma2=0, sigma11=0, sigma22=1)
    E = energy_expansion(M)
    assert E.l3.is_zero()
    B = b_tensors(E)
    assert all(v == 0 for v in B.b6.values())
    assert any(v != 0 for v in B.b8.values())


def test_b_tensor_symmetries():
    B = b_tensors(energy_expansion(GENERIC))
    assert b6_symmetry_holds(B)
    assert b8_symmetry_holds(B)


def test_b_tensor_contraction_reconstructs_nonlinearities():
    rhs = euler_lagrange(GENERIC)
    B = b_tensors(energy_expansion(GENERIC))
    assert n2_from_b6(B) == rhs.n2
    assert n3_from_b8(B) == rhs.n3


# ---------------------------------------------------------------------------
# identities, isotropy, audit
# ---------------------------------------------------------------------------

def test_identity_battery_all_hold():
    for name, ok in identity_battery():
        assert ok, f"identity failed: {name}"


def test_isotropy_of_energy_parts():
    for res in isotropy_residuals(energy_expansion(GENERIC)):
        assert res.is_zero()


def test_audit_printed_formulas_generic():
    audit = audit_printed_formulas(GENERIC)
    assert audit["l2_printed_matches"]
    assert audit["l3_printed_matches"]
    # the marked sign correction: the plus variant is the correct one
    assert audit["l4_printed_plus_matches"]
    assert not audit["l4_printed_minus_matches"]
    assert all(audit["coefficients_match"].values())
    assert audit["unexpected_l3_monomials"] == []
    assert audit["unexpected_l4_monomials"] == []


def test_material_validation():
    MaterialModel.of(sigma2=-1, sigma11=1).validate()
    with pytest.raises(ValueError):
        MaterialModel.of(sigma2=1, sigma11=1).validate()
    with pytest.raises(ValueError):
        MaterialModel.of(sigma2=-1, sigma11=Fraction(1, 4)).validate()  # c1 = c2
    with pytest.raises(ValueError):
        MaterialModel.of(sigma2=-1, sigma11=0).validate()


def test_curl_free_substitution_kills_rot():
    R = embed(rot_poly(), JET2)
    assert curl_free_substitute(R).is_zero()
    # second-order consequences
    dR1 = total_derivative(embed(rot_poly(), JET2), 1)
    dR2 = total_derivative(embed(rot_poly(), JET2), 2)
    assert curl_free_substitute(dR1).is_zero()
    assert curl_free_substitute(dR2).is_zero()
