import math

import numpy as np
import pytest

from hillgreen import (
    dirichlet_zero_count,
    discriminant_samples,
    find_eigenvalues,
    first_eigenvalue_relations,
    fundamental_solutions,
    kernel_value,
    load_builtin,
    neumann_extension_residual,
    stability_intervals,
    verify_interlacing,
    verify_spectral_decomposition,
)
from hillgreen.errors import DomainError

PI = math.pi

# digits published for the two worked step/cosine examples
EX2_FIRSTS = {"N": -0.0508, "M2": 0.5346, "M1": 0.5984, "D": 2.4170}
EX3_FIRSTS = {"N": -0.378, "M1": -0.348, "M2": 0.5948, "D": 0.918}
EX4_SETS = {
    "N": [-0.1218, 0.47065, 4.1009],
    "D": [1.4668, 3.9792],
    "M1": [0.0923, 2.34076],
    "M2": [0.0923, 2.34076],
}


def analytic_zero_spectrum(bc, count):
    """Eigenvalues of u'' + lam u = 0 on [0,1], from the characteristic zeros."""
    if bc == "N":
        return [(k * PI) ** 2 for k in range(count)]
    if bc == "D":
        return [(k * PI) ** 2 for k in range(1, count + 1)]
    if bc in ("M1", "M2"):
        return [((2 * k + 1) * PI / 2) ** 2 for k in range(count)]
    raise ValueError(bc)


@pytest.mark.parametrize("bc", ["N", "D", "M1", "M2"])
def test_zero_potential_separated_spectra(zero1, bc):
    spec = find_eigenvalues(zero1, bc, max_count=4)
    want = analytic_zero_spectrum(bc, 4)
    assert np.allclose(spec.values(), want, atol=1e-8)
    assert all(e.multiplicity == 1 for e in spec.eigenvalues)


def test_zero_potential_coupled_spectra(zero1):
    # on [0,1]: periodic eigenvalues 0, (2 pi k)^2 doubled;
    # antiperiodic ((2k+1) pi)^2 doubled
    specP = find_eigenvalues(zero1, "P", max_count=4, search_range=(-1.0, 90.0))
    vals = specP.expanded()
    want = [0.0, (2 * PI) ** 2, (2 * PI) ** 2]
    assert np.allclose(vals[:3], want, atol=1e-6)
    assert specP.eigenvalues[1].multiplicity == 2

    specA = find_eigenvalues(zero1, "A", max_count=4, search_range=(-1.0, 120.0))
    valsA = specA.expanded()
    wantA = [PI ** 2, PI ** 2, (3 * PI) ** 2, (3 * PI) ** 2]
    assert np.allclose(valsA[:4], wantA, atol=1e-5)


def test_spectrum_audit_records_method(zero1):
    spec = find_eigenvalues(zero1.even_extension(), "P", max_count=2)
    assert spec.audit.get("method") in ("union", "direct")


def test_ex2_first_eigenvalues(pw2):
    for bc, want in EX2_FIRSTS.items():
        spec = find_eigenvalues(pw2, bc, max_count=1)
        assert spec.first() == pytest.approx(want, abs=2e-3)


def test_ex3_first_eigenvalues(cos_pi):
    for bc, want in EX3_FIRSTS.items():
        spec = find_eigenvalues(cos_pi, bc, max_count=1)
        assert spec.first() == pytest.approx(want, abs=2e-3)


def test_ex4_spectra(cos2_pi):
    for bc, want in EX4_SETS.items():
        spec = find_eigenvalues(cos2_pi, bc, max_count=len(want))
        got = spec.values()
        assert len(got) == len(want)
        assert np.allclose(got, want, atol=2e-3)


def test_ex4_coupled_doubles(cos2_pi):
    # the half-period cosine has double antiperiodic eigenvalues on [0, 2T];
    # max_count counts multiplicity, so two doubles need four slots
    even = cos2_pi.even_extension()
    spec = find_eigenvalues(even, "A", max_count=4, method="direct")
    assert spec.eigenvalues[0].multiplicity == 2
    assert spec.eigenvalues[0].value == pytest.approx(0.0923, abs=2e-3)
    assert spec.eigenvalues[1].multiplicity == 2
    assert spec.eigenvalues[1].value == pytest.approx(2.34076, abs=2e-3)


def test_union_and_direct_agree(cos_pi):
    even = cos_pi.even_extension()
    a = find_eigenvalues(even, "P", max_count=5, method="union")
    b = find_eigenvalues(even, "P", max_count=5, method="direct")
    assert np.allclose(a.expanded()[:5], b.expanded()[:5], atol=1e-6)


def test_union_requires_symmetry(cos_pi):
    with pytest.raises(ValueError):
        find_eigenvalues(cos_pi, "P", max_count=2, method="union")


@pytest.mark.parametrize("name", ["zero1", "pw2", "cos_pi", "cos2_pi"])
def test_spectral_decomposition(request, name):
    p = request.getfixturevalue(name)
    rep = verify_spectral_decomposition(p, count=6)
    assert rep["pass"], rep
    names = [e["name"] for e in rep["equalities"]]
    assert len(names) == 3
    for e in rep["equalities"]:
        assert e["max_diff"] <= rep["pair_tol"]
        assert not e["unmatched_lhs"] and not e["unmatched_rhs"]


@pytest.mark.parametrize("name", ["zero1", "pw2", "cos_pi", "cos2_pi"])
def test_first_eigenvalue_relations(request, name):
    p = request.getfixturevalue(name)
    rep = first_eigenvalue_relations(p)
    assert rep["pass"], [(i["item"], i["pass"]) for i in rep["items"]]


def test_relations_values_zero_potential(zero1):
    rep = first_eigenvalue_relations(zero1)
    v = rep["values"]
    assert v["lambda_N"] == pytest.approx(0.0, abs=1e-9)
    assert v["lambda_D"] == pytest.approx(PI ** 2, abs=1e-8)
    assert v["lambda_M1"] == pytest.approx((PI / 2) ** 2, abs=1e-9)
    assert v["lambda_M2"] == pytest.approx((PI / 2) ** 2, abs=1e-9)
    assert v["lambda_P_2T"] == pytest.approx(0.0, abs=1e-9)
    assert v["lambda_A_2T"] == pytest.approx((PI / 2) ** 2, abs=1e-9)


def test_corner_values_match_mixed_spectra(cos_pi):
    # the Neumann kernel corners are -y2'(T)/y1'(T) at (0,0) and
    # -y1(T)/y1'(T) at (T,T); they vanish exactly on the two mixed spectra
    L = cos_pi.domain_length
    lamM2 = find_eigenvalues(cos_pi, "M2", max_count=1).first()
    lamM1 = find_eigenvalues(cos_pi, "M1", max_count=1).first()

    basis = fundamental_solutions(cos_pi, lamM2, tol=1e-12)
    assert -basis.y2p_end / basis.y1p_end == pytest.approx(0.0, abs=1e-7)
    assert kernel_value(cos_pi, lamM2, "N", 0.0, 0.0) == pytest.approx(0.0, abs=1e-7)

    basis = fundamental_solutions(cos_pi, lamM1, tol=1e-12)
    assert -basis.y1_end / basis.y1p_end == pytest.approx(0.0, abs=1e-7)
    assert kernel_value(cos_pi, lamM1, "N", L, L) == pytest.approx(0.0, abs=1e-7)

    # cross-corner values stay away from zero (the two spectra differ here)
    assert abs(kernel_value(cos_pi, lamM1, "N", 0.0, 0.0)) > 1e-2
    assert abs(kernel_value(cos_pi, lamM2, "N", L, L)) > 1e-2


@pytest.mark.parametrize("name", ["zero1", "pw2", "cos_pi", "cos2_pi"])
def test_interlacing(request, name):
    p = request.getfixturevalue(name)
    rep = verify_interlacing(p, count=3)
    assert rep["pass"], rep
    assert rep["chains"]["oscillation"]["pass"]
    assert rep["pair_parity_pass"]


def test_interlacing_observations(zero1, cos_pi):
    # for a symmetric potential the two mixed spectra coincide
    rep = verify_interlacing(zero1, count=3)
    assert rep["observations"]["mixed_spectra_coincide"] is True
    rep2 = verify_interlacing(cos_pi, count=3)
    assert rep2["observations"]["mixed_spectra_coincide"] is False


def test_stability_intervals_zero_potential(zero1):
    # a == 0 has no open instability gaps: bands touch at ((k pi)/2)^2 * ...
    # on [0,1] the discriminant is 2 cos(sqrt(lam)), giving band edges at
    # lam = (k pi)^2 with zero-width gaps
    bands = stability_intervals(zero1, search_range=(-1.0, 45.0))
    kinds = [k for _, k in bands]
    assert "stable" in kinds
    open_gaps = [iv for iv, k in bands if k == "unstable" and iv[1] - iv[0] > 1e-6 and iv[0] > -0.5]
    assert not open_gaps


def test_stability_intervals_ex4(cos2_pi):
    bands = stability_intervals(cos2_pi, search_range=(-1.0, 5.0))
    gaps = [iv for iv, k in bands if k == "unstable" and iv[0] > -0.5]
    wide = [iv for iv in gaps if iv[1] - iv[0] > 1e-4]
    assert len(wide) == 2
    assert wide[0][0] == pytest.approx(0.47065, abs=2e-3)
    assert wide[0][1] == pytest.approx(1.4668, abs=2e-3)
    assert wide[1][0] == pytest.approx(3.9792, abs=2e-3)
    assert wide[1][1] == pytest.approx(4.1009, abs=2e-3)


def test_dirichlet_zero_count(zero1):
    # number of zeros of y2 in (0, 1] for a == 0 is floor(sqrt(lam)/pi)
    assert dirichlet_zero_count(zero1, 0.5) == 0
    assert dirichlet_zero_count(zero1, (1.5 * PI) ** 2) == 1
    assert dirichlet_zero_count(zero1, (2.5 * PI) ** 2) == 2


def test_neumann_extension_residual(pw2):
    # |y1'(2T)| = |2 y1(T) y1'(T)| for the even extension vanishes exactly
    # on the base Neumann spectrum and the base u'(0)=u(T)=0 spectrum
    lamN = find_eigenvalues(pw2, "N", max_count=1).first()
    lamM1 = find_eigenvalues(pw2, "M1", max_count=1).first()
    assert neumann_extension_residual(pw2, lamN) < 1e-8
    assert neumann_extension_residual(pw2, lamM1) < 1e-8
    assert neumann_extension_residual(pw2, 0.7) > 1e-3


def test_discriminant_samples_shape(cos_pi):
    lams, deltas = discriminant_samples(cos_pi, -1.0, 4.0, count=50)
    assert lams.shape == deltas.shape == (50,)
    assert lams[0] == -1.0 and lams[-1] == 4.0
    # extend=True evaluates on the even extension over [0, 2T]
    want = []
    even = cos_pi.even_extension()
    for lam in lams[:5]:
        b = fundamental_solutions(even, float(lam), tol=1e-10)
        want.append(b.discriminant)
    assert np.allclose(deltas[:5], want, atol=1e-6)


def test_search_range_respected(zero1):
    spec = find_eigenvalues(zero1, "D", search_range=(5.0, 45.0))
    vals = spec.values()
    assert all(5.0 <= v <= 45.0 for v in vals)
    assert vals[0] == pytest.approx(PI ** 2, abs=1e-8)


def test_eigenvalue_indices_consecutive(cos2_pi):
    spec = find_eigenvalues(cos2_pi, "D", max_count=3)
    assert [e.index for e in spec.eigenvalues] == [0, 1, 2]
