import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import non_nilpotent_structures, rotated_structures
from hermitian_btp import catalog, classifier
from hermitian_btp.classifier import (
    CASE1,
    CASE2,
    CASE3,
    FLAG_NAMES,
    NOT_APPLICABLE,
    admissible_frame,
    bismut_abelian_certificate,
    chi_holomorphic_residual,
    classify,
    corollary_sweep,
    has_degenerate_torsion,
    holonomy_block_residual,
    is_bkl,
    is_btp_direct,
    is_lcb,
    is_lck,
    is_lp,
    is_vaisman,
    theorem11_conditions,
    threefold_case,
    vaisman_eigenvalue_residual,
    verdict,
)
from hermitian_btp.engine import geometry
from hermitian_btp.errors import Balanced, Indeterminate, NotApplicable, NotBTP
from hermitian_btp.forms import StructureEquations, transform_structure
from hermitian_btp.tensor_core import UnitaryMatrix


def _hand_a(Y):
    """a_i for a one-row nilmanifold, derived by hand; returned sorted for multiset comparison."""
    Y = np.asarray(Y, complex)
    s = Y.sum()
    return np.abs(s), np.conj(Y) * abs(s) / np.conj(s)


def _sorted(z):
    return np.array(sorted(np.asarray(z), key=lambda c: (round(c.real, 8), round(c.imag, 8))))


# --- verdict bands ----------------------------------------------------------------


def test_verdict_bands():
    assert verdict("x", 1e-10) is True
    assert verdict("x", 1e-8) is False
    with pytest.raises(Indeterminate):
        verdict("x", 3e-9)


def test_borderline_structure_is_indeterminate():
    S = catalog.family_ab(1, -1 + 3e-9).S
    with pytest.raises(Indeterminate):
        classifier.is_balanced(S)


# --- catalog regression ------------------------------------------------------------


def test_catalog_expected_flags(default_catalog):
    for e in default_catalog:
        rep = classify(e.S)
        assert set(rep.flags) == set(FLAG_NAMES)
        for key, want in e.expected.items():
            if key in rep.flags:
                assert rep.flags[key] == want, (e.name, key)


def test_report_flags_backed_by_residuals(default_catalog):
    for e in default_catalog:
        rep = classify(e.S)
        for key, flag in rep.flags.items():
            r = rep.residuals[key]
            if flag is None or key == "gce" or (not flag and key in rep.witnesses):
                continue
            assert (r < rep.tolerance) if flag else (r >= 10 * rep.tolerance), (e.name, key)


def test_ricq_example_expectations():
    g = geometry(catalog.ricq_counterexample5().S)
    assert np.abs(g.derived.ricQ).max() < 1e-10 and np.abs(g.derived.Q).max() > 0.1


def test_abelian_is_btp_with_zero_residual():
    r = is_btp_direct(StructureEquations.abelian(3))
    assert r.flag and r.residual == 0


def test_random_structure_not_btp_with_witness():
    r = is_btp_direct(catalog.random_2step(2, 4, 2))
    assert not r.flag and r.witness is not None
    assert np.abs(geometry(catalog.random_2step(2, 4, 2)).DbT[r.witness]) > 0


# --- curvature characterization ------------------------------------------------------


def test_curvature_conditions_on_btp_entries(default_catalog):
    for e in default_catalog:
        if e.expected.get("btp_direct"):
            th = theorem11_conditions(e.S)
            assert th.flag and max(th.residuals.values()) < 1e-9, e.name


def test_curvature_conditions_abelian():
    th = theorem11_conditions(StructureEquations.abelian(3))
    assert th.flag and max(th.residuals.values()) == 0


@settings(max_examples=60)
@given(rotated_structures())
def test_curvature_conditions_equivalent_to_parallel_torsion(S):
    assert theorem11_conditions(S).flag == is_btp_direct(S).flag


@pytest.mark.parametrize("S", non_nilpotent_structures(), ids=lambda S: S.name)
def test_curvature_conditions_equivalent_beyond_nilpotent(S):
    assert theorem11_conditions(S).flag == is_btp_direct(S).flag


def test_equivalence_sample_contains_both_outcomes():
    flags = [is_btp_direct(S).flag for S in catalog.random_2step_sample(100, seed=11, density=0.3)]
    assert any(flags) and not all(flags)


# --- admissible frames --------------------------------------------------------------


@pytest.mark.parametrize("Y", [(1, 2), (1, 1), (1, 1j), (1, 1 + 1j), (2 - 1j, 0.3j), (1, 0)])
def test_admissible_frame_matches_hand_values(Y):
    adm = admissible_frame(catalog.family_ab(*Y).S)
    lam, a = _hand_a(Y)
    assert abs(adm.lam - lam) < 1e-12
    assert adm.max_check < 1e-9
    np.testing.assert_allclose(_sorted(adm.a[:2]), _sorted(a), atol=1e-10)
    assert adm.a[2] == 0


def test_admissible_frame_lcb_member_has_real_eigenvalues():
    adm = admissible_frame(catalog.family_ab(1, 2).S)
    assert np.abs(adm.a.imag).max() < 1e-12
    assert is_lcb(catalog.family_ab(1, 2).S)[0]


def test_admissible_frame_vaisman_member():
    adm = admissible_frame(catalog.family_ab(1, 1).S)
    np.testing.assert_allclose(adm.a[:2], [adm.lam / 2] * 2, atol=1e-12)


def test_admissible_frame_ricq_example():
    lam, a = _hand_a(catalog.RICQ5_Y)
    adm = admissible_frame(catalog.ricq_counterexample5().S)
    assert abs(adm.lam - np.sqrt(10)) < 1e-12 and adm.max_check < 1e-9
    np.testing.assert_allclose(_sorted(adm.a[:4]), _sorted(a), atol=1e-10)


def test_admissible_frame_errors():
    with pytest.raises(Balanced):
        admissible_frame(catalog.n3_example().S)
    with pytest.raises(NotBTP):
        admissible_frame(catalog.random_2step(2, 4, 2))


@given(st.integers(0, 2**31 - 1))
def test_admissible_frame_invariants_in_rotated_frame(seed):
    rng = np.random.default_rng(seed)
    Y = rng.normal(size=3) + 1j * rng.normal(size=3)
    S = transform_structure(catalog.nilmanifold(3, 4, [Y]), UnitaryMatrix.random(4, rng))
    adm = admissible_frame(S)
    assert adm.max_check < 1e-9
    lam, a = _hand_a(Y)
    np.testing.assert_allclose(_sorted(adm.a[:3]), _sorted(a), atol=1e-9)


# --- named predicates on the three-parameter family ----------------------------------


def test_bkl_member():
    S = catalog.family_ab(1, 1j).S
    assert is_bkl(S)[0] and not is_vaisman(S)[0]


def test_vaisman_member():
    S = catalog.family_ab(1, 1).S
    assert is_vaisman(S)[0] and not is_bkl(S)[0] and is_lck(S)[0]


def test_kahler_is_not_vaisman():
    assert not is_vaisman(StructureEquations.abelian(3))[0]


@pytest.mark.parametrize("b", [2, 1j, 1 + 1j, 1, -2j, 0.5 - 3j])
def test_nonbalanced_btp_threefolds_are_lp_with_degenerate_torsion(b):
    S = catalog.family_ab(1, b).S
    assert has_degenerate_torsion(S)[0]
    assert is_lp(S)[0]


def test_degenerate_torsion_needs_nonbalanced_btp():
    with pytest.raises(NotApplicable):
        has_degenerate_torsion(catalog.n3_example().S)


def test_vaisman_routes_agree(default_catalog):
    seen = 0
    for e in default_catalog + [catalog.family_ab(2j, 2j), catalog.family_ab(1, 3)]:
        r = vaisman_eigenvalue_residual(e.S)
        if r is None:
            continue
        seen += 1
        assert verdict("eig", r) == is_vaisman(e.S)[0], e.name
    assert seen >= 8


def test_nonbalanced_btp_holonomy_and_lee_field(default_catalog):
    for e in default_catalog:
        r = holonomy_block_residual(e.S)
        if r is None:
            continue
        assert r < 1e-9, e.name
        assert chi_holomorphic_residual(e.S) < 1e-9, e.name


# --- threefold cases ----------------------------------------------------------------------


@pytest.mark.parametrize("b,case", [(1j, CASE1), (1 + 1j, CASE2), (2, CASE3), (1, CASE3)])
def test_threefold_named_cases(b, case):
    tf = threefold_case(catalog.family_ab(1, b).S)
    assert tf.case == case
    assert (case == CASE1) == is_bkl(catalog.family_ab(1, b).S)[0]


@settings(max_examples=50)
@given(st.complex_numbers(max_magnitude=3, min_magnitude=0.2), st.complex_numbers(max_magnitude=3, min_magnitude=0.2))
def test_threefold_case_matches_discriminant_oracle(a, b):
    if abs(a + b) < 0.05:
        return  # near-balanced members carry no case label
    pairing = a * np.conj(b)
    if 0 < abs(pairing.real) < 1e-6 or 0 < abs(pairing.imag) < 1e-6:
        return  # borderline draws; residual scales differ between routes there
    S = catalog.family_ab(a, b).S
    _, (a1, a2) = _hand_a([a, b])
    want = oracles.discriminant_case(a1, a2, 1e-9)
    got = threefold_case(S).case
    assert got == want
    assert (got == CASE1) == is_bkl(S)[0]


def test_threefold_not_applicable():
    with pytest.raises(NotApplicable):
        threefold_case(catalog.n3_example().S)
    with pytest.raises(NotApplicable):
        threefold_case(catalog.ricq_counterexample5().S)
    assert classify(catalog.n3_example().S).threefold_case == NOT_APPLICABLE


def test_twisted_models_cases():
    for kappa in (1j, 1 + 1j):
        S = catalog.twisted_sasakian_model(1, 1, kappa).S
        adm = admissible_frame(S)
        want = oracles.discriminant_case(adm.a[0], adm.a[1], 1e-9)
        assert threefold_case(S).case == want


# --- Bismut-abelian certificate -------------------------------------------------------


def test_certificate_when_eigenvalues_differ():
    S = catalog.family_ab(1, 2).S
    flag, r = bismut_abelian_certificate(S)
    assert flag and r < 1e-9
    adm = admissible_frame(S)
    g = geometry(adm.S)
    Th = g.curvature_array(g.theta_b)
    off = Th.copy()
    for k in range(3):
        off[k, k] = 0
    assert np.abs(off).max() < 1e-9


def test_certificate_abelian():
    assert bismut_abelian_certificate(StructureEquations.abelian(3))[0]


def test_certificate_vaisman_member_recorded():
    flag, r = bismut_abelian_certificate(catalog.family_ab(1, 1).S)
    assert isinstance(flag, bool) and r >= 0


# --- sweeps and covariance ------------------------------------------------------------------


def test_corollary_sweep(default_catalog):
    structs = [e.S for e in default_catalog] + catalog.random_2step_sample(50, seed=3, density=0.3)
    rep = corollary_sweep(structs)
    assert not rep.violations
    row = {r.name: r for r in rep.rows}
    assert row["family_ab(1,1i)"].bkl and row["family_ab(1,1i)"].pluriclosed
    assert row["family_ab(1,2)"].btp and not row["family_ab(1,2)"].pluriclosed and not row["family_ab(1,2)"].bkl


@settings(max_examples=10)
@given(st.sampled_from([e.S for e in catalog.default_catalog()]), st.integers(0, 2**31 - 1))
def test_classification_is_frame_invariant(S, seed):
    U = UnitaryMatrix.random(S.n, np.random.default_rng(seed))
    a, b = classify(S), classify(transform_structure(S, U))
    assert a.flags == b.flags and a.threefold_case == b.threefold_case
    for k, v in a.residuals.items():
        if v is not None:
            assert abs(v - b.residuals[k]) < 1e-10, k
