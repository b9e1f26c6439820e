import numpy as np
import pytest
from hypothesis import given

from conftest import non_nilpotent_structures, rotated_structures
from hermitian_btp import catalog
from hermitian_btp.classifier import is_btp_direct, prop15_identities
from hermitian_btp.errors import NotBTP
from hermitian_btp.forms import StructureEquations
from hermitian_btp.identities import btp_identities, identity_suite, plcld_formula_crosscheck

UNIVERSAL_KEYS = {
    "bismut_R20_from_torsion", "bismut_minus_chern_R11", "cyclic_torsion_derivative",
    "barred_torsion_derivative", "second_bianchi_30", "second_bianchi_21",
    "torsion_derivative_from_R20", "cyclic_TT_from_R20", "barred_torsion_derivative_from_R11",
    "eta_derivative", "eta_barred_derivative", "chern_bianchi_torsion", "chern_bianchi_R11",
    "chern_bianchi_second", "eta_definition", "del_eta_formula", "dbar_eta_formula",
    "ddbar_omega_components",
}


def test_suite_reports_every_identity():
    assert set(identity_suite(catalog.n3_example().S)) == UNIVERSAL_KEYS


def test_abelian_residuals_are_zero():
    assert max(identity_suite(StructureEquations.abelian(4)).values()) == 0


@given(rotated_structures())
def test_universal_identities_on_random_structures(S):
    res = identity_suite(S)
    assert max(res.values()) < 1e-9, res


@pytest.mark.parametrize("S", non_nilpotent_structures(), ids=lambda S: S.name)
def test_universal_identities_beyond_nilpotent(S):
    res = identity_suite(S)
    assert max(res.values()) < 1e-9, res


def test_universal_identities_on_catalog(default_catalog):
    for e in default_catalog:
        assert max(identity_suite(e.S).values()) < 1e-9, e.name


@given(rotated_structures())
def test_ddbar_omega_two_routes(S):
    assert plcld_formula_crosscheck(S) < 1e-10


def test_ddbar_omega_both_sides_vanish_for_bkl_member():
    from hermitian_btp.identities import plcld_component_form

    S = catalog.family_ab(1, 1j).S
    assert plcld_component_form(S).max_abs() < 1e-12
    assert plcld_formula_crosscheck(S) < 1e-12


def test_btp_identities_on_btp_entries(default_catalog):
    checked = 0
    for e in default_catalog:
        if is_btp_direct(e.S).flag:
            res = prop15_identities(e.S)
            assert max(res.values()) < 1e-9, (e.name, res)
            checked += 1
    assert checked >= 10


def test_all_commutators_reported():
    res = btp_identities(catalog.family_ab(1, 2).S)
    for pair in ("A,B", "A,phi", "B,phi", "phi,phi*"):
        assert f"commutator[{pair}]" in res


@pytest.mark.parametrize("S", non_nilpotent_structures()[1:], ids=lambda S: S.name)
def test_btp_identities_on_twisted_models(S):
    assert max(prop15_identities(S).values()) < 1e-9


def test_btp_identities_refuse_non_btp():
    S = catalog.random_2step(3, 4, 2)
    assert not is_btp_direct(S).flag
    with pytest.raises(NotBTP):
        prop15_identities(S)


def test_btp_identities_fail_off_btp():
    # the identities are not tautologies: generic structures violate some of them
    S = catalog.random_2step(3, 4, 2)
    assert max(btp_identities(S).values()) > 1e-3


def test_ricq_identity_on_ricq_example():
    res = prop15_identities(catalog.ricq_counterexample5().S)
    assert res["ricQ_from_torsion"] < 1e-9 and res["nabla_Q"] < 1e-9
    assert np.isfinite(list(res.values())).all()
