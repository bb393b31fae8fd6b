import functools

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from cylmhd import liecheck as lc
from cylmhd import mhd_systems as ms
from cylmhd.errors import InvalidConfig, UnsupportedOrder
from cylmhd.symexpr import LAG, JetVar, alpha, canonicalize, fn, gamma, jet, s, t

u, rho, p, Ht, Hz = ms.u, ms.rho, ms.p, ms.Htheta, ms.Hz


@functools.lru_cache(maxsize=None)
def catalog():
    return lc.checks()


def run(cid):
    return lc.evaluate(catalog()[cid])


def J(base, nt=0, ns=0):
    return JetVar(base, nt, ns, LAG)


def test_time_translation_prolongs_to_zero():
    pg = lc.prolong(lc.gen("X1", xi_t=1), 2)
    for base in ("u", "rho", "Htheta"):
        for nt, ns in ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2)):
            assert pg.eta_of(J(base, nt, ns)) == 0


def test_scaling_prolongation_by_hand():
    g = lc.gen("g", t, 2 * s, u=-u, rho=2 * rho)
    pg = lc.prolong(g, 2)
    # eta^{u,t} = D_t(-u) - u_t D_t(t) - u_s D_t(2s)
    assert canonicalize(pg.eta_of(J("u", 1)) + 2 * jet("u", 1)) == 0
    assert canonicalize(pg.eta_of(J("u", 0, 1)) + 3 * jet("u", 0, 1)) == 0
    assert canonicalize(pg.eta_of(J("rho", 0, 1))) == 0
    assert canonicalize(pg.eta_of(J("rho", 1))) == jet("rho", 1)
    assert canonicalize(pg.eta_of(J("u", 1, 1)) + 4 * jet("u", 1, 1)) == 0


def test_Y5_prolongation_by_hand():
    g = lc.extended_algebra_2()["Y5"]
    pg = lc.prolong(g, 1)
    # eta^Htheta = Htheta, xi^s = 2s: eta^{Htheta,t} = Htheta_t, eta^{Htheta,s} = -Htheta_s
    assert canonicalize(pg.eta_of(J("Htheta", 1)) - jet("Htheta", 1)) == 0
    assert canonicalize(pg.eta_of(J("Htheta", 0, 1)) + jet("Htheta", 0, 1)) == 0


def test_mixed_prolongation_is_path_independent():
    g = lc.gen("g", t * s, s**2 + t, u=u * rho + s, rho=t * rho**2)
    pg = lc.prolong(g, 2)
    for base in ("u", "rho"):
        assert canonicalize(lc.commutation_defect(pg, base)) == 0


def test_prolongation_order_limits():
    g = lc.gen("X1", xi_t=1)
    for order in (0, 3):
        with pytest.raises(UnsupportedOrder):
            lc.prolong(g, order)
    with pytest.raises(UnsupportedOrder):
        lc.prolong(g, 1).eta_of(J("u", 2))


def test_generators_are_point_transformations():
    with pytest.raises(InvalidConfig):
        lc.gen("bad", u=jet("u", 1))


def test_time_translation_is_admitted():
    rep = lc.check_symmetry(lc.gen("X1", xi_t=1), lc.finite_system())
    assert rep.passed and rep.method == "symbolic"


def test_table1_row1_generator():
    row = lc.table1_rows()[0]
    assert lc.check_symmetry(row[1], lc.finite_system("F_rho")).passed


def test_Y5_requires_vanishing_A():
    y5 = lc.extended_algebra_1()["Y5"]
    assert not lc.check_symmetry(y5, lc.finite_system()).passed
    # with A = 0 it still needs sigma homogeneous of degree 0 in (rho, p)
    assert not lc.check_symmetry(y5, lc.finite_system(has_A=False)).passed
    cfg = ms.ModelConfig(A=0, conductivity=ms.ConductivityModel("custom", expr=fn("F", p / rho)))
    assert lc.check_symmetry(y5, ms.build_system(cfg, ms.FINITE_A0)).passed
    assert lc.classifying_residual_sigma(0, 0, 1, cfg.conductivity) == 0


@pytest.mark.parametrize("cid", ["kern01.X3", "kern02.X3", "four.X4", "inf.A.X6", "inf.A0.X6"])
def test_kernel_entries(cid):
    assert run(cid).status == "pass"


def test_gamma2_extension():
    X7 = lc.gamma2_X7()
    assert lc.check_symmetry(X7, lc.infinite_system(False, 2)).passed
    assert not lc.check_symmetry(X7, lc.infinite_system(False, sp.Rational(7, 5))).passed


def test_entropy_argument_matters():
    good = lc.infinite_A_list()
    bad = lc.infinite_A_list(entropy_arg=p)
    sys_ = lc.infinite_system()
    for i in (5, 6):
        assert lc.check_symmetry(good[i], sys_).passed
        assert not lc.check_symmetry(bad[i], sys_).passed


@settings(max_examples=8)
@given(st.sampled_from([sp.Integer(-3), sp.Rational(1, 2), sp.Integer(7)]), st.sampled_from([0, 2, 4]))
def test_scaling_leaves_status_unchanged(c, idx):
    sys_ = lc.finite_system()
    g = list(lc.extended_algebra_1().values())[idx]
    assert lc.check_symmetry(g.scaled(c), sys_).passed == lc.check_symmetry(g, sys_).passed


def test_classifying_sigma_examples():
    M = ms.ConductivityModel
    assert lc.classifying_residual_sigma(2, 1, 0, M("F_rho")) == 0
    assert lc.classifying_residual_sigma(1 + 2 * alpha, alpha, 0, M("sqrt_rho_F_p_rho_alpha")) == 0
    assert lc.classifying_residual_sigma(1, 0, 0, M("sqrt_rho_F_p")) == 0
    assert lc.classifying_residual_sigma(1, 0, 0, M("C_rho")) != 0
    assert lc.classifying_residual_sigma(0, 0, 1, M("opaque"), with_A=True) != 0


def test_classifying_profile_examples():
    S0 = sp.Symbol("S0")
    const = lc.ClassificationCase("c", "A", profiles=(("S", S0),))
    assert all(e == 0 for e in lc.classifying_residual_profiles({2: 1}, const))
    power = lc.ClassificationCase("p", "A", profiles=(("S", S0 * s ** (1 - 2 * gamma)),))
    k = lc.coefficient_vector(lc.gen("Z", 0, 2 * s, phi=-jet("phi"), chi=-jet("chi")), "A")
    assert all(canonicalize(e) == 0 for e in lc.classifying_residual_profiles(k, power))
    assert any(canonicalize(e) != 0 for e in lc.classifying_residual_profiles(k, const))


def test_classification_case_validation():
    with pytest.raises(InvalidConfig):
        lc.ClassificationCase("x", "A0", profiles=(("F", 0), ("G", 0)))


def test_equivalence_generator_lists():
    fa = lc.equivalence_generators("finite-A")
    assert len(fa) == 8
    assert fa[4].coefficient("A") == ms.A
    xe3 = {g.name: g for g in lc.equivalence_generators("variational-A0")}["Xe3"]
    assert xe3.xi_t == 4 * t
    assert xe3.coefficient("phi") == jet("phi")
    xe6 = {g.name: g for g in lc.equivalence_generators("variational-A0-gamma2")}["Xe6"]
    assert xe6.xi_t == t**2 and xe6.coefficient("phi") == t * jet("phi")


@pytest.mark.parametrize("cid", ["equiv.finite-A.Xe5", "equiv.infinite-A.Xe4", "equiv.variational-A0.Xe3.fixed"])
def test_equivalence_checks(cid):
    assert run(cid).status == "pass"


def test_sharpness_checks_expect_failure():
    res = run("sharp.table1.row1")
    assert res.expected is False and res.observed is False and res.status == "pass"


def test_evaluate_reports_errors():
    def boom():
        raise RuntimeError("x")
    res = lc.evaluate(lc.CheckSpec("boom", boom))
    assert res.status == "error" and "RuntimeError" in res.detail


def test_catalog_ids_are_unique_strings():
    ids = list(catalog())
    assert len(ids) == len(set(ids))
    assert "table1.row2" in ids and "kern01.X3" in ids
