import pytest
import sympy as sp

from cylmhd import mhd_systems as ms
from cylmhd.errors import InvalidConfig
from cylmhd.symexpr import A, Dt, s, t, Ds, canonicalize, gamma, is_zero_on_manifold, jet, jet_info, substitute
from cylmhd.mhd_systems import Etheta, Ez, Hz, Htheta, S, p, r, rho, u, v, w, z

REGIMES = [ms.FINITE_A, ms.FINITE_A0, ms.INFINITE_A, ms.INFINITE_A0]


def d(f, nt=0, ns=0):
    return jet(jet_info(f).base, nt, ns)


def test_regime_parse_and_tag():
    for reg in REGIMES:
        assert ms.Regime.parse(reg.tag) == reg
    assert ms.Regime.parse("infinite-A0-gamma2").gamma_flag == "gamma2"
    with pytest.raises(InvalidConfig):
        ms.Regime("superconducting")


def test_finite_A_solved_form():
    sys_ = ms.build_system()
    assert len(sys_.solved) == 10
    sig = ms.ConductivityModel().sigma()
    et = -r * rho * d(Hz, 0, 1) / sig
    ez = rho * Ds(r * Htheta) / sig
    expected = -gamma * rho * p * Ds(r * u) + (gamma - 1) * sig * (et**2 + ez**2)
    assert canonicalize(sys_.solved[d(p, 1)] - expected) == 0
    assert not any(x in sys_.solved[d(p, 1)].free_symbols for x in (Etheta, Ez))


def test_infinite_A0_reduced_equations():
    sys_ = ms.build_system(regime=ms.INFINITE_A0)
    assert canonicalize(sys_.solved[d(v, 1)] + u * v / r) == 0
    assert canonicalize(sys_.solved[d(Htheta, 1)] + r * rho * Htheta * d(u, 0, 1)) == 0


@pytest.mark.parametrize("reg", REGIMES, ids=lambda x: x.tag)
def test_residuals_vanish_on_their_own_manifold(reg):
    sys_ = ms.build_system(regime=reg)
    for res in sys_.residual_map(optional=True, separable=True).values():
        assert is_zero_on_manifold(res, sys_)


def test_nonlocal_relations():
    sys_ = ms.build_system(regime=ms.INFINITE_A)
    assert sys_.relations[d(r, 0, 1)] == 1 / (r * rho)
    assert sys_.solved[d(r, 1)] == u
    assert canonicalize(sys_.optional[d(ms.theta, 0, 1)] - Htheta / (r * rho * A)) == 0
    assert canonicalize(sys_.optional[d(z, 0, 1)] - Hz / (rho * A)) == 0
    assert not ms.build_system(regime=ms.FINITE_A).optional


def test_entropy():
    assert canonicalize(ms.entropy_of(rho**gamma) - 1) == 0
    for reg in (ms.INFINITE_A, ms.INFINITE_A0):
        assert is_zero_on_manifold(Dt(ms.entropy_of()), ms.build_system(regime=reg))
    for reg in (ms.FINITE_A, ms.FINITE_A0):
        assert not is_zero_on_manifold(Dt(ms.entropy_of()), ms.build_system(regime=reg))


def test_entropy_form():
    sys_ = ms.build_system(regime=ms.INFINITE_A, thermo="entropy")
    assert sys_.solved[d(S, 1)] == 0
    assert p not in sp.sympify(sys_.solved[d(u, 1)]).free_symbols
    with pytest.raises(InvalidConfig):
        ms.build_system(regime=ms.FINITE_A, thermo="entropy")


@pytest.mark.parametrize("reg", [ms.FINITE_A0, ms.INFINITE_A0], ids=lambda x: x.tag)
def test_no_radial_field_when_A_vanishes(reg):
    sys_ = ms.build_system(regime=reg)
    assert sys_.metadata["H_r"] == 0
    for rhs in sys_.rules().values():
        assert A not in sp.sympify(rhs).free_symbols


def test_w_z_pair_decouples():
    sys_ = ms.build_system(regime=ms.FINITE_A0)
    assert set(sys_.separable) == {d(w, 1), d(z, 1)}
    for k, rhs in sys_.separable.items():
        bases = {jet_info(x).base for x in sp.sympify(rhs).free_symbols if jet_info(x)}
        assert bases <= {"w"}
    # w = w0(s), z = w0(s) t + z0 with w0 = s^2, z0 = s
    sol = {w: s**2, z: s**2 * t + s, d(w, 1): 0, d(z, 1): s**2}
    for k, rhs in sys_.separable.items():
        assert sp.simplify((k - rhs).xreplace(sol)) == 0
    others = [rhs for k, rhs in sys_.solved.items()]
    assert not any(w in sp.sympify(e).free_symbols for e in others)


def test_flux_forms_on_manifold():
    for reg in REGIMES:
        sys_ = ms.build_system(regime=reg)
        for dens, flux in ms.flux_forms(sys_):
            assert is_zero_on_manifold(Dt(dens) - Ds(flux), sys_)
    fa = ms.flux_forms(ms.build_system())[0]
    assert fa == (Htheta / (r * rho), v * A / r + Ez)
    assert ms.flux_forms(ms.build_system(regime=ms.INFINITE_A0))[0][1] == 0


def test_eliminate_E():
    sys_ = ms.build_system()
    e = ms.eliminate_E(Etheta * Ez, sys_)
    assert not ({Etheta, Ez} & e.free_symbols)


@pytest.mark.parametrize(
    "make",
    [
        lambda: ms.ModelConfig(gamma=1),
        lambda: ms.ModelConfig(gamma=sp.Rational(1, 2)),
        lambda: ms.build_system(ms.ModelConfig(A=0), ms.FINITE_A),
        lambda: ms.build_system(ms.ModelConfig().with_conductivity("infinite"), ms.FINITE_A),
        lambda: ms.ModelConfig().with_conductivity("C_rho", C=0),
        lambda: ms.ConductivityModel("custom", expr=0).sigma(),
        lambda: ms.ConductivityModel("nonsense"),
        lambda: ms.ConductivityModel("rho_pow_F", alpha=1, beta=1).sigma(),
    ],
)
def test_invalid_configs(make):
    with pytest.raises(InvalidConfig):
        make()


def test_conductivity_model_expressions():
    assert ms.ConductivityModel("C_rho", C=2).sigma() == 2 * rho
    cm = ms.ConductivityModel("C_rho_p_power", C=1, alpha=1, beta=1)
    assert canonicalize(cm.sigma() - p ** sp.Rational(1, 2)) == 0


def test_constrain_drops_constrained_equation():
    sys_ = ms.build_system(regime=ms.INFINITE_A0)
    c = ms.constrain(sys_, {p: S * rho**gamma})
    assert d(p, 1) not in c.solved
