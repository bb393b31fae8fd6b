import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from cylmhd import noether as nt
from cylmhd.claw_audit import ConservationLaw
from cylmhd.errors import IncompleteInversion, InvalidConfig, NotASymmetry
from cylmhd.liecheck import evaluate, gen
from cylmhd.symexpr import Dt, canonicalize, eval_numeric, gamma, is_zero_on_manifold, jet, s, t

phi, phi_t, phi_s = jet("phi"), jet("phi", 1), jet("phi", 0, 1)
chi = jet("chi")


def L_A():
    return nt.build_variational("A")[0]


@pytest.mark.parametrize("kind", ["A", "A0", "A0g2"])
def test_euler_lagrange_reproduces_potential_system(kind):
    L, sys_ = nt.build_variational(kind)
    assert all(d == 0 for d in nt.el_defects(L, sys_))


def test_free_particle():
    (el,) = nt.euler_lagrange(phi_t**2 / 2)
    assert canonicalize(el + jet("phi", 2)) == 0


def test_gamma2_merges_profiles():
    L, sys_ = nt.build_variational("A0", gamma_flag=None)
    L2, _ = nt.build_variational("A0g2")
    assert "Stilde" in str(L2.expr) and "Stilde" not in str(L.expr)
    assert sys_.metadata["gamma"] == gamma


def test_build_variational_rejects_finite_conductivity():
    from cylmhd import mhd_systems as ms
    with pytest.raises(InvalidConfig):
        nt.build_variational(ms.FINITE_A)
    with pytest.raises(InvalidConfig):
        nt.build_variational("A", profiles={"F": 1})


def test_noether_identity_examples():
    L = L_A()
    assert nt.noether_identity_residual(L, gen("X1", xi_t=1)) == 0
    X = gen("X4", chi=t)
    assert nt.noether_identity_residual(L, X, nt.DivergencePair(chi, 0)) == 0
    assert nt.noether_identity_residual(L, X) != 0


def test_conserved_density_requires_symmetry():
    with pytest.raises(NotASymmetry):
        nt.conserved_density(L_A(), gen("X4", chi=t))


def test_density_of_time_translation_is_conserved():
    L, sys_ = nt.build_variational("A")
    law = nt.conserved_density(L, gen("X1", xi_t=1))
    assert nt.potential_residual(law, sys_).is_zero


def test_to_physical():
    law = ConservationLaw("x", jet("phi", 1, 1), 0, variables="potential", kind="A")
    with pytest.raises(IncompleteInversion):
        nt.to_physical(law)
    phys = ConservationLaw("y", jet("u"), 0)
    assert nt.to_physical(phys) is phys
    r, u = jet("r"), jet("u")
    out = nt.to_physical(ConservationLaw("z", phi * phi_t, 0, variables="potential", kind="A0"))
    assert canonicalize(out.Tt - r * u) == 0


def test_divergence_pair_is_point_level():
    with pytest.raises(InvalidConfig):
        nt.DivergencePair(phi_t, 0)


def test_catalog_entries_are_unique():
    ids = [e.id for e in nt.noether_catalog()]
    assert len(ids) == len(set(ids))


@pytest.mark.parametrize("cid", ["noether.A.galileo_z", "noether.A0.energy", "noether.A0g2.starstar"])
def test_catalog_entry_passes(cid):
    entry = {e.id: e for e in nt.noether_catalog()}[cid]
    out = nt.run_entry(entry)
    assert out.passed
    assert nt.second_identity(entry).passed


def test_perturbed_generators_fail():
    for e in nt.noether_catalog():
        if e.perturb and nt.perturbed(e) is not None and e.kind == "A":
            assert not nt.perturbed_identity(e).is_zero


def test_scaling_entry_has_sharp_check():
    checks = nt.checks()
    res = evaluate(checks["sharp.noether.A.scaling"])
    assert res.status == "pass" and res.observed is False


coef = st.integers(-3, 3)


@settings(max_examples=5)
@given(st.lists(coef, min_size=5, max_size=5), st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_trivially_conserved_family(cs, exps):
    r, v, rho, Ht, Hz, S = (jet(n) for n in "r v rho Htheta Hz S".split())
    inv = [r * v, S, Ht / (r * rho), Hz / rho]
    mono = sp.Mul(*[x**k for x, k in zip(inv, exps)])
    T = cs[0] + cs[1] * inv[0] * inv[1] + cs[2] * inv[2] ** 2 + cs[3] * inv[3] + cs[4] * mono
    assert is_zero_on_manifold(Dt(T), nt.physical_system("A0"))


# discrete action ------------------------------------------------------------

PROFILES = {"S": sp.Rational(6, 5), "F": sp.Rational(1, 2), "G": sp.Rational(3, 10), "R": sp.Rational(1, 5)}
G_VAL = 1.4


def _exact(tt, ss):
    a = tt + 2 * ss
    return {
        "phi": 1 + ss + 0.1 * np.sin(a), "phi_t": 0.1 * np.cos(a), "phi_s": 1 + 0.2 * np.cos(a),
        "phi_tt": -0.1 * np.sin(a), "phi_ts": -0.2 * np.sin(a), "phi_ss": -0.4 * np.sin(a),
    }


def _discrete_gradient(h, t0=0.5, s0=0.5):
    L, _ = nt.build_variational("A0", profiles=PROFILES)
    f = sp.lambdify((phi, phi_t, phi_s, s), L.expr.subs(gamma, G_VAL), "numpy")
    n = 5
    idx = np.arange(-n, n + 1) * h
    T, Sg = np.meshgrid(t0 + idx, s0 + idx, indexing="ij")
    field = _exact(T, Sg)["phi"].astype(complex)

    def action(F):
        mid = (F[1:, 1:] + F[:-1, 1:] + F[1:, :-1] + F[:-1, :-1]) / 4
        ft = (F[1:, 1:] - F[:-1, 1:] + F[1:, :-1] - F[:-1, :-1]) / (2 * h)
        fs = (F[1:, 1:] - F[1:, :-1] + F[:-1, 1:] - F[:-1, :-1]) / (2 * h)
        sm = (Sg[1:, 1:] + Sg[:-1, :-1]) / 2
        return np.sum(f(mid, ft, fs, sm)) * h * h

    eps = 1e-20
    field[n, n] += 1j * eps
    return action(field).imag / eps / (h * h), L


def test_discrete_action_gradient_matches_euler_lagrange():
    errs = []
    for h in (0.04, 0.02):
        grad, L = _discrete_gradient(h)
        (el,) = nt.euler_lagrange(L)
        pt = {k: float(v) for k, v in _exact(0.5, 0.5).items()}
        pt.update(s=0.5, gamma=G_VAL)
        errs.append(abs(grad - eval_numeric(el, pt)))
    assert errs[1] < 1e-3
    assert 3.0 < errs[0] / errs[1] < 5.0
