"""Lie point generators: prolongation, determining residuals, classification.

A :class:`Generator` carries xi^t, xi^s and an eta coefficient per dependent
field (keyed by field name).  Keys that are not fields (``A``, ``gamma``) are
treated as constant parameters acted on without prolongation, which is what
equivalence generators need.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import sympy as sp

from . import mhd_systems as ms
from .errors import InvalidConfig, UnsupportedOrder
from .symexpr import (
    LAG,
    JetVar,
    Reducer,
    _total,
    alpha,
    beta,
    canonicalize,
    fn,
    gamma,
    jet,
    jet_info,
    s,
    t,
    zero_test,
)

# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class Generator:
    name: str
    xi_t: object = 0
    xi_s: object = 0
    eta: tuple = ()  # sorted (key, expr) pairs

    def __post_init__(self):
        object.__setattr__(self, "xi_t", sp.sympify(self.xi_t))
        object.__setattr__(self, "xi_s", sp.sympify(self.xi_s))
        pairs = self.eta.items() if isinstance(self.eta, dict) else self.eta
        clean = tuple(sorted(((str(k), sp.sympify(v)) for k, v in pairs if sp.sympify(v) != 0)))
        object.__setattr__(self, "eta", clean)
        for e in (self.xi_t, self.xi_s, *(v for _, v in clean)):
            for sym in e.free_symbols:
                info = jet_info(sym)
                if info is not None and info.order > 0:
                    raise InvalidConfig(f"generator {self.name}: coefficient depends on derivative {sym}")

    @property
    def eta_map(self):
        return dict(self.eta)

    def coefficient(self, key):
        return self.eta_map.get(key, sp.Integer(0))

    def __add__(self, other):
        eta = self.eta_map
        for k, v in other.eta:
            eta[k] = eta.get(k, 0) + v
        return Generator(f"{self.name}+{other.name}", self.xi_t + other.xi_t, self.xi_s + other.xi_s, eta)

    def scaled(self, c, name=None):
        c = sp.sympify(c)
        return Generator(name or f"{c}*{self.name}", c * self.xi_t, c * self.xi_s,
                         {k: c * v for k, v in self.eta})

    def __rmul__(self, c):
        return self.scaled(c)

    def renamed(self, name):
        return Generator(name, self.xi_t, self.xi_s, self.eta)

    def subs(self, mapping):
        return Generator(self.name, self.xi_t.subs(mapping), self.xi_s.subs(mapping),
                         {k: v.subs(mapping) for k, v in self.eta})

    def __str__(self):
        parts = []
        if self.xi_t != 0:
            parts.append(f"({self.xi_t})*d/dt")
        if self.xi_s != 0:
            parts.append(f"({self.xi_s})*d/ds")
        parts += [f"({v})*d/d{k}" for k, v in self.eta]
        return " + ".join(parts) or "0"


def gen(name, xi_t=0, xi_s=0, **eta):
    return Generator(name, xi_t, xi_s, eta)


def combine(name, *terms):
    """Linear combination from (coefficient, generator) pairs."""
    out = Generator(name)
    for c, g in terms:
        out = out + g.scaled(c)
    return out.renamed(name)


# ---------------------------------------------------------------------------
# prolongation


class ProlongedGenerator:
    """Generator prolonged to jets of order <= ``order``; coefficients built on demand."""

    def __init__(self, base: Generator, order: int, space=LAG):
        self.base = base
        self.order = order
        self.space = space
        self._eta = base.eta_map
        self._cache: dict = {}

    def eta_of(self, info: JetVar):
        """Coefficient of d/d(info) in the prolonged generator."""
        if info.order > self.order:
            raise UnsupportedOrder(f"{info.name} needs prolongation order {info.order} > {self.order}")
        if info in self._cache:
            return self._cache[info]
        if info.order == 0:
            val = self._eta.get(info.base, sp.Integer(0))
        else:
            if info.ns > 0:
                parent, axis = JetVar(info.base, info.nt, info.ns - 1, self.space), 1
            else:
                parent, axis = JetVar(info.base, info.nt - 1, info.ns, self.space), 0
            val = self.total_step(parent, axis)
        self._cache[info] = val
        return val

    def total_step(self, parent: JetVar, axis: int):
        """eta^{J+i} = D_i eta^J - f_{J+t} D_i xi^t - f_{J+s} D_i xi^s."""
        space = self.space
        d = lambda e: _total(e, space, axis)
        ft = parent.shifted(0).symbol
        fs = parent.shifted(1).symbol
        return d(self.eta_of(parent)) - ft * d(self.base.xi_t) - fs * d(self.base.xi_s)

    def apply(self, e):
        """Action of the prolonged generator on ``e``."""
        e = sp.sympify(e)
        ti, si = (sp.Symbol(n) for n in self.space.indep)
        terms = []
        if self.base.xi_t != 0:
            terms.append(self.base.xi_t * sp.diff(e, ti))
        if self.base.xi_s != 0:
            terms.append(self.base.xi_s * sp.diff(e, si))
        for sym in e.free_symbols:
            info = jet_info(sym, self.space)
            if info is not None:
                c = self.eta_of(info)
            elif sym.name in self._eta:
                c = self._eta[sym.name]
            else:
                continue
            if c != 0:
                terms.append(c * sp.diff(e, sym))
        return sp.Add(*terms)

    __call__ = apply


def prolong(g: Generator, order: int, space=LAG) -> ProlongedGenerator:
    if order not in (1, 2):
        raise UnsupportedOrder(f"prolongation order must be 1 or 2, got {order}")
    return ProlongedGenerator(g, order, space)


def commutation_defect(pg: ProlongedGenerator, base: str):
    """eta^{f,ts} built along t-then-s minus along s-then-t (zero for a correct prolongation)."""
    f_t = JetVar(base, 1, 0, pg.space)
    f_s = JetVar(base, 0, 1, pg.space)
    return pg.total_step(f_t, 1) - pg.total_step(f_s, 0)


# ---------------------------------------------------------------------------
# determining residuals


def system_order(sys):
    order = 0
    for k, rhs in sys.rules().items():
        for sym in (k - rhs).free_symbols:
            info = jet_info(sym)
            if info is not None:
                order = max(order, info.order)
    return order


_REDUCERS: dict = {}


def manifold_reducer(sys, optional=False):
    key = (id(sys), optional)
    hit = _REDUCERS.get(key)
    if hit is None or hit[0] is not sys:
        hit = (sys, Reducer(sys.rules(optional=optional, separable=True)))
        _REDUCERS[key] = hit
    return hit[1]


def determining_residuals(g: Generator, sys, order=None):
    """X(F) restricted to the solution manifold, one entry per residual F.

    Flagged optional relations are neither residuals nor used for reduction.
    """
    order = order or max(1, system_order(sys))
    pg = prolong(g, order)
    red = manifold_reducer(sys)
    # a decoupled (separable) group is only checked when the generator acts on it
    sep_bases = {jet_info(k).base for k in sys.separable}
    touches = bool(sep_bases & set(g.eta_map))
    out = []
    for key, F in sys.residual_map(optional=False, separable=touches).items():
        out.append((key, red.reduce(pg.apply(F))))
    return out


@dataclass
class ResidualStatus:
    key: str
    is_zero: bool
    method: str
    residual: float


@dataclass
class SymmetryReport:
    generator: str
    system: str
    passed: bool
    entries: list = field(default_factory=list)

    @property
    def method(self):
        return "numeric" if any(e.method == "numeric" for e in self.entries) else "symbolic"

    @property
    def max_residual(self):
        vals = [e.residual for e in self.entries if e.residual == e.residual]
        return max(vals, default=0.0)

    @property
    def failing(self):
        return [e.key for e in self.entries if not e.is_zero]


def check_symmetry(g: Generator, sys, numeric=True) -> SymmetryReport:
    rep = SymmetryReport(g.name, sys.name, True)
    for key, res in determining_residuals(g, sys):
        z = zero_test(res, numeric=numeric)
        rep.entries.append(ResidualStatus(str(key), z.is_zero, z.method, z.residual))
        rep.passed &= z.is_zero
    return rep


# ---------------------------------------------------------------------------
# classifying equations


def classifying_residual_sigma(a3, a4, a5, model: ms.ConductivityModel, with_A=False):
    """LHS - RHS of the sigma classifying equation with ``model`` substituted.

    With ``with_A`` the A != 0 form is used, which requires a5 = 0.
    """
    a3, a4, a5 = map(sp.sympify, (a3, a4, a5))
    if with_A and a5 != 0:
        return sp.sympify(ms.A * a5)
    sig = model.sigma()
    rho, p = ms.rho, ms.p
    lhs = 2 * (a3 - 2 * a4 + a5) * rho * sp.diff(sig, rho) + 2 * (a5 - a4) * p * sp.diff(sig, p)
    return canonicalize(lhs - (a3 - 2 * a4) * sig)


PROFILE_CONDITIONS = {
    # per system kind: profile -> (rhs coefficient as function of k)
    "A": {"S": lambda k: -2 * k[6] + (1 - gamma) * k[7] + 2 * gamma * k[8]},
    "A0": {
        "S": lambda k: -2 * k[3] + (1 - gamma) * k[4] + 2 * gamma * k[5],
        "F": lambda k: -k[3] - k[4] / 2 + k[5],
        "G": lambda k: -k[3] - k[4] / 2 + 2 * k[5],
        "R": lambda k: -k[3] + 2 * k[5],
    },
    "A0g2": {
        "Stilde": lambda k: -2 * k[3] - k[4] + 4 * k[5],
        "F": lambda k: -k[3] - k[4] / 2 + k[5],
        "R": lambda k: -k[3] + 2 * k[5],
    },
}


@dataclass(frozen=True)
class ClassificationCase:
    id: str
    kind: str  # A | A0 | A0g2 (profile cases) or sigmaA | sigmaA0
    profiles: tuple = ()  # (name, expr in s)
    params: tuple = ()  # (symbol, value) constraints
    model: object = None
    generators: tuple = ()

    def __post_init__(self):
        if self.kind in ("A0", "A0g2") and self.profiles:
            prof = dict(self.profiles)
            if prof.get("F", 1) == 0 and prof.get("G", 1) == 0 and self.kind == "A0":
                raise InvalidConfig(f"{self.id}: F and G both vanish")

    @property
    def profile_map(self):
        return {k: sp.sympify(v).subs(dict(self.params)) for k, v in self.profiles}


def classifying_residual_profiles(k, case: ClassificationCase):
    """Residuals of the profile conditions for coefficient vector ``k`` (1-based dict or list)."""
    if not isinstance(k, dict):
        k = {i + 1: sp.sympify(v) for i, v in enumerate(k)}
    k = {i: sp.sympify(k.get(i, 0)) for i in range(1, 9)}
    conds = PROFILE_CONDITIONS[case.kind]
    prof = case.profile_map
    out = []
    lead = (k[7] * s + k[2]) if case.kind == "A" else (k[4] * s + k[2])
    for name, coef in conds.items():
        f = prof.get(name, fn(name, s))
        out.append(canonicalize(lead * sp.diff(f, s) - coef(k) * f))
    if case.kind == "A":
        out.append(sp.expand(2 * k[6] - k[7] - 2 * k[8]))
    if case.kind == "A0g2":
        out.append(canonicalize(k[6] * prof.get("F", fn("F", s))))
    return [sp.sympify(x).subs(dict(case.params)) for x in out]


def coefficient_vector(g: Generator, kind):
    """Read k_i off a generator written in the Y-basis of the variational systems."""
    xt, xs = sp.expand(g.xi_t), sp.expand(g.xi_s)
    phi = jet("phi")
    k = {}
    if kind == "A":
        chi = jet("chi")
        k[1], k[6] = xt.coeff(t, 0), xt.coeff(t, 1)
        k[2], k[7] = xs.coeff(s, 0), xs.coeff(s, 1)
        k[3] = g.coefficient("psi")
        ec = sp.expand(g.coefficient("chi"))
        k[8] = sp.expand(g.coefficient("phi")).coeff(phi, 1)
        rest = sp.expand(ec - k[8] * chi)
        k[4], k[5] = rest.coeff(t, 0), rest.coeff(t, 1)
    else:
        k[1], k[3], k[6] = xt.coeff(t, 0), xt.coeff(t, 1), xt.coeff(t, 2)
        k[2], k[4] = xs.coeff(s, 0), xs.coeff(s, 1)
        ep = sp.expand(g.coefficient("phi"))
        k[5] = sp.expand(ep - k[6] * t * phi).coeff(phi, 1)
    return {i: sp.sympify(v) for i, v in k.items()}


# ---------------------------------------------------------------------------
# generator bases

u, v, w, rho, p, Ht, Hz, Et, Ez, r, th, z = (
    ms.u, ms.v, ms.w, ms.rho, ms.p, ms.Htheta, ms.Hz, ms.Etheta, ms.Ez, ms.r, ms.theta, ms.z)


def extended_algebra_1():
    """Basis Y1..Y8 for finite sigma; f1(s, r v) and f2(s) arbitrary."""
    return {
        "Y1": gen("Y1", xi_t=1),
        "Y2": gen("Y2", xi_s=1),
        "Y3": gen("Y3", t, 2 * s, u=-u, v=-v, w=-w, rho=2 * rho, Etheta=-Et, Ez=-Ez),
        "Y4": gen("Y4", 0, -2 * s, r=r, z=z, u=u, v=v, w=w, rho=-4 * rho, p=-2 * p, Htheta=-Ht, Hz=-Hz),
        "Y5": gen("Y5", 0, 2 * s, rho=2 * rho, p=2 * p, Etheta=Et, Ez=Ez, Htheta=Ht, Hz=Hz),
        "Y6": gen("Y6", z=t, w=1),
        "Y7": gen("Y7", theta=fn("f1", s, r * v)),
        "Y8": gen("Y8", z=fn("f2", s)),
    }


def extended_algebra_2():
    y = extended_algebra_1()
    drop = lambda g: Generator(g.name, g.xi_t, g.xi_s, {k: e for k, e in g.eta if k not in ("w", "z")})
    return {
        "Y1": y["Y1"], "Y2": y["Y2"], "Y3": drop(y["Y3"]), "Y4": drop(y["Y4"]), "Y5": y["Y5"],
        "Y6": gen("Y6", theta=fn("f", s, r * v)),
    }


def kern01():
    return [gen("X1", xi_t=1), gen("X2", xi_s=1), gen("X3", z=t, w=1),
            gen("X4", theta=fn("h1", s)), gen("X5", z=fn("h2", s))]


def kern02():
    return [gen("X1", xi_t=1), gen("X2", xi_s=1), gen("X3", theta=fn("h", s, r * v))]


def infinite_A_list(entropy_arg=None):
    """Symmetries of the infinite-conductivity system with A != 0."""
    S_ = p * rho ** (-gamma) if entropy_arg is None else entropy_arg
    return [
        gen("X1", xi_t=1),
        gen("X2", xi_s=1),
        gen("X3", t, 2 * s, u=-u, v=-v, w=-w, rho=2 * rho),
        gen("X4", 0, -2 * s, r=r, z=z, v=v, u=u, w=w, rho=-4 * rho, p=-2 * p, Htheta=-Ht, Hz=-Hz),
        gen("X5", z=t, w=1),
        gen("X6", theta=fn("f1", s, S_)),
        gen("X7", z=fn("f2", s, S_)),
    ]


def _a0_invariants():
    return (s, r * v, p * rho ** (-gamma), Ht / (r * rho), Hz / rho)


def infinite_A0_list():
    return [
        gen("X1", xi_t=1),
        gen("X2", xi_s=1),
        gen("X3", t, 2 * s, u=-u, v=-v, rho=2 * rho),
        gen("X4", 0, -2 * s, r=r, v=v, u=u, rho=-4 * rho, p=-2 * p, Htheta=-Ht, Hz=-Hz),
        gen("X5", 0, 2 * s, rho=2 * rho, p=2 * p, Htheta=Ht, Hz=Hz),
        gen("X6", theta=fn("f1", *_a0_invariants())),
    ]


def gamma2_X7():
    f2 = fn("f2", *(sp.sympify(x).subs(gamma, 2) for x in _a0_invariants()))
    return gen("X7", Hz=rho * f2, p=-Hz * rho * f2)


phi, psi, chi = jet("phi"), jet("psi"), jet("chi")


def four_symmetries():
    return [gen("X1", xi_t=1), gen("X2", psi=1), gen("X3", chi=1), gen("X4", chi=t)]


def variational_A_basis():
    return {
        "Y1": gen("Y1", xi_t=1), "Y2": gen("Y2", xi_s=1), "Y3": gen("Y3", psi=1), "Y4": gen("Y4", chi=1),
        "Y5": gen("Y5", chi=t), "Y6": gen("Y6", xi_t=t), "Y7": gen("Y7", xi_s=s),
        "Y8": gen("Y8", phi=phi, chi=chi),
    }


def variational_A0_basis(gamma2=False):
    y = {"Y1": gen("Y1", xi_t=1), "Y2": gen("Y2", xi_s=1), "Y3": gen("Y3", xi_t=t),
         "Y4": gen("Y4", xi_s=s), "Y5": gen("Y5", phi=phi)}
    if gamma2:
        y["Y6"] = gen("Y6", t**2, 0, phi=t * phi)
    return y


def table1_rows():
    """(row id, X6, sigma model) for the A != 0 extensions."""
    y = extended_algebra_1()
    return [
        ("row1", combine("X6", (2, y["Y3"]), (1, y["Y4"])), ms.ConductivityModel("F_rho"), (2, 1, 0)),
        ("row2", combine("X6", (1 + 2 * alpha, y["Y3"]), (alpha, y["Y4"])),
         ms.ConductivityModel("sqrt_rho_F_p_rho_alpha"), (1 + 2 * alpha, alpha, 0)),
    ]


def table2_rows():
    """(row id, [generators], sigma model, [(a3, a4, a5)...]) for A = 0."""
    y = extended_algebra_2()
    Y3, Y4, Y5 = y["Y3"], y["Y4"], y["Y5"]
    M = ms.ConductivityModel
    return [
        ("row1", [Y3.renamed("X4")], M("sqrt_rho_F_p"), [(1, 0, 0)]),
        ("row2", [combine("X4", (1, Y4), (alpha, Y3))], M("sqrt_rho_F_p_rho_pow"), [(alpha, 1, 0)]),
        ("row3", [combine("X4", (1, Y5), (alpha, Y4), (beta, Y3))], M("rho_pow_F"), [(beta, alpha, 1)]),
        ("row4", [Y3.renamed("X4"), Y4.renamed("X5")], M("C_sqrt_rho"), [(1, 0, 0), (0, 1, 0)]),
        ("row5", [Y3.renamed("X4"), combine("X5", (1, Y5), (alpha, Y4))], M("C_sqrt_rho_p_pow"),
         [(1, 0, 0), (0, alpha, 1)]),
        ("row6", [combine("X4", (1, Y4), (alpha, Y3)), combine("X5", (1, Y5), (beta, Y3))],
         M("C_rho_p_power"), [(alpha, 1, 0), (beta, 0, 1)]),
    ]


# ---------------------------------------------------------------------------
# equivalence generators

SIG = jet("sig")
SIG_RHO, SIG_P = sp.symbols("sigma_rho sigma_p")


def _sig_w(ws, wr, wp):
    # sigma_rho, sigma_p scale like sigma divided by rho, p
    return {"sigma_rho": (ws - wr) * SIG_RHO, "sigma_p": (ws - wp) * SIG_P}


def equivalence_generators(regime, corrected=False):
    """Equivalence generators for ``regime``.

    ``regime`` is one of ``finite-A``, ``finite-A0``, ``infinite-A``,
    ``variational-A``, ``variational-A0``, ``variational-A0-gamma2`` (or a
    :class:`Regime`, mapped to the first three).  sigma is the field ``sig``;
    profiles use their field names.  With ``corrected`` the scaling weights of
    the profile functions are replaced by the values that make the generators
    consistent with the equations.
    """
    if isinstance(regime, ms.Regime):
        if regime.finite:
            regime = "finite-A" if regime.has_A else "finite-A0"
        elif regime.has_A:
            regime = "infinite-A"
        else:
            regime = "variational-A0-gamma2" if regime.gamma_flag == "gamma2" else "variational-A0"
    A = ms.A
    if regime == "finite-A":
        return [
            gen("Xe1", xi_t=1), gen("Xe2", xi_s=1),
            gen("Xe3", t, 2 * s, u=-u, v=-v, w=-w, rho=2 * rho, Etheta=-Et, Ez=-Ez, sig=SIG, **_sig_w(1, 2, 0)),
            gen("Xe4", 0, -2 * s, r=r, z=z, u=u, v=v, w=w, rho=-4 * rho, p=-2 * p, Htheta=-Ht, Hz=-Hz,
                sig=-2 * SIG, **_sig_w(-2, -4, -2)),
            gen("Xe5", 0, 2 * s, rho=2 * rho, p=2 * p, Etheta=Et, Ez=Ez, Htheta=Ht, Hz=Hz, A=A,
                **_sig_w(0, 2, 2)),
            gen("Xe6", z=t, w=1), gen("Xe7", theta=fn("phi1", s)), gen("Xe8", z=fn("phi2", s)),
        ]
    if regime == "finite-A0":
        return [
            gen("Xe1", xi_t=1), gen("Xe2", xi_s=1),
            gen("Xe3", t, 2 * s, u=-u, v=-v, rho=2 * rho, Etheta=-Et, Ez=-Ez, sig=SIG, **_sig_w(1, 2, 0)),
            gen("Xe4", 0, -2 * s, r=r, u=u, v=v, rho=-4 * rho, p=-2 * p, Htheta=-Ht, Hz=-Hz, sig=-2 * SIG,
                **_sig_w(-2, -4, -2)),
            gen("Xe5", 0, 2 * s, rho=2 * rho, p=2 * p, Etheta=Et, Ez=Ez, Htheta=Ht, Hz=Hz, **_sig_w(0, 2, 2)),
            gen("Xe6", theta=fn("phi1", s, r * v)),
        ]
    if regime == "infinite-A":
        S_ = p * rho ** (-gamma)
        return [
            gen("Xe1", xi_t=1), gen("Xe2", xi_s=1),
            gen("Xe3", t, 2 * s, u=-u, v=-v, w=-w, rho=2 * rho),
            gen("Xe4", 0, -2 * s, r=r, z=z, u=u, v=v, w=w, rho=-4 * rho, p=-2 * p, Htheta=-Ht, Hz=-Hz),
            gen("Xe5", 0, 2 * s, rho=2 * rho, p=2 * p, Htheta=Ht, Hz=Hz, A=A),
            gen("Xe6", z=t, w=1), gen("Xe7", theta=fn("phi1", s, S_)), gen("Xe8", z=fn("phi2", s, S_)),
        ]
    S, F, G, R, St = (jet(n) for n in ("S", "F", "G", "R", "Stilde"))
    if regime == "variational-A":
        return [
            gen("Xe1", xi_t=1), gen("Xe2", xi_s=1), gen("Xe3", psi=1), gen("Xe4", chi=1), gen("Xe5", chi=t),
            gen("Xe6", (2 * gamma - 1) * t, 2 * (gamma - 1) * s, phi=gamma * phi, chi=gamma * chi),
            gen("Xe7", t, 2 * s, S=-2 * gamma * S),
            gen("Xe8", (1 - gamma) * t, 2 * s, A=gamma * A),
        ]
    if regime == "variational-A0":
        if corrected:
            x3 = gen("Xe3", 2 * t, 0, phi=phi, S=2 * (gamma - 2) * S, F=-F)
            x4 = gen("Xe4", 2 * t, -s, phi=phi, S=(3 * gamma - 5) * S, F=-F / 2, G=G / 2)
            x5 = gen("Xe5", t, -s, S=(gamma - 3) * S, R=-R, F=-F / 2, G=-G / 2)
        else:
            x3 = gen("Xe3", 4 * t, 0, phi=phi, S=2 * (gamma - 2) * S, F=-F)
            x4 = gen("Xe4", 2 * t, -s, phi=phi, S=2 * (gamma - 3) * S, G=G)
            x5 = gen("Xe5", t, -s, S=2 * (gamma - 2) * S, R=-R)
        return [gen("Xe1", xi_t=1), gen("Xe2", xi_s=1), x3, x4, x5]
    if regime == "variational-A0-gamma2":
        if corrected:
            x5 = gen("Xe5", t, 2 * s, R=-R, Stilde=-4 * St, F=-2 * F)
        else:
            x5 = gen("Xe5", t, 2 * s, R=R)
        return [
            gen("Xe1", xi_t=1), gen("Xe2", xi_s=1),
            gen("Xe3", 2 * t, -2 * s, phi=phi, Stilde=2 * St),
            gen("Xe4", 2 * t, 0, phi=phi, F=-F),
            x5,
            # with F present the t-dependent weight breaks F_t = 0; corrected form lives on F = 0
            gen("Xe6", t**2, 0, phi=t * phi) if corrected else gen("Xe6", t**2, 0, phi=t * phi, F=-t * F),
        ]
    raise InvalidConfig(f"no equivalence generators for {regime!r}")


@functools.lru_cache(maxsize=None)
def equivalence_system(regime):
    """The system over the extended space in which equivalence generators are checked."""
    from . import noether

    sig_rules = {}
    if regime in ("finite-A", "finite-A0"):
        reg = ms.FINITE_A if regime == "finite-A" else ms.FINITE_A0
        cfg = ms.ModelConfig(conductivity=ms.ConductivityModel("custom", expr=SIG),
                             A=ms.A if reg.has_A else 0)
        base = ms.build_system(cfg, reg)
        rho_t, p_t = base.solved[jet("rho", 1)], base.solved[jet("p", 1)]
        sig_rules = {jet("sig", 1): SIG_RHO * rho_t + SIG_P * p_t,
                     jet("sig", 0, 1): SIG_RHO * jet("rho", 0, 1) + SIG_P * jet("p", 0, 1)}
        base.relations.update(sig_rules)
        return base
    if regime == "infinite-A":
        return ms.build_system(ms.ModelConfig(conductivity=ms.ConductivityModel("infinite")), ms.INFINITE_A)
    if regime == "variational-A":
        return noether.build_variational("A", profiles="fields")[1]
    if regime == "variational-A0":
        return noether.build_variational("A0", profiles="fields")[1]
    if regime == "variational-A0-gamma2":
        return noether.build_variational("A0g2", profiles="fields")[1]
    raise InvalidConfig(f"unknown equivalence regime {regime!r}")


# ---------------------------------------------------------------------------
# check catalog


@dataclass(frozen=True)
class CheckSpec:
    """A named check: ``run`` returns (holds, method, residual, detail)."""

    id: str
    run: object
    expected: bool = True
    description: str = ""


@dataclass
class CheckResult:
    id: str
    status: str  # pass | fail | error
    method: str
    residual: float
    expected: bool = True
    observed: bool | None = None
    detail: str = ""
    seconds: float = 0.0

    def as_dict(self):
        return {"id": self.id, "status": self.status, "method": self.method, "residual": self.residual}


def evaluate(spec: CheckSpec) -> CheckResult:
    import time

    t0 = time.perf_counter()
    try:
        holds, method, residual, detail = spec.run()
    except Exception as exc:  # reported, never swallowed silently
        return CheckResult(spec.id, "error", "none", float("nan"), spec.expected, None,
                           f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)
    status = "pass" if bool(holds) == spec.expected else "fail"
    return CheckResult(spec.id, status, method, float(residual), spec.expected, bool(holds), detail,
                       time.perf_counter() - t0)


def _sym_run(g, build):
    def run():
        rep = check_symmetry(g, build())
        return rep.passed, rep.method, rep.max_residual, ",".join(rep.failing)
    return run


def _exact_run(make):
    """Exact canonical zero for every expression (no numeric fallback)."""
    def run():
        exprs = [canonicalize(e) for e in make()]
        bad = [str(e) for e in exprs if e != 0]
        return not bad, "symbolic", 0.0 if not bad else 1.0, "; ".join(bad)[:200]
    return run


@functools.lru_cache(maxsize=None)
def finite_system(kind="opaque", has_A=True):
    reg = ms.FINITE_A if has_A else ms.FINITE_A0
    cfg = ms.ModelConfig(conductivity=ms.ConductivityModel(kind), A=ms.A if has_A else 0)
    return ms.build_system(cfg, reg)


@functools.lru_cache(maxsize=None)
def infinite_system(has_A=True, gamma_=None, thermo="pressure"):
    reg = ms.INFINITE_A if has_A else ms.INFINITE_A0
    cfg = ms.ModelConfig(gamma=gamma if gamma_ is None else gamma_, A=ms.A if has_A else 0,
                         conductivity=ms.ConductivityModel("infinite"))
    return ms.build_system(cfg, reg, thermo=thermo)


@functools.lru_cache(maxsize=None)
def variational_system(kind, profiles=(), gamma_=None):
    from . import noether

    return noether.build_variational(kind, profiles=dict(profiles), gamma_=gamma_)[1]


@functools.lru_cache(maxsize=None)
def _constrained_equivalence(regime, constraints):
    return ms.constrain(equivalence_system(regime), dict(constraints))


@dataclass(frozen=True)
class VariationalCase:
    """A generator admitted by the Euler-Lagrange system for particular profiles."""

    id: str
    kind: str
    generator: Generator
    profiles: tuple
    params: tuple = ()

    def resolved(self):
        m = dict(self.params)
        prof = tuple((k, sp.sympify(v).subs(m)) for k, v in self.profiles)
        return self.generator.subs(m), prof, m.get(gamma)


def _flip_last(g: Generator):
    terms = [("xi_t", g.xi_t), ("xi_s", g.xi_s)] + list(g.eta)
    terms = [(k, v) for k, v in terms if v != 0]
    if len(terms) < 2:
        return None
    k = terms[-1][0]
    eta = g.eta_map
    xt, xs = g.xi_t, g.xi_s
    if k == "xi_t":
        xt = -xt
    elif k == "xi_s":
        xs = -xs
    else:
        eta[k] = -eta[k]
    return Generator(g.name + "~", xt, xs, eta)


def variational_cases():
    from .symexpr import F0, G0, R0, S0, q, q1, q2, q3, q4

    St0 = sp.Symbol("St0")
    out = []
    V = lambda *a, **k: out.append(VariationalCase(*a, **k))
    const = (("S", S0), ("F", F0), ("G", G0), ("R", R0))
    pw = (("S", S0 * s**q1), ("F", F0 * s**q2), ("G", G0 * s**q3), ("R", R0 * s**q4))
    ex = (("S", S0 * sp.exp(q1 * s)), ("F", F0 * sp.exp(q2 * s)), ("G", G0 * sp.exp(q3 * s)),
          ("R", R0 * sp.exp(q4 * s)))
    pin = lambda prof, **z: tuple((k, z.get(k, v)) for k, v in prof)
    V("var.A0.const.ds", "A0", gen("X", 0, 1), const)
    V("var.A0.const.F0", "A0", gen("X", -t, 2 * (gamma - 1) * s, phi=(gamma - 2) * phi), pin(const, G=0, R=0))
    V("var.A0.const.F0.gamma32", "A0", gen("X", -t, 2 * (gamma - 1) * s, phi=(gamma - 2) * phi),
      pin(const, G=0), ((gamma, sp.Rational(3, 2)),))
    V("var.A0.const.G0", "A0", gen("X", t, 2 * s, phi=phi), pin(const, F=0, R=0))
    V("var.A0.power.3_1", "A0", gen("X", (q1 - 2 * gamma * q2 - 1) * t, 2 * (gamma - 1) * s,
                                    phi=(q1 - 2 * q2 + gamma - 2) * phi), pw,
      ((q3, (q1 + 2 * (gamma - 2) * q2 + gamma - 2) / (2 * (gamma - 1))),
       (q4, (q1 + 2 * (gamma - 2) * q2 + 2 * gamma - 3) / (2 * (gamma - 1)))))
    V("var.A0.power.3_2", "A0", gen("X", (2 * q1 - 2 * gamma * q3 + gamma - 2) * t, 2 * (gamma - 2) * s,
                                    phi=(q1 - 2 * q3 + gamma - 2) * phi), pin(pw, F=0),
      ((q4, q3 + sp.Rational(1, 2)),))
    V("var.A0.exp.4_1", "A0", gen("X", (q1 - 2 * gamma * q2) * t, 2 * (gamma - 1), phi=(q1 - 2 * q2) * phi), ex,
      ((q3, (q1 + 2 * (gamma - 2) * q2) / (2 * (gamma - 1))), (q4, (q1 + 2 * (gamma - 2) * q2) / (2 * (gamma - 1)))))
    V("var.A0.exp.4_2", "A0", gen("X", 2 * (q1 - gamma * q3) * t, 2 * (gamma - 2), phi=(q1 - 2 * q3) * phi),
      pin(ex, F=0), ((q4, q3),))
    c2 = (("Stilde", St0), ("F", F0), ("R", R0))
    pw2 = (("Stilde", St0 * s**q1), ("F", F0 * s**q2), ("R", R0 * s**q3))
    ex2 = (("Stilde", St0 * sp.exp(q1 * s)), ("F", F0 * sp.exp(q2 * s)), ("R", R0 * sp.exp(q3 * s)))
    V("var.A0g2.star", "A0g2", gen("X*", 2 * t, phi=phi), (("F", 0),))
    V("var.A0g2.starstar", "A0g2", gen("X**", t**2, phi=t * phi), (("F", 0),))
    V("var.A0g2.const.ds", "A0g2", gen("X", 0, 1), c2)
    V("var.A0g2.const.F0", "A0g2", gen("X", -t, 2 * s), pin(c2, R=0))
    V("var.A0g2.const.noF", "A0g2", gen("X", t, 2 * s, phi=phi), pin(c2, F=0, R=0))
    V("var.A0g2.power.F0", "A0g2", gen("X", (q1 - 4 * q2 - 1) * t, 2 * s, phi=(q1 - 2 * q2) * phi), pw2,
      ((q3, (q1 + 1) / 2),))
    V("var.A0g2.power.noF", "A0g2", gen("X", 0, 4 * s, phi=(q1 + 1) * phi), pin(pw2, F=0), ((q3, (q1 + 1) / 2),))
    V("var.A0g2.exp.F0", "A0g2", gen("X", (q1 - 4 * q2) * t, 2, phi=(q1 - 2 * q2) * phi), ex2, ((q3, q1 / 2),))
    V("var.A0g2.exp.noF", "A0g2", gen("X", 0, 4, phi=q1 * phi), pin(ex2, F=0), ((q3, q1 / 2),))
    # A != 0 profile extensions (Lie symmetries of the three-potential system)
    both = lambda c: {"phi": c * phi, "chi": c * chi}
    V("table3.row1.X", "A", gen("X", 0, 1), (("S", S0),))
    V("table3.row1.Y", "A", gen("X", (2 * gamma - 1) * t, 2 * (gamma - 1) * s, **both(gamma)), (("S", S0),))
    V("table3.row2", "A", gen("X", (2 * gamma + q - 1) * t, 2 * (gamma - 1) * s, **both(gamma + q)),
      (("S", S0 * s**q),))
    V("table3.row3", "A", gen("X", q * t, 2 * (gamma - 1), **both(q)), (("S", S0 * sp.exp(q * s)),))
    return out


def _table3_perturbation(case: VariationalCase):
    from .symexpr import S0, q

    bump = {"table3.row1.X": S0 * s, "table3.row1.Y": S0 * s, "table3.row2": S0 * s ** (q + 1),
            "table3.row3": S0 * sp.exp((q + 1) * s)}[case.id]
    return tuple(("S", bump) if k == "S" else (k, v) for k, v in case.profiles)


def _noether_identity_run(kind, g, profiles, expect_zero=True):
    def run():
        from . import noether

        L = noether.build_variational(kind, profiles=dict(profiles))[0]
        z = zero_test(noether.noether_identity_residual(L, g, canonical=False))
        return z.is_zero, z.method, z.residual, ""
    return run


def checks():
    """Catalog of symmetry and classification checks, keyed by id."""
    out = {}

    def add(cid, run, expected=True, description=""):
        out[cid] = CheckSpec(cid, run, expected, description)

    for g in kern01():
        add(f"kern01.{g.name}", _sym_run(g, lambda: finite_system("opaque", True)))
    for g in kern02():
        add(f"kern02.{g.name}", _sym_run(g, lambda: finite_system("opaque", False)))
    y1 = extended_algebra_1()
    add("sharp.kern01.Y5", _sym_run(y1["Y5"], lambda: finite_system("opaque", True)), False,
        "Y5 is not admitted when A != 0")
    for g in four_symmetries():
        add(f"four.{g.name}", _sym_run(g, lambda: variational_system("A")))
    for g in infinite_A_list():
        add(f"inf.A.{g.name}", _sym_run(g, lambda: infinite_system(True)))
    for g in infinite_A0_list():
        add(f"inf.A0.{g.name}", _sym_run(g, lambda: infinite_system(False)))
    add("inf.A0.X7.gamma2", _sym_run(gamma2_X7(), lambda: infinite_system(False, sp.Integer(2))))
    add("sharp.inf.A0.X7.gamma", _sym_run(gamma2_X7(), lambda: infinite_system(False, sp.Rational(7, 5))), False,
        "X7 needs gamma = 2")

    for rid, g, model, (a3, a4, a5) in table1_rows():
        add(f"table1.{rid}", _sym_run(g, lambda k=model.kind: finite_system(k, True)))
        add(f"sharp.table1.{rid}", _sym_run(g, lambda: finite_system("opaque", True)), False,
            "opaque sigma")
        add(f"classify.table1.{rid}",
            _exact_run(lambda a=(a3, a4, a5), m=model: [classifying_residual_sigma(*a, m, with_A=True)]))
    for rid, gens, model, avecs in table2_rows():
        for g in gens:
            add(f"table2.{rid}.{g.name}", _sym_run(g, lambda k=model.kind: finite_system(k, False)))
        add(f"sharp.table2.{rid}", _sym_run(gens[0], lambda: finite_system("opaque", False)), False,
            "opaque sigma")
        add(f"classify.table2.{rid}",
            _exact_run(lambda av=avecs, m=model: [classifying_residual_sigma(*a, m) for a in av]))
    add("sharp.classify.table1.a5", _exact_run(
        lambda: [classifying_residual_sigma(0, 0, 1, ms.ConductivityModel("F_rho"), with_A=True)]), False,
        "a5 != 0 is excluded when A != 0")

    for case in variational_cases():
        g, prof, gam = case.resolved()
        build = lambda k=case.kind, pr=prof, ga=gam: variational_system(k, pr, ga)
        add(case.id, _sym_run(g, build))
        if case.id.startswith("table3"):
            bumped = _table3_perturbation(VariationalCase(case.id, case.kind, g, prof))
            add(f"sharp.{case.id}", _sym_run(g, lambda k=case.kind, pr=bumped: variational_system(k, pr)), False,
                "profile exponent shifted")
            continue
        flipped = _flip_last(g)
        if flipped is not None:
            add(f"sharp.{case.id}", _sym_run(flipped, build), False, "sign of one coefficient flipped")
        kind = case.kind
        ccase = ClassificationCase(case.id, kind, prof)
        add(f"classify.{case.id}",
            _exact_run(lambda cc=ccase, gg=g, kk=kind, ga=gam: [
                x.subs(gamma, ga) if ga is not None else x
                for x in classifying_residual_profiles(coefficient_vector(gg, kk), cc)]))

    from .symexpr import S0

    t4 = [("table4.row1", gen("X", 0, 1), (("S", S0),), (("S", S0 * s),)),
          ("table4.row2", gen("X", 0, 2 * s, phi=-phi, chi=-chi), (("S", S0 * s ** (1 - 2 * gamma)),),
           (("S", S0 * s ** (-2 * gamma)),))]
    for tid, g, prof, bad in t4:
        add(tid, _noether_identity_run("A", g, prof))
        add(f"sharp.{tid}", _noether_identity_run("A", g, bad), False, "profile exponent shifted")

    for reg in ("finite-A", "finite-A0", "infinite-A", "variational-A", "variational-A0", "variational-A0-gamma2"):
        verbatim = {g.name: g for g in equivalence_generators(reg)}
        fixed = {g.name: g for g in equivalence_generators(reg, corrected=True)}
        for name, g in verbatim.items():
            add(f"equiv.{reg}.{name}", _sym_run(g, lambda r=reg: equivalence_system(r)))
            if fixed[name] != g:
                if reg == "variational-A0-gamma2" and name == "Xe6":
                    b = lambda: _constrained_equivalence("variational-A0-gamma2", ((jet("F"), sp.Integer(0)),))
                else:
                    b = lambda r=reg: equivalence_system(r)
                add(f"equiv.{reg}.{name}.fixed", _sym_run(fixed[name], b))
    return out
