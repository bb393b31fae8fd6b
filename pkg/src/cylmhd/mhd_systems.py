"""Cylindrical MHD systems in mass Lagrangian coordinates.

Four regimes: finite or infinite conductivity crossed with A != 0 or A = 0,
where the radial field is H^r = A/r.  Every regime is a :class:`PdeSystem`
with a solved form for the leading time derivatives plus algebraic or
nonlocal relations (r_s = 1/(r rho), the E-field relations, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import sympy as sp

from .errors import InvalidConfig
from .symexpr import A, C, Ds, alpha, beta, fn, gamma, jet, jet_info

u, v, w, rho, p, Htheta, Hz, Etheta, Ez, r, theta, z, S = (
    jet(n) for n in "u v w rho p Htheta Hz Etheta Ez r theta z S".split()
)


def d(f, nt=0, ns=0):
    """Jet symbol of an order-0 field symbol."""
    return jet(f.name, nt, ns)


@dataclass(frozen=True)
class Regime:
    conductivity: str = "finite"  # finite | infinite
    a_class: str = "nonzero"  # nonzero | zero
    gamma_flag: str = "generic"  # generic | gamma2

    def __post_init__(self):
        if self.conductivity not in ("finite", "infinite"):
            raise InvalidConfig(f"conductivity must be finite or infinite, got {self.conductivity!r}")
        if self.a_class not in ("nonzero", "zero"):
            raise InvalidConfig(f"A-class must be nonzero or zero, got {self.a_class!r}")
        if self.gamma_flag not in ("generic", "gamma2"):
            raise InvalidConfig(f"gamma flag must be generic or gamma2, got {self.gamma_flag!r}")

    @property
    def finite(self):
        return self.conductivity == "finite"

    @property
    def has_A(self):
        return self.a_class == "nonzero"

    @property
    def tag(self):
        return f"{self.conductivity}-{'A' if self.has_A else 'A0'}"

    @classmethod
    def parse(cls, text):
        """``finite-A``, ``infinite-A0`` and the like."""
        parts = text.replace("_", "-").split("-")
        cond = parts[0]
        a_class = "zero" if len(parts) > 1 and parts[1] in ("A0", "zero") else "nonzero"
        flag = "gamma2" if "gamma2" in parts else "generic"
        return cls(cond, a_class, flag)


FINITE_A = Regime("finite", "nonzero")
FINITE_A0 = Regime("finite", "zero")
INFINITE_A = Regime("infinite", "nonzero")
INFINITE_A0 = Regime("infinite", "zero")


# ---------------------------------------------------------------------------
# conductivity models

_KINDS = {
    "opaque": "sigma(rho, p)",
    "F_rho": "F(rho)",
    "sqrt_rho_F_p_rho_alpha": "sqrt(rho) F(p rho^alpha)",
    "C_rho": "C rho",
    "sqrt_rho_F_p": "sqrt(rho) F(p)",
    "sqrt_rho_F_p_rho_pow": "sqrt(rho) F(p rho^(1/(alpha-2)))",
    "rho_pow_F": "rho^((2alpha-beta)/(2(2alpha-beta-1))) F(p rho^((1-alpha)/(2alpha-beta-1)))",
    "C_sqrt_rho": "C sqrt(rho)",
    "C_sqrt_rho_p_pow": "C sqrt(rho) p^(1/(2(alpha-1)))",
    "C_rho_p_power": "C rho^((alpha+beta-2)/(2(alpha+beta-1))) p^((2-alpha)/(2(alpha+beta-1)))",
    "custom": "explicit expression in rho, p",
    "infinite": "infinite conductivity",
}


def _nonzero(expr, what):
    expr = sp.simplify(expr)
    if expr == 0:
        raise InvalidConfig(f"{what} vanishes for the chosen parameters")
    return expr


@dataclass(frozen=True)
class ConductivityModel:
    kind: str = "opaque"
    C: object = C
    alpha: object = alpha
    beta: object = beta
    expr: object = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidConfig(f"unknown conductivity model {self.kind!r}")
        if self.kind == "custom" and self.expr is None:
            raise InvalidConfig("custom conductivity needs an expression")

    @property
    def infinite(self):
        return self.kind == "infinite"

    def sigma(self, rho_=rho, p_=p):
        """sigma as an expression in (rho_, p_)."""
        k, a, b, c = self.kind, sp.sympify(self.alpha), sp.sympify(self.beta), sp.sympify(self.C)
        if k == "infinite":
            raise InvalidConfig("infinite conductivity has no finite sigma")
        if k == "opaque":
            out = fn("sigma", rho_, p_)
        elif k == "F_rho":
            out = fn("F", rho_)
        elif k == "sqrt_rho_F_p_rho_alpha":
            out = sp.sqrt(rho_) * fn("F", p_ * rho_**a)
        elif k == "C_rho":
            out = c * rho_
        elif k == "sqrt_rho_F_p":
            out = sp.sqrt(rho_) * fn("F", p_)
        elif k == "sqrt_rho_F_p_rho_pow":
            out = sp.sqrt(rho_) * fn("F", p_ * rho_ ** (1 / _nonzero(a - 2, "alpha - 2")))
        elif k == "rho_pow_F":
            den = _nonzero(2 * a - b - 1, "2 alpha - beta - 1")
            out = rho_ ** ((2 * a - b) / (2 * den)) * fn("F", p_ * rho_ ** ((1 - a) / den))
        elif k == "C_sqrt_rho":
            out = c * sp.sqrt(rho_)
        elif k == "C_sqrt_rho_p_pow":
            out = c * sp.sqrt(rho_) * p_ ** (1 / (2 * _nonzero(a - 1, "alpha - 1")))
        elif k == "C_rho_p_power":
            den = _nonzero(a + b - 1, "alpha + beta - 1")
            out = c * rho_ ** ((a + b - 2) / (2 * den)) * p_ ** ((2 - a) / (2 * den))
        else:
            out = sp.sympify(self.expr).xreplace({rho: rho_, p: p_})
        if out == 0 or c == 0 and k.startswith("C"):
            raise InvalidConfig("sigma must not vanish identically")
        return out

    def describe(self):
        return _KINDS[self.kind]


@dataclass(frozen=True)
class ModelConfig:
    gamma: object = gamma
    A: object = A
    conductivity: ConductivityModel = field(default_factory=ConductivityModel)
    profiles: dict = field(default_factory=dict)

    def __post_init__(self):
        g = sp.sympify(self.gamma)
        if g.is_number and not g > 1:
            raise InvalidConfig(f"gamma must exceed 1, got {g}")
        if self.conductivity.kind == "custom" and sp.sympify(self.conductivity.expr) == 0:
            raise InvalidConfig("sigma must not vanish identically")
        if self.conductivity.kind.startswith("C") and sp.sympify(self.conductivity.C) == 0:
            raise InvalidConfig("sigma must not vanish identically")

    def with_conductivity(self, kind, **kw):
        return replace(self, conductivity=ConductivityModel(kind, **kw))


# ---------------------------------------------------------------------------
# systems


@dataclass
class PdeSystem:
    """Residual equations with a solved form.

    ``solved`` maps leading time derivatives to right-hand sides; ``relations``
    holds nonlocal and algebraic relations (r_s, eliminated E fields);
    ``optional`` and ``separable`` are flagged groups that generic checks skip.
    """

    name: str
    regime: Regime
    config: ModelConfig
    solved: dict
    relations: dict = field(default_factory=dict)
    optional: dict = field(default_factory=dict)
    separable: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def rules(self, optional=True, separable=True):
        out = dict(self.solved)
        out.update(self.relations)
        if optional:
            out.update(self.optional)
        if separable:
            out.update(self.separable)
        return out

    def residual_map(self, optional=False, separable=False):
        return {k: k - rhs for k, rhs in self.rules(optional, separable).items()}

    @property
    def residuals(self):
        return list(self.residual_map().values())

    @property
    def nonlocal_relations(self):
        return [k - rhs for k, rhs in self.relations.items() if jet_info(k).base in ("r", "theta", "z")]

    def field_names(self):
        names = set()
        for k in self.rules():
            names.add(jet_info(k).base)
        return sorted(names)

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other


def _e_relations(sigma_):
    return {Etheta: -r * rho * d(Hz, 0, 1) / sigma_, Ez: rho * Ds(r * Htheta) / sigma_}


def build_system(config: ModelConfig | None = None, regime: Regime = FINITE_A, thermo="pressure"):
    """The residual system of ``regime`` under ``config``.

    ``thermo='entropy'`` (infinite conductivity only) replaces the pressure
    equation by S_t = 0 with p = S rho^gamma.
    """
    config = config or ModelConfig()
    g = sp.sympify(config.gamma)
    a = sp.sympify(config.A)
    if regime.has_A and a == 0:
        raise InvalidConfig("A = 0 requested for a nonzero-A regime")
    if regime.finite and config.conductivity.infinite:
        raise InvalidConfig("finite-conductivity regime needs a finite sigma model")
    if not regime.finite and not config.conductivity.infinite and config.conductivity.kind != "opaque":
        raise InvalidConfig("infinite-conductivity regime takes no sigma model")
    if thermo not in ("pressure", "entropy"):
        raise InvalidConfig(f"unknown thermodynamic form {thermo!r}")
    if thermo == "entropy" and regime.finite:
        raise InvalidConfig("entropy form is only exact for infinite conductivity")

    Hr = a / r if regime.has_A else sp.Integer(0)
    ru_s = Ds(r * u)
    if regime.finite:
        sig = config.conductivity.sigma()
        erel = _e_relations(sig)
        Et, Ezz = erel[Etheta], erel[Ez]
    else:
        sig = None
        Et = Ezz = sp.Integer(0)

    solved = {
        d(rho, 1): -rho**2 * ru_s,
        d(u, 1): v**2 / r - r * d(p, 0, 1) - Ds(r**2 * Htheta**2) / (2 * r) - r * Ds(Hz**2) / 2,
        d(v, 1): -u * v / r + Hr * Ds(r * Htheta),
        d(p, 1): -g * rho * p * ru_s + ((g - 1) * sig * (Et**2 + Ezz**2) if regime.finite else 0),
        d(Htheta, 1): r * rho * (Ds(v * Hr + Ezz) - Htheta * d(u, 0, 1)),
        d(Hz, 1): rho * (Ds(r * w * Hr - r * Et) - Hz * ru_s),
        d(r, 1): u,
        d(theta, 1): v / r,
    }
    separable = {}
    optional = {}
    if regime.has_A:
        solved[d(w, 1)] = r * Hr * d(Hz, 0, 1)
        solved[d(z, 1)] = w
        if not regime.finite:
            optional = {d(theta, 0, 1): Htheta / (r**2 * rho * Hr), d(z, 0, 1): Hz / (r * rho * Hr)}
    else:
        separable = {d(w, 1): sp.Integer(0), d(z, 1): w}
        # the w,z pair decouples, so Hz_t must not carry the (zero) w term
        solved[d(Hz, 1)] = rho * (Ds(-r * Et) - Hz * ru_s)
    relations = {d(r, 0, 1): 1 / (r * rho)}
    metadata = {"H_r": Hr, "gamma": g, "A": a}
    if regime.finite:
        relations.update(erel)
        metadata["sigma"] = sig
        metadata["E_relations"] = {Etheta: (sig * Etheta, -r * rho * d(Hz, 0, 1)),
                                   Ez: (sig * Ez, rho * Ds(r * Htheta))}
    if thermo == "entropy":
        pe = S * rho**g
        solved.pop(d(p, 1))
        solved = {k: sp.sympify(rhs).xreplace({d(p, 0, 1): Ds(pe)}).xreplace({p: pe}) for k, rhs in solved.items()}
        solved[d(S, 1)] = sp.Integer(0)
        metadata["p"] = pe
    name = f"{regime.tag}{'-entropy' if thermo == 'entropy' else ''}"
    return PdeSystem(name, regime, config, solved, relations, optional, separable, metadata)


def eliminate_E(expr, system):
    """Replace E fields in ``expr`` by their algebraic expressions."""
    rel = {k: v for k, v in system.relations.items() if k in (Etheta, Ez)}
    return sp.sympify(expr).xreplace(rel) if rel else sp.sympify(expr)


def entropy_of(p_=p, rho_=rho, gamma_=gamma):
    return p_ * rho_ ** (-sp.sympify(gamma_))


def flux_forms(system: PdeSystem):
    """Divergence forms of the magnetic equations as pairs (density, flux).

    Each pair means D_t(density) = D_s(flux).
    """
    Hr = system.metadata["H_r"]
    et = Etheta if system.regime.finite else 0
    ez = Ez if system.regime.finite else 0
    if system.regime.has_A:
        return [(Htheta / (r * rho), v * Hr + ez), (Hz / rho, r * w * Hr - r * et)]
    return [(Htheta / (r * rho), sp.sympify(ez)), (Hz / rho, -r * et)]


def constrain(system: PdeSystem, constraints: dict, name=None):
    """Restrict ``system`` to solutions where some fields are given algebraically.

    Used for profile-constrained manifolds (e.g. p = S(s) rho^gamma).  Evolution
    rules of constrained fields are dropped; callers are expected to check
    that the dropped equations hold on the new manifold.
    """
    bases = {jet_info(k).base for k in constraints}
    keep = lambda dct: {k: v for k, v in dct.items() if jet_info(k).base not in bases}
    rel = keep(system.relations)
    rel.update({k: sp.sympify(v) for k, v in constraints.items()})
    dropped = {k: v for k, v in system.rules().items() if jet_info(k).base in bases}
    meta = dict(system.metadata)
    meta["dropped"] = dropped
    return PdeSystem(name or system.name + "+constraints", system.regime, system.config,
                     keep(system.solved), rel, keep(system.optional), keep(system.separable), meta)
