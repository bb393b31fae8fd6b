"""Conservation laws: catalog, symbolic audit and discrete drift audit."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np
import sympy as sp

from . import mhd_systems as ms
from .errors import GuardMismatch
from .symexpr import (
    EUL,
    LAG,
    A,
    C,
    Dt,
    Ds,
    Reducer,
    _total,
    canonicalize,
    fn,
    gamma,
    jet,
    jet_info,
    numeric_residual,
    reducer_for,
    zero_test,
)


@dataclass(frozen=True)
class ConservationLaw:
    """D_t T^t + D_s T^s = 0 on the solution manifold of a matching system.

    ``constraints`` restrict the manifold (field -> expression); ``params`` are
    parameter values the law needs (e.g. gamma = 2); ``conductivity`` names a
    required sigma model kind, None meaning any.
    """

    name: str
    Tt: object
    Ts: object
    regime: tuple = ()
    conductivity: str | None = None
    params: tuple = ()
    constraints: tuple = ()
    variables: str = "physical"
    kind: str | None = None
    profiles: tuple = ()
    note: str = ""
    thermo: str = "pressure"  # system form the law is stated in (pressure | entropy)

    def __post_init__(self):
        object.__setattr__(self, "Tt", sp.sympify(self.Tt))
        object.__setattr__(self, "Ts", sp.sympify(self.Ts))

    def with_params(self, mapping=None):
        """Expressions with the law's parameter values substituted."""
        m = dict(self.params)
        if mapping:
            m.update(mapping)
        return self.Tt.subs(m), self.Ts.subs(m)

    def scaled(self, c, name=None):
        return self.with_fluxes(c * self.Tt, c * self.Ts, name)

    def __add__(self, other):
        return self.with_fluxes(self.Tt + other.Tt, self.Ts + other.Ts, f"{self.name}+{other.name}")

    def with_fluxes(self, Tt, Ts, name=None):
        return ConservationLaw(name or self.name, Tt, Ts, self.regime, self.conductivity, self.params,
                               self.constraints, self.variables, self.kind, self.profiles, self.note, self.thermo)


# ---------------------------------------------------------------------------
# catalog

u, v, w, rho, p, Ht, Hz, Et, Ez, r, theta, z = (
    jet(n) for n in "u v w rho p Htheta Hz Etheta Ez r theta z".split()
)
t, s = sp.symbols("t s")

ODE_FAMILY = (  # polynomial instances of an arbitrary T^t(r v, w, z - t w)
    lambda a, b, c: a,
    lambda a, b, c: b,
    lambda a, b, c: c,
    lambda a, b, c: a**2 * b + c**3,
    lambda a, b, c: a * b * c - 3 * b**2 + a**3 * c,
)
INVARIANT_FAMILY = (  # instances of an arbitrary T^t(r v, S, Htheta/(r rho), Hz/rho)
    lambda a, b, c, d: b,
    lambda a, b, c, d: a * c,
    lambda a, b, c, d: b**2 * d + c,
    lambda a, b, c, d: a * b * c * d,
    lambda a, b, c, d: c**3 - 2 * a * d**2 + b * c,
)


def _regime(regime):
    return ms.Regime.parse(regime) if isinstance(regime, str) else regime


def _model_kind(model):
    if model is None:
        return None
    return model if isinstance(model, str) else model.kind


def _energy(with_w, Hr, finite):
    kin = (u**2 + v**2 + (w**2 if with_w else 0)) / 2
    Tt = kin + p / ((gamma - 1) * rho) + (Ht**2 + Hz**2) / (2 * rho)
    Ts = r * u * (p + (Ht**2 + Hz**2) / 2) - r * Hr * (v * Ht + (w * Hz if with_w else 0))
    if finite:
        Ts += r * (Et * Hz - Ez * Ht)
    return Tt, Ts


def _basic_laws(reg: ms.Regime):
    tag, fin = reg.tag, reg.finite
    E_t, E_z = (Et, Ez) if fin else (0, 0)
    law = lambda name, Tt, Ts, **kw: ConservationLaw(name, Tt, Ts, regime=(tag,), **kw)
    out = [law("mass", 1 / rho, -r * u)]
    if reg.has_A:
        Hr = A / r
        out += [
            law("momentum_z", w, -r * Hr * Hz),
            law("center_of_mass_z", t * w - z, -t * r * Hr * Hz),
            law("angular_momentum", r * v, -r**2 * Hr * Ht),
            law("flux_theta", Ht / (r * rho), -(E_z + v * Hr)),
            law("flux_z", Hz / rho, r * E_t - r * w * Hr),
            law("energy", *_energy(True, Hr, fin)),
        ]
        if fin:
            k = 2 * t - C * s
            out.append(law("crho_flux_z", k * Hz / rho - C * r * z * Hr, k * (r * Et - r * w * Hr) - r**2 * Hz,
                           conductivity="C_rho"))
    else:
        out += [
            law("angular_momentum", r * v, 0),
            law("flux_theta", Ht / (r * rho), -E_z),
            law("flux_z", Hz / rho, r * E_t),
            law("energy", *_energy(False, 0, fin)),
        ]
        if fin:
            k = 2 * t - C * s
            out.append(law("crho_flux_z", k * Hz / rho, k * r * Et - r**2 * Hz, conductivity="C_rho"))
            out.append(law("crho_flux_theta", C * s * Ht / (r * rho), -(C * s * Ez - r * Ht), conductivity="C_rho"))
        out.append(law("energy_w", *_energy(True, 0, fin)))
        for i, f in enumerate(ODE_FAMILY, 1):
            out.append(law(f"ode_family.{i}", f(r * v, w, z - t * w), 0))
    if not fin:
        out.append(law("entropy", p * rho**-gamma, 0))
        if not reg.has_A:
            for i, f in enumerate(INVARIANT_FAMILY, 1):
                out.append(law(f"invariant_family.{i}", f(r * v, p * rho**-gamma, Ht / (r * rho), Hz / rho), 0))
    return out


# Noether laws that repeat a basic law are listed once
_NOETHER_DUPLICATES = ("energy", "rotation", "momentum_z", "galileo_z")


def noether_laws(has_A=None):
    """Physical-variable laws obtained from the variational catalog (entropy form)."""
    from . import noether

    out = []
    for e in noether.noether_catalog():
        if e.id.rsplit(".", 1)[-1] in _NOETHER_DUPLICATES:
            continue
        if has_A is not None and (e.kind == "A") != has_A:
            continue
        m = dict(e.params)
        g = m.get(gamma, gamma)
        pe = ms.S * rho**g
        Tt, Ts = (sp.sympify(x).xreplace({p: pe}) for x in e.physical)
        cons = tuple((k, sp.sympify(val).subs(m)) for k, val in noether.physical_constraints(e.kind, e.profiles))
        tag = "infinite-A" if e.kind == "A" else "infinite-A0"
        out.append(ConservationLaw(e.id, Tt, Ts, regime=(tag,), params=e.params, constraints=cons,
                                   variables="physical", kind=e.kind, profiles=e.profiles, thermo="entropy"))
    return out


def _gamma_value(law):
    return dict(law.params).get(gamma)


def catalog(regime, model=None, gamma_=None, noether=True):
    """Conservation laws of ``regime``.

    ``model`` (a conductivity model or its kind) selects the laws that need a
    particular sigma; ``gamma_`` selects laws valid only for one gamma.  With
    ``gamma_`` None only the laws valid for every gamma are returned.
    """
    reg = _regime(regime)
    kind = _model_kind(model)
    laws = [x for x in _basic_laws(reg) if x.conductivity is None or x.conductivity == kind]
    if not reg.finite and noether:
        laws += noether_laws(reg.has_A)
    g = None if gamma_ is None else sp.nsimplify(gamma_)
    return [x for x in laws if _gamma_value(x) is None or (g is not None and sp.simplify(_gamma_value(x) - g) == 0)]


def law_id(law):
    if law.name.startswith("noether."):
        return "claw." + law.name
    return f"claw.{law.regime[0]}.{law.name}"


def all_laws():
    """Every catalog law once, under the widest guard that admits it."""
    out = {}
    for tag in ("finite-A", "finite-A0", "infinite-A", "infinite-A0"):
        for law in _basic_laws(ms.Regime.parse(tag)):
            out[law_id(law)] = law
    for law in noether_laws():
        out[law_id(law)] = law
    return out


# ---------------------------------------------------------------------------
# symbolic audit


@functools.lru_cache(maxsize=None)
def audit_system(tag, conductivity=None, thermo="pressure", gamma_=None):
    """The regime system a law is audited on (opaque sigma unless a model is named)."""
    reg = ms.Regime.parse(tag)
    if reg.finite:
        cond = ms.ConductivityModel(conductivity or "opaque")
    else:
        cond = ms.ConductivityModel("infinite")
    g = gamma if gamma_ is None else sp.sympify(gamma_)
    cfg = ms.ModelConfig(gamma=g, A=A if reg.has_A else 0, conductivity=cond)
    return ms.build_system(cfg, reg, thermo=thermo)


def system_for(law, conductivity=None, use_params=True):
    """Guarded system for ``law``: its regime, sigma model, gamma and manifold constraints."""
    g = _gamma_value(law) if use_params else None
    sys_ = audit_system(law.regime[0], conductivity if conductivity is not None else law.conductivity,
                        law.thermo, g)
    if law.constraints:
        m = dict(law.params) if use_params else {}
        sys_ = ms.constrain(sys_, {k: sp.sympify(val).subs(m) for k, val in law.constraints})
    return sys_


def conservation_residual(law, sys_, params=None):
    """D_t T^t + D_s T^s reduced on the manifold of ``sys_``."""
    m = dict(law.params) if params is None else dict(params)
    Tt, Ts = law.Tt.subs(m), law.Ts.subs(m)
    e = reducer_for(sys_).reduce(Dt(Tt) + Ds(Ts))
    return e.subs(m) if m else e


def audit_result(law, sys_=None, params=None):
    sys_ = system_for(law) if sys_ is None else sys_
    return zero_test(conservation_residual(law, sys_, params))


def symbolic_audit(law, sys_=None):
    """True iff the law holds on the solutions of ``sys_`` (default: its guarded system)."""
    return audit_result(law, sys_).is_zero


def flux_perturbation(law):
    """A nearby non-law: flux with flipped sign, or t T^t when the flux vanishes."""
    if law.Ts != 0:
        return law.with_fluxes(law.Tt, -law.Ts, law.name + "~")
    return law.with_fluxes(t * law.Tt, 0, law.name + "~")


def guard_labels(law):
    """Ways to step outside the law's guard; the law should fail under each."""
    out = []
    if law.conductivity is not None:
        out.append("opaque-sigma")
    if _gamma_value(law) is not None:
        out.append("generic-gamma")
    if law.constraints:
        out.append("unconstrained")
    return out


def guard_violation(law, label):
    """(system, params) for one guard violation of ``law``."""
    g = _gamma_value(law)
    if label == "opaque-sigma":
        return system_for(law, conductivity="opaque"), None
    if label == "generic-gamma":
        rest = tuple((k, val) for k, val in law.params if k != gamma)
        return system_for(replace(law, params=rest)), rest
    if label == "unconstrained":
        return audit_system(law.regime[0], law.conductivity, law.thermo, g), None
    raise ValueError(f"unknown guard violation {label!r}")


def guard_violations(law):
    return [(label, *guard_violation(law, label)) for label in guard_labels(law)]


def rescale_law(law, lam):
    """Image of a finite-conductivity law under t -> lam t, s -> lam^2 s.

    Velocities and E scale by 1/lam, rho by lam^2, so sigma = C rho goes to
    sigma = (C lam) rho.  Returns the law in the original variables.
    """
    lam = sp.sympify(lam)
    m = {t: t / lam, s: s / lam**2, u: lam * u, v: lam * v, rho: rho / lam**2, Et: lam * Et, Ez: lam * Ez}
    Tt = law.Tt.xreplace(m)
    Ts = lam * law.Ts.xreplace(m)
    return law.with_fluxes(Tt, Ts, law.name + ".rescaled")


# ---------------------------------------------------------------------------
# Lagrangian -> Eulerian


def to_eulerian(law):
    """(r rho T^t, r rho u T^t + T^s), in Eulerian jet variables."""
    Tt, Ts = lag_to_eul(law.Tt), lag_to_eul(law.Ts)
    return ConservationLaw(law.name + ".eulerian", r * rho * Tt, r * rho * u * Tt + Ts, law.regime,
                           law.conductivity, law.params, law.constraints, "eulerian", law.kind, law.profiles,
                           law.note, law.thermo)


def _lag_op(e, axis):
    """The Lagrangian derivative along ``axis`` written with Eulerian total derivatives."""
    if axis == 0:
        return _total(e, EUL, 0) + u * _total(e, EUL, 1)
    return _total(e, EUL, 1) / (r * rho)


def lag_to_eul(e):
    """Rewrite Lagrangian jets (f_t, f_s, ...) through D_T + u D_R and D_R/(r rho)."""
    e = sp.sympify(e)
    m = {}
    for sym in e.free_symbols:
        info = jet_info(sym, LAG)
        if info is None or info.order == 0:
            continue
        val = sp.Symbol(info.base)
        for _ in range(info.ns):
            val = _lag_op(val, 1)
        for _ in range(info.nt):
            val = _lag_op(val, 0)
        m[sym] = val
    return e.xreplace(m) if m else e


def eul(name, nT=0, nR=0):
    return jet(name, nT, nR, space=EUL)


def continuity_rules():
    """Eulerian continuity plus the mass coordinate: s_R = r rho, s_T = -r rho u."""
    rho_R, u_R = eul("rho", 0, 1), eul("u", 0, 1)
    return {eul("rho", 1): -(rho * u_R + u * rho_R + rho * u / r),
            eul("s", 0, 1): r * rho, eul("s", 1): -r * rho * u}


def euler_rules(finite=True, has_A=True, sigma_=None, gamma_=gamma):
    """Cylindrical MHD in Eulerian form (r independent), E eliminated for finite sigma."""
    R = lambda f: eul(f.name, 0, 1)
    D_R = lambda e: _total(sp.sympify(e), EUL, 1)
    Hr = A / r if has_A else 0
    if finite:
        sig = fn("sigma", rho, p) if sigma_ is None else sigma_
        E_t = -R(Hz) / sig
        E_z = D_R(r * Ht) / (r * sig)
    else:
        sig, E_t, E_z = None, 0, 0
    out = continuity_rules()
    out[eul("u", 1)] = -u * R(u) + v**2 / r - (R(p) + Ht * D_R(r * Ht) / r + Hz * R(Hz)) / rho
    out[eul("v", 1)] = -u * R(v) - u * v / r + Hr * D_R(r * Ht) / (r * rho)
    out[eul("w", 1)] = -u * R(w) + Hr * R(Hz) / rho
    heat = (gamma_ - 1) * sig * (E_t**2 + E_z**2) if finite else 0
    out[eul("p", 1)] = -u * R(p) - gamma_ * p * D_R(r * u) / r + heat
    out[eul("Htheta", 1)] = D_R(v * Hr + E_z - u * Ht)
    out[eul("Hz", 1)] = D_R(r * (w * Hr - E_t - u * Hz)) / r
    out[eul("theta", 1)] = v / r - u * R(theta)
    out[eul("z", 1)] = w - u * R(z)
    if finite:
        out[Et], out[Ez] = E_t, E_z
    return out


def operator_identity_residual(args=None):
    """Lagrangian divergence minus the converted Eulerian divergence, for opaque T^t, T^s.

    Zero after the Eulerian continuity equation is used.
    """
    args = args or (t, s, r, rho, u, v, p, Hz)
    Tt, Ts = fn("Tt", *args), fn("Ts", *args)
    lhs = lag_to_eul(Dt(Tt) + Ds(Ts))
    rhs = (_total(r * rho * Tt, EUL, 0) + _total(r * rho * u * Tt + Ts, EUL, 1)) / (r * rho)
    red = Reducer(continuity_rules(), EUL)
    return canonicalize(red.reduce(lhs - rhs))


def eulerian_residual(law, rules=None, n_points=200):
    """D_T(eT^t) + D_R(eT^r) on the Eulerian manifold; returns (expr, numeric residual)."""
    el = to_eulerian(law)
    rules = rules or euler_rules()
    e = Reducer(rules, EUL).reduce(_total(el.Tt, EUL, 0) + _total(el.Ts, EUL, 1))
    # sampled before canonicalization, so the numbers test the reduction itself
    terms = list(sp.Add.make_args(sp.expand(e)))
    res = numeric_residual(terms, n=n_points) if e != 0 else 0.0
    return canonicalize(e), res


# ---------------------------------------------------------------------------
# discrete audit


@dataclass
class LawDrift:
    law: str
    regime: str
    maxPointwise: float
    globalDrift: float
    interiorOnly: dict
    history: list = field(default_factory=list)  # (t, integral, corrected integral)

    def as_dict(self):
        return {"law": self.law, "regime": self.regime, "maxPointwise": self.maxPointwise,
                "globalDrift": self.globalDrift, "interiorOnly": dict(self.interiorOnly)}


@dataclass
class DriftReport:
    entries: list
    excluded: dict = field(default_factory=dict)  # law id -> reason

    def __getitem__(self, name):
        for e in self.entries:
            if e.law == name:
                return e
        raise KeyError(name)

    def as_dict(self):
        return {"laws": [e.as_dict() for e in self.entries], "excluded": dict(self.excluded)}


_NUMERIC_FIELDS = ("t", "s", "r", "u", "v", "w", "rho", "p", "S", "Htheta", "Hz", "Etheta", "Ez", "theta", "z")


def _series_constants(cfg):
    return {gamma: cfg.gamma, A: cfg.A, C: cfg.C}


def guard_reason(law, cfg):
    """None when ``law`` applies to runs of ``cfg``, else the reason it does not."""
    if law.regime and cfg.regime.tag not in law.regime:
        return f"law needs regime {'/'.join(law.regime)}, run is {cfg.regime.tag}"
    if law.conductivity is not None and law.conductivity != cfg.conductivity:
        return f"law needs sigma model {law.conductivity}, run uses {cfg.conductivity}"
    g = _gamma_value(law)
    if g is not None and abs(float(g) - cfg.gamma) > 1e-12:
        return f"law needs gamma = {g}, run uses {cfg.gamma}"
    if law.constraints:
        return "law holds only on a profile-constrained manifold"
    return None


def _lambdify(law, cfg):
    consts = _series_constants(cfg)
    syms = [sp.Symbol(n) for n in _NUMERIC_FIELDS]
    out = []
    for e in law.with_params():
        e = sp.sympify(e).subs(consts)
        extra = e.free_symbols - set(syms)
        if extra:
            raise GuardMismatch(f"{law.name}: unbound symbols {sorted(map(str, extra))}")
        out.append(sp.lambdify(syms, e, "numpy"))
    return out


def _cell_env(st):
    from . import lagsolver as ls

    c = st.cells()
    env = dict(c)
    env["t"] = st.t
    env["u"] = 0.5 * (st.u[:-1] + st.u[1:])
    if st.cfg.finite:
        E_t, E_z, _ = ls.compute_E(st)
        env["Etheta"], env["Ez"] = 0.5 * (E_t[:-1] + E_t[1:]), 0.5 * (E_z[:-1] + E_z[1:])
    else:
        env["Etheta"] = env["Ez"] = np.zeros(st.N)
    return env


def _node_env(st):
    from . import lagsolver as ls

    nv = ls.node_values(st)
    env = {k: nv[k] for k in ("p", "Htheta", "Hz", "v", "w", "rho", "S", "theta", "z")}
    env.update(t=st.t, s=st.s, r=st.r, u=st.u)
    if st.cfg.finite:
        env["Etheta"], env["Ez"], _ = ls.compute_E(st)
    else:
        env["Etheta"] = env["Ez"] = np.zeros(st.N + 1)
    return env


def _call(f, env, n):
    out = f(*(env[k] for k in _NUMERIC_FIELDS))
    return np.broadcast_to(np.asarray(out, dtype=float), (n,))


def _edge_env(rec):
    return {k: float(rec.get(k, 0.0)) for k in _NUMERIC_FIELDS}


def _audit_one(law, series, fTt, fTs):
    snaps = series.snapshots
    ds = snaps[0].ds
    N = snaps[0].N
    dens = [_call(fTt, _cell_env(st), N) for st in snaps]
    flux = [_call(fTs, _node_env(st), N + 1) for st in snaps]
    I = [float(np.sum(d) * ds) for d in dens]
    Iin = [float(np.sum(d[1:-1]) * ds) for d in dens]
    # cumulative boundary flux up to each snapshot time
    times = [st.t for st in snaps]
    F, acc, k = [0.0], 0.0, 1
    t_now = snaps[0].t
    for dt, left, right in series.boundary:
        acc += dt * (_call(fTs, _edge_env(right), 1)[0] - _call(fTs, _edge_env(left), 1)[0])
        t_now += dt
        while k < len(times) and abs(times[k] - t_now) <= 1e-12 * max(1.0, abs(t_now)):
            F.append(acc)
            k += 1
    if len(F) != len(snaps):
        raise GuardMismatch("boundary log does not match the snapshots")
    scale = max(abs(I[0]), 1e-30)
    drift = max(abs(I[n] + F[n] - I[0]) for n in range(len(snaps))) / scale
    # interior: cells 1..N-2, fluxes through nodes 1 and N-1 (time-centred)
    Fin, acc = [0.0], 0.0
    point, point_in = 0.0, 0.0
    for n in range(1, len(snaps)):
        dt = snaps[n].t - snaps[n - 1].t
        if dt <= 0:
            Fin.append(acc)
            continue
        fl = 0.5 * (flux[n] + flux[n - 1])
        acc += dt * (fl[-2] - fl[1])
        Fin.append(acc)
        res = np.abs((dens[n] - dens[n - 1]) / dt + np.diff(fl) / ds)
        point = max(point, float(res.max()))
        if N > 2:
            point_in = max(point_in, float(res[1:-1].max()))
    sin = max(abs(Iin[0]), 1e-30)
    drift_in = max(abs(Iin[n] + Fin[n] - Iin[0]) for n in range(len(snaps))) / sin
    history = [(times[n], I[n], I[n] + F[n]) for n in range(len(snaps))]
    return LawDrift(law.name, series.cfg.regime.tag, float(point), float(drift),
                    {"maxPointwise": float(point_in), "globalDrift": float(drift_in)}, history)


def discrete_audit(laws, series, strict=True):
    """Flux-corrected drift of every law over a solver run.

    With ``strict`` a law outside its guard raises GuardMismatch; otherwise it
    is listed under ``excluded`` with the reason.
    """
    entries, excluded = [], {}
    for law in laws:
        why = guard_reason(law, series.cfg)
        if why is not None:
            if strict:
                raise GuardMismatch(f"{law.name}: {why}")
            excluded[law.name] = why
            continue
        fTt, fTs = _lambdify(law, series.cfg)
        entries.append(_audit_one(law, series, fTt, fTs))
    return DriftReport(entries, excluded)


def convergence_ratios(coarse: DriftReport, fine: DriftReport):
    """Global drift ratio coarse/fine per law (>= 3 expected for a second-order scheme)."""
    out = {}
    for e in coarse.entries:
        try:
            f = fine[e.law]
        except KeyError:
            continue
        out[e.law] = e.globalDrift / f.globalDrift if f.globalDrift > 0 else math.inf
    return out


# ---------------------------------------------------------------------------
# check registry

EULERIAN_TOL = 1e-10


def _zero_run(make, expect_symbolic=False):
    def run():
        z = make()
        return z.is_zero, z.method, z.residual, ""
    return run


def _eulerian_run(law, tag):
    def run():
        reg = ms.Regime.parse(tag)
        e, res = eulerian_residual(law, euler_rules(reg.finite, reg.has_A))
        method = "symbolic" if e == 0 else "numeric"
        return e == 0 or res <= EULERIAN_TOL, method, res, ""
    return run


def eulerian_rules_residuals(tag):
    """Hand-written Eulerian equations minus the converted Lagrangian ones, per field."""
    reg = ms.Regime.parse(tag)
    sys_ = audit_system(tag)
    red = Reducer(euler_rules(reg.finite, reg.has_A), EUL)
    lag = reducer_for(sys_)
    out = {}
    for k, rhs in sys_.rules(separable=False, optional=False).items():
        info = jet_info(k)
        if info.base in ("r", "theta", "z") or info.order == 0:
            continue
        out[info.base] = canonicalize(red.reduce(lag_to_eul(k) - lag_to_eul(lag.reduce(rhs))))
    return out


def crho_rescaling_residual():
    """The C-law rescaled with lam = 1/C is the C = 1 law times 1/C."""
    base = {x.name: x for x in _basic_laws(ms.FINITE_A0)}["crho_flux_z"]
    one = base.with_fluxes(base.Tt.subs(C, 1), base.Ts.subs(C, 1))
    img = rescale_law(one, 1 / C)
    return [canonicalize(img.Tt - base.Tt / C), canonicalize(img.Ts - base.Ts / C)]


def checks():
    """Conservation-law checks keyed by id."""
    from .liecheck import CheckSpec, _exact_run

    out = {}

    def add(cid, run, expected=True, description=""):
        out[cid] = CheckSpec(cid, run, expected, description)

    for lid, law in all_laws().items():
        add(lid, _zero_run(lambda x=law: audit_result(x)), True, law.note)
        add(f"sharp.{lid}.flux", _zero_run(lambda x=law: audit_result(flux_perturbation(x), system_for(x))),
            False, "perturbed flux")
        for label in guard_labels(law):
            add(f"sharp.{lid}.{label}",
                _zero_run(lambda x=law, lb=label: audit_result(x, *guard_violation(x, lb))), False,
                f"outside the guard: {label}")
    add("eulerian.identity", _exact_run(lambda: [operator_identity_residual()]))
    for tag in ("finite-A", "finite-A0", "infinite-A", "infinite-A0"):
        add(f"eulerian.rules.{tag}", _exact_run(lambda tg=tag: list(eulerian_rules_residuals(tg).values())))
        for law in _basic_laws(ms.Regime.parse(tag)):
            if law.conductivity is not None:
                continue
            add(f"eulerian.{tag}.{law.name}", _eulerian_run(law, tag))
        am = {x.name: x for x in _basic_laws(ms.Regime.parse(tag))}["angular_momentum"]
        if am.Ts != 0:
            add(f"sharp.eulerian.{tag}.angular_momentum", _eulerian_run(flux_perturbation(am), tag), False)
    add("claw.crho.rescale", _exact_run(crho_rescaling_residual))
    return out
