"""Conservative staggered finite-difference solver in mass Lagrangian coordinates.

Nodes carry r and u, cells carry everything else.  The evolved cell variables
are the conserved combinations b = Htheta/(r rho), c = Hz/rho, m = r v, w,
theta, z and either p (finite sigma) or S = p/rho^gamma (infinite sigma);
rho is not evolved but recomputed from the node radii, which makes the mass
balance exact.  Time stepping is a two-stage predictor-corrector.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
import sympy as sp

from . import mhd_systems as ms
from .errors import InvalidConfig, InvalidProfile, NonPositiveDensity, NonPositivePressure, ZeroConductivity
from .symexpr import parse

CELL_FIELDS = ("rho", "p", "S", "Htheta", "Hz", "v", "w", "theta", "z")
NODE_FIELDS = ("s", "r", "u")
SIGMA_KINDS = ("infinite", "C_rho", "C_sqrt_rho", "constant", "custom")


@dataclass(frozen=True)
class RunConfig:
    regime: ms.Regime = ms.INFINITE_A0
    gamma: float = 1.4
    A: float = 0.0
    conductivity: str = "infinite"
    C: float = 1.0
    sigma_expr: str | None = None  # for conductivity = "custom", text in rho, p
    N: int = 200
    s_extent: tuple = (0.0, 1.0)
    r_inner: float = 1.0
    cfl: float = 0.4
    t_end: float | None = None
    max_steps: int | None = None
    bc_left: str = "free"
    bc_right: str = "free"
    p_ext_left: float | None = None  # total pressure outside; default: initial boundary value
    p_ext_right: float | None = None
    profiles: tuple = ()  # (name, text in s) pairs
    viscosity: bool = False
    viscosity_coeff: float = 2.0
    output_every: int = 1

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise InvalidConfig(f"CFL must lie in (0, 1], got {self.cfl}")
        if self.N < 8:
            raise InvalidConfig(f"need at least 8 cells, got {self.N}")
        if self.gamma <= 1:
            raise InvalidConfig("gamma must exceed 1")
        for side in (self.bc_left, self.bc_right):
            if side not in ("rigid", "free"):
                raise InvalidConfig(f"boundary kind must be rigid or free, got {side!r}")
        if self.conductivity not in SIGMA_KINDS:
            raise InvalidConfig(f"unknown conductivity {self.conductivity!r}")
        if self.regime.finite == (self.conductivity == "infinite"):
            raise InvalidConfig(f"conductivity {self.conductivity!r} does not fit regime {self.regime.tag}")
        if self.regime.has_A == (self.A == 0):
            raise InvalidConfig(f"A = {self.A} does not fit regime {self.regime.tag}")
        if self.conductivity == "custom" and not self.sigma_expr:
            raise InvalidConfig("custom conductivity needs sigma_expr")
        if self.conductivity != "infinite" and self.conductivity != "custom" and self.C <= 0:
            raise InvalidConfig("conductivity constant C must be positive")
        if self.s_extent[1] <= self.s_extent[0]:
            raise InvalidConfig("empty s extent")
        if self.t_end is None and self.max_steps is None:
            raise InvalidConfig("give t_end or max_steps")
        if self.output_every < 1:
            raise InvalidConfig("output_every must be positive")
        if "rho" not in dict(self.profiles):
            raise InvalidConfig("profile rho is required")

    @property
    def finite(self):
        return self.regime.finite

    def profile_map(self):
        return dict(self.profiles)


@dataclass(frozen=True)
class GridState:
    t: float
    s: np.ndarray  # nodes
    r: np.ndarray
    u: np.ndarray
    rho: np.ndarray  # cells
    p: np.ndarray
    S: np.ndarray
    b: np.ndarray  # Htheta / (r rho)
    c: np.ndarray  # Hz / rho
    m: np.ndarray  # r v
    w: np.ndarray
    theta: np.ndarray
    z: np.ndarray
    cfg: RunConfig = field(repr=False, compare=False, default=None)

    @property
    def N(self):
        return len(self.rho)

    @property
    def ds(self):
        return float(self.s[1] - self.s[0])

    @property
    def rc(self):
        """Cell radius: mean of the squared node radii, consistent with the cell volume."""
        return np.sqrt(0.5 * (self.r[:-1] ** 2 + self.r[1:] ** 2))

    @property
    def sc(self):
        return 0.5 * (self.s[:-1] + self.s[1:])

    @property
    def Htheta(self):
        return self.b * self.rc * self.rho

    @property
    def Hz(self):
        return self.c * self.rho

    @property
    def v(self):
        return self.m / self.rc

    def cells(self):
        return {"rho": self.rho, "p": self.p, "S": self.S, "Htheta": self.Htheta, "Hz": self.Hz, "v": self.v,
                "w": self.w, "theta": self.theta, "z": self.z, "r": self.rc, "s": self.sc}

    def nodes(self):
        return {"s": self.s, "r": self.r, "u": self.u}


@dataclass
class TimeSeries:
    cfg: RunConfig
    snapshots: list
    dts: list
    boundary: list  # per step: (dt, averaged left edge, averaged right edge)
    wall: float = 0.0

    @property
    def final(self):
        return self.snapshots[-1]


# ---------------------------------------------------------------------------
# setup


def _profile_fn(text):
    e = parse(str(text))
    sym = sp.Symbol("s")
    extra = e.free_symbols - {sym}
    if extra:
        raise InvalidProfile(f"profile {text!r} depends on {sorted(map(str, extra))}, only s is allowed")
    f = sp.lambdify(sym, e, "numpy")
    return lambda x: np.broadcast_to(np.asarray(f(x), dtype=float), np.shape(x)).copy()


def sigma_fn(cfg: RunConfig):
    k, C = cfg.conductivity, cfg.C
    if k == "infinite":
        return None
    if k == "C_rho":
        return lambda rho, p: C * rho
    if k == "C_sqrt_rho":
        return lambda rho, p: C * np.sqrt(rho)
    if k == "constant":
        return lambda rho, p: C + 0 * rho
    e = parse(cfg.sigma_expr)
    f = sp.lambdify((sp.Symbol("rho"), sp.Symbol("p")), e, "numpy")
    return lambda rho, p: np.asarray(f(rho, p), dtype=float) + 0 * rho


def init_grid(cfg: RunConfig) -> GridState:
    prof = cfg.profile_map()
    N = cfg.N
    s = np.linspace(cfg.s_extent[0], cfg.s_extent[1], N + 1)
    ds = s[1] - s[0]
    sc = 0.5 * (s[:-1] + s[1:])
    rho = _profile_fn(prof["rho"])(sc)
    if np.any(~np.isfinite(rho)) or np.any(rho <= 0):
        raise InvalidProfile(f"density must be positive (first bad cell {int(np.argmax(~(rho > 0)))})")
    if cfg.r_inner < 0:
        raise InvalidProfile("inner radius must be nonnegative")
    if cfg.regime.has_A and cfg.r_inner <= 0:
        raise InvalidProfile("A != 0 needs a domain away from the axis (r > 0)")
    if cfg.r_inner == 0 and cfg.bc_left != "rigid":
        raise InvalidProfile("a domain touching the axis needs a rigid inner boundary")
    r2 = cfg.r_inner**2 + np.concatenate(([0.0], np.cumsum(2 * ds / rho)))
    r = np.sqrt(r2)
    rc = np.sqrt(0.5 * (r[:-1] ** 2 + r[1:] ** 2))
    g = cfg.gamma
    get = lambda name, default=0.0, at=sc: (_profile_fn(prof[name])(at) if name in prof
                                            else np.full(np.shape(at), default))
    if "p" in prof and "S" in prof:
        raise InvalidProfile("give p or S, not both")
    if "p" in prof:
        p = get("p")
    elif "S" in prof:
        p = get("S") * rho**g
    else:
        raise InvalidProfile("profile p or S is required")
    if np.any(p <= 0):
        raise InvalidProfile(f"pressure must be positive (first bad cell {int(np.argmax(~(p > 0)))})")
    if "Htheta" in prof and "Htheta_over_rrho" in prof:
        raise InvalidProfile("give Htheta or Htheta_over_rrho, not both")
    b = get("Htheta") / (rc * rho) if "Htheta" in prof else get("Htheta_over_rrho")
    c = get("Hz") / rho if "Hz" in prof else get("Hz_over_rho")
    m = rc * get("v")
    u = get("u", at=s)
    if cfg.bc_left == "rigid":
        u[0] = 0.0
    if cfg.bc_right == "rigid":
        u[-1] = 0.0
    st = GridState(0.0, s, r, u, rho, p, p / rho**g, b, c, m, get("w"), get("theta"), get("z"), cfg)
    ext_l, ext_r = cfg.p_ext_left, cfg.p_ext_right
    if ext_l is None or ext_r is None:
        # total pressure of the initial profiles at the boundary nodes (not the
        # boundary cells), so the external pressure does not depend on N
        at = s[[0, -1]]
        rho_b = _profile_fn(prof["rho"])(at)
        p_b = get("p", at=at) if "p" in prof else get("S", at=at) * rho_b**g
        ht_b = get("Htheta", at=at) if "Htheta" in prof else get("Htheta_over_rrho", at=at) * r[[0, -1]] * rho_b
        hz_b = get("Hz", at=at) if "Hz" in prof else get("Hz_over_rho", at=at) * rho_b
        pstar = p_b + 0.5 * (ht_b**2 + hz_b**2)
        cfg = replace(cfg, p_ext_left=float(pstar[0]) if ext_l is None else ext_l,
                      p_ext_right=float(pstar[-1]) if ext_r is None else ext_r)
        st = replace(st, cfg=cfg)
    return st


# ---------------------------------------------------------------------------
# spatial operators


def density_from_r(r, ds):
    # factored difference of squares, less cancellation than np.diff(r**2)
    dr2 = (r[1:] - r[:-1]) * (r[1:] + r[:-1])
    if np.any(dr2 <= 0):
        i = int(np.argmax(dr2 <= 0))
        raise NonPositiveDensity("node radii not increasing", cell=i)
    return 2 * ds / dr2


def ghosts(st: GridState):
    """Cell values extended by one ghost cell per side (the boundary closure).

    Rigid walls mirror the boundary cell; free boundaries copy it but set the
    ghost pressure so that the total pressure equals the external value.
    """
    cfg = st.cfg
    cells = {"p": st.p, "Htheta": st.Htheta, "Hz": st.Hz, "v": st.v, "w": st.w, "rho": st.rho,
             "rcH": st.rc * st.Htheta, "S": st.S, "theta": st.theta, "z": st.z}
    out = {}
    for k, a in cells.items():
        out[k] = np.concatenate(([a[0]], a, [a[-1]]))
    for side, idx, ext in (("left", 0, cfg.p_ext_left), ("right", -1, cfg.p_ext_right)):
        kind = cfg.bc_left if side == "left" else cfg.bc_right
        if kind == "free":
            out["p"][idx] = ext - 0.5 * (out["Htheta"][idx] ** 2 + out["Hz"][idx] ** 2)
    return out


def node_values(st: GridState, g=None):
    """Cell quantities at nodes: neighbour average inside, ghost value on the boundary."""
    g = g or ghosts(st)
    out = {}
    for k, a in g.items():
        nv = 0.5 * (a[:-1] + a[1:])
        nv[0], nv[-1] = a[0], a[-1]
        out[k] = nv
    return out


def compute_E(st: GridState):
    """(E_theta, E_z) at nodes from sigma E_theta = -r rho Hz_s, sigma E_z = rho (r Htheta)_s."""
    sig = sigma_fn(st.cfg)
    if sig is None:
        raise InvalidConfig("E is only defined for finite conductivity")
    N, ds = st.N, st.ds
    Hz, rcH, rho, p = st.Hz, st.rc * st.Htheta, st.rho, st.p
    dHz = np.empty(N + 1)
    drH = np.empty(N + 1)
    dHz[1:-1] = (Hz[1:] - Hz[:-1]) / ds
    drH[1:-1] = (rcH[1:] - rcH[:-1]) / ds
    # one-sided at the boundary nodes
    dHz[0], dHz[-1] = dHz[1], dHz[-2]
    drH[0], drH[-1] = drH[1], drH[-2]
    ext = lambda a: np.concatenate(([a[0]], 0.5 * (a[:-1] + a[1:]), [a[-1]]))
    rho_n, p_n = ext(rho), ext(p)
    sig_n = sig(rho_n, p_n)
    if np.any(sig_n <= 0):
        raise ZeroConductivity("conductivity must be positive", cell=int(np.argmax(sig_n <= 0)))
    Et = -st.r * rho_n * dHz / sig_n
    Ez = rho_n * drH / sig_n
    return Et, Ez, sig_n


def _fast_speed(st: GridState):
    cfg = st.cfg
    Hr2 = (cfg.A / st.rc) ** 2
    c2 = cfg.gamma * st.p / st.rho + (st.Htheta**2 + st.Hz**2 + Hr2) / st.rho
    return np.sqrt(c2)


def cfl_dt(st: GridState):
    """CFL-limited step from the cell width in r, Delta s/(r rho), and the fast speed."""
    width = st.ds / (st.rc * st.rho)
    dt = st.cfg.cfl * float(np.min(width / _fast_speed(st)))
    if st.cfg.finite:
        sig = sigma_fn(st.cfg)(st.rho, st.p)
        dt = min(dt, st.cfg.cfl * 0.5 * float(np.min(sig * width**2)))
    return dt


def _viscous_q(st: GridState):
    cfg = st.cfg
    if not cfg.viscosity:
        return np.zeros(st.N)
    du = np.diff(st.u)
    return np.where(du < 0, cfg.viscosity_coeff * st.rho * du**2, 0.0)


def accel(st: GridState):
    """u_t at nodes from the total-pressure and hoop-stress differences."""
    cfg = st.cfg
    N, ds = st.N, st.ds
    gh = ghosts(st)
    q = _viscous_q(st)
    gq = np.concatenate(([q[0]], q, [q[-1]]))
    r = st.r
    rc_ext = np.concatenate(([r[0]], st.rc, [r[-1]]))
    dist = np.full(N + 1, ds)
    dist[0] = dist[-1] = 0.5 * ds
    pL, pR = gh["p"][:-1] + gq[:-1], gh["p"][1:] + gq[1:]
    hL = (rc_ext[:-1] * gh["Htheta"][:-1]) ** 2
    hR = (rc_ext[1:] * gh["Htheta"][1:]) ** 2
    zL, zR = gh["Hz"][:-1] ** 2, gh["Hz"][1:] ** 2
    v2 = 0.5 * (gh["v"][:-1] ** 2 + gh["v"][1:] ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        du = v2 / r - (r * (pR - pL) + (hR - hL) / (2 * r) + r * (zR - zL) / 2) / dist
    if cfg.bc_left == "rigid":
        du[0] = 0.0
    if cfg.bc_right == "rigid":
        du[-1] = 0.0
    return du


def cell_rates(st: GridState, r_face, u_face):
    """Time derivatives of (b, c, m, w, theta, z, p or S).

    ``r_face``/``u_face`` are the node values used for (r u)_s and H^r, so the
    corrector can pass time-centred values that keep the mass balance exact.
    """
    cfg = st.cfg
    N, ds, A, g = st.N, st.ds, cfg.A, cfg.gamma
    q = _viscous_q(st)
    nv = node_values(st)
    div_ru = np.diff(r_face * u_face) / ds
    Hr_n = A / np.where(r_face > 0, r_face, 1.0)
    flux_b = nv["v"] * Hr_n
    flux_c = A * nv["w"]
    joule = np.zeros(N)
    if cfg.finite:
        Et, Ez, sig_n = compute_E(st)
        flux_b = flux_b + Ez
        flux_c = flux_c - r_face * Et
        e2 = sig_n * (Et**2 + Ez**2)
        joule = 0.5 * (e2[:-1] + e2[1:])
    db = np.diff(flux_b) / ds
    dc = np.diff(flux_c) / ds
    dm = A * np.diff(nv["rcH"]) / ds
    dw = A * np.diff(nv["Hz"]) / ds
    dtheta = st.v / st.rc
    dz = st.w.copy()
    if cfg.finite:
        dthermo = -g * st.rho * st.p * div_ru + (g - 1) * joule - (g - 1) * st.rho * q * div_ru
    else:
        dthermo = -(g - 1) * st.rho ** (1 - g) * q * div_ru
    return db, dc, dm, dw, dtheta, dz, dthermo


def _assemble(base: GridState, r, u, rates, dt, t):
    cfg = base.cfg
    db, dc, dm, dw, dth, dz, dthermo = rates
    rho = density_from_r(r, base.ds)
    if cfg.finite:
        p = base.p + dt * dthermo
        bad = ~(p > 0)
        if np.any(bad):
            raise NonPositivePressure("pressure became nonpositive", cell=int(np.argmax(bad)))
        S = p / rho**cfg.gamma
    else:
        S = base.S + dt * dthermo
        p = S * rho**cfg.gamma
    if np.any(~np.isfinite(u)):
        raise NonPositiveDensity("non-finite velocity", cell=int(np.argmax(~np.isfinite(u))))
    return GridState(t, base.s, r, u, rho, p, S, base.b + dt * db, base.c + dt * dc,
                     base.m + dt * dm, base.w + dt * dw, base.theta + dt * dth, base.z + dt * dz, cfg)


def step(st: GridState, dt: float, with_mid=False):
    """Two-stage predictor-corrector step.

    Predictor: half step for r (with u^n) and the cell variables.  Corrector:
    u^{n+1} from the half-step forces, r^{n+1} = r^n + dt (u^n + u^{n+1})/2
    (position Verlet for the r-u pair, stable for undamped waves) and the cell
    variables from half-step values with time-centred node data.
    """
    if dt < 0:
        raise InvalidConfig("negative time step")
    h = 0.5 * dt
    mid = _assemble(st, st.r + h * st.u, st.u, cell_rates(st, st.r, st.u), h, st.t + h)
    u_new = st.u + dt * accel(mid)
    r_new = st.r + dt * 0.5 * (st.u + u_new)
    rates = cell_rates(mid, 0.5 * (st.r + r_new), 0.5 * (st.u + u_new))
    new = _assemble(st, r_new, u_new, rates, dt, st.t + dt)
    return (new, mid) if with_mid else new


# ---------------------------------------------------------------------------
# driver and output


def edge_record(st: GridState, side):
    """Boundary node state used for flux bookkeeping (ghost closure for cell fields)."""
    j = 0 if side == "left" else -1
    nv = node_values(st)
    rec = {"t": st.t, "s": float(st.s[j]), "r": float(st.r[j]), "u": float(st.u[j])}
    for k in ("p", "Htheta", "Hz", "v", "w", "rho", "S", "theta", "z"):
        rec[k] = float(nv[k][j])
    if st.cfg.finite:
        Et, Ez, _ = compute_E(st)
        rec["Etheta"], rec["Ez"] = float(Et[j]), float(Ez[j])
    return rec


def average_edge(a, b, dt):
    """Step-averaged boundary state: mean values, with u replaced by the exact r displacement rate."""
    out = {k: 0.5 * (a[k] + b[k]) for k in a}
    if dt > 0:
        out["u"] = (b["r"] - a["r"]) / dt
    return out


def run(cfg: RunConfig, progress=None) -> TimeSeries:
    import time

    t0 = time.perf_counter()
    st = init_grid(cfg)
    cfg = st.cfg
    snaps, dts, bnd = [st], [], []
    n = 0
    while True:
        if cfg.max_steps is not None and n >= cfg.max_steps:
            break
        if cfg.t_end is not None and st.t >= cfg.t_end * (1 - 1e-14):
            break
        dt = cfl_dt(st)
        if cfg.t_end is not None:
            dt = min(dt, cfg.t_end - st.t)
        if dt <= 0:
            break
        new = step(st, dt)
        bnd.append((dt, average_edge(edge_record(st, "left"), edge_record(new, "left"), dt),
                     average_edge(edge_record(st, "right"), edge_record(new, "right"), dt)))
        st = new
        n += 1
        dts.append(dt)
        if n % cfg.output_every == 0:
            snaps.append(st)
        if progress:
            progress(n, st)
    if snaps[-1] is not st:
        snaps.append(st)
    return TimeSeries(cfg, snaps, dts, bnd, time.perf_counter() - t0)


def snapshot_rows(series: TimeSeries):
    """One row per (time, cell) with node values of the cell's left node."""
    for k, st in enumerate(series.snapshots):
        cells = st.cells()
        for i in range(st.N):
            row = {"snapshot": k, "t": st.t, "cell": i, "s_node": st.s[i], "r_node": st.r[i], "u_node": st.u[i]}
            for name in CELL_FIELDS:
                row[name] = cells[name][i]
            yield row


def write_csv(series: TimeSeries, fh):
    rows = snapshot_rows(series)
    first = next(rows)
    w = csv.DictWriter(fh, fieldnames=list(first), lineterminator="\n")
    w.writeheader()
    fmt = lambda row: {k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()}
    w.writerow(fmt(first))
    for row in rows:
        w.writerow(fmt(row))


def state_to_dict(st: GridState):
    d = {"t": st.t}
    for k in ("s", "r", "u", "rho", "p", "S", "b", "c", "m", "w", "theta", "z"):
        d[k] = [float(x) for x in getattr(st, k)]
    return d


def state_from_dict(d, cfg: RunConfig):
    arr = {k: np.asarray(d[k], dtype=float) for k in ("s", "r", "u", "rho", "p", "S", "b", "c", "m", "w", "theta", "z")}
    return GridState(float(d["t"]), cfg=cfg, **arr)


def write_jsonl(series: TimeSeries, fh):
    """Line-delimited snapshots, followed by the per-step boundary log."""
    for st in series.snapshots:
        fh.write(json.dumps({"type": "snapshot", **state_to_dict(st)}) + "\n")
    for dt, left, right in series.boundary:
        fh.write(json.dumps({"type": "step", "dt": dt, "left": left, "right": right}) + "\n")


def read_jsonl(fh, cfg: RunConfig) -> TimeSeries:
    cfg = init_grid(cfg).cfg
    snaps, bnd = [], []
    for ln, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"snapshot file line {ln}: {exc}") from exc
        kind = rec.get("type")
        if kind == "snapshot":
            st = state_from_dict(rec, cfg)
            if st.N != cfg.N:
                raise InvalidConfig(f"snapshot file line {ln}: {st.N} cells, config says {cfg.N}")
            snaps.append(st)
        elif kind == "step":
            bnd.append((rec["dt"], rec["left"], rec["right"]))
        else:
            raise InvalidConfig(f"snapshot file line {ln}: unknown record type {kind!r}")
    if not snaps:
        raise InvalidConfig("snapshot file has no snapshots")
    return TimeSeries(cfg, snaps, [b[0] for b in bnd], bnd)


def summary(series: TimeSeries):
    return {"steps": len(series.dts), "t_final": series.final.t,
            "dt_min": min(series.dts) if series.dts else 0.0, "wall_seconds": round(series.wall, 3),
            "snapshots": len(series.snapshots)}


def pulse_config(N=200, steps=1000, t_end=None, conductivity="infinite", C=1.0, gamma_=1.4, **kw):
    """The smooth adiabatic pulse used for conservation checks."""
    regime = ms.INFINITE_A0 if conductivity == "infinite" else ms.FINITE_A0
    prof = (("rho", "1 + 0.1*exp(-(s - 0.5)^2/0.1^2)"), ("S", "1"), ("Htheta_over_rrho", "0.3"),
            ("Hz_over_rho", "0.2"), ("v", "0"), ("u", "0"))
    return RunConfig(regime=regime, gamma=gamma_, conductivity=conductivity, C=C, N=N, s_extent=(0.0, 1.0),
                     r_inner=1.0, cfl=0.4, t_end=t_end, max_steps=steps if t_end is None else None,
                     profiles=prof, **kw)


def l1_restrict(fine: np.ndarray):
    """Coarsen cell densities by averaging specific volume over pairs (mass-consistent)."""
    vol = 1.0 / fine
    return 1.0 / (0.5 * (vol[0::2] + vol[1::2]))


def self_convergence_order(cfgs_runs):
    """Order from three runs at N, 2N, 4N (final rho, L1 with cell restriction)."""
    r1, r2, r4 = (s.final.rho for s in cfgs_runs)
    e1 = np.mean(np.abs(r1 - l1_restrict(r2)))
    e2 = np.mean(np.abs(r2 - l1_restrict(r4)))
    return math.log2(e1 / e2), e1, e2


def to_csv_text(series):
    buf = io.StringIO()
    write_csv(series, buf)
    return buf.getvalue()
