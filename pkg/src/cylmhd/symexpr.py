"""Jet-space expression engine on top of sympy.

Fields and their formal derivatives are plain sympy symbols whose names encode
the derivative orders (``u_t``, ``u_ts``, ``rho_ss``).  Two coordinate systems
are supported: mass Lagrangian ``(t, s)`` with suffix letters ``t``/``s`` and
Eulerian ``(t, r)`` with suffix letters ``T``/``R``.  Undifferentiated fields
share one symbol in both systems.

Arbitrary functions (``sigma(rho, p)``, profiles ``S(s)``, generator functions
``f1(s, r*v)``) are :class:`OpaqueFunction` applications.  Each partial
derivative is its own flat node carrying an order vector, e.g.
``sigma__1_0(rho, p)`` for the rho-partial.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from functools import reduce as _fold

import numpy as np
import sympy as sp

from .errors import (
    CyclicRules,
    DomainError,
    ExponentError,
    InconclusiveZeroTest,
    JetOrderError,
    ParseError,
    UnboundSymbol,
)

MAX_ORDER = 3

ZERO_TOL = 1e-9
INCONCLUSIVE_TOL = 1e-6
SAMPLE_POINTS = 200
SAMPLE_LOW, SAMPLE_HIGH = 0.2, 2.0
DENOM_GUARD = 1e-6

FIELD_BASES = frozenset(
    "u v w rho p S Htheta Hz Etheta Ez r theta z phi psi chi F G R Stilde sig".split()
)

t, s, r = sp.symbols("t s r")

CONSTANT_NAMES = (
    "gamma A C alpha beta q q1 q2 q3 q4 S0 F0 G0 R0 k1 k2 k3 k4 k5 k6 k7 k8 a1 a2 a3 a4 a5 a6"
).split()
gamma, A, C, alpha, beta = sp.symbols("gamma A C alpha beta")
q, q1, q2, q3, q4 = sp.symbols("q q1 q2 q3 q4")
S0, F0, G0, R0 = sp.symbols("S0 F0 G0 R0")


@dataclass(frozen=True)
class JetSpace:
    name: str
    indep: tuple
    letters: tuple
    fields: frozenset


LAG = JetSpace("lagrangian", ("t", "s"), ("t", "s"), FIELD_BASES)
EUL = JetSpace("eulerian", ("t", "r"), ("T", "R"), (FIELD_BASES - {"r"}) | {"s"})

_AXES = {"t": (LAG, 0), "s": (LAG, 1), "T": (EUL, 0), "R": (EUL, 1)}


@dataclass(frozen=True)
class JetVar:
    base: str
    nt: int = 0
    ns: int = 0
    space: JetSpace = LAG

    @property
    def order(self):
        return self.nt + self.ns

    @property
    def name(self):
        if self.nt == 0 and self.ns == 0:
            return self.base
        a, b = self.space.letters
        return f"{self.base}_{a * self.nt}{b * self.ns}"

    @property
    def symbol(self):
        return sp.Symbol(self.name)

    def shifted(self, axis):
        nt, ns = (self.nt + 1, self.ns) if axis == 0 else (self.nt, self.ns + 1)
        if nt + ns > MAX_ORDER:
            raise JetOrderError(f"jet order {nt + ns} of {self.base} exceeds the cap {MAX_ORDER}")
        return JetVar(self.base, nt, ns, self.space)


def jet(base, nt=0, ns=0, space=LAG):
    """Symbol for ``base`` differentiated ``nt`` times in t and ``ns`` times in s (or r)."""
    if base not in space.fields:
        raise ValueError(f"unknown field {base!r} in {space.name} space")
    if nt + ns > MAX_ORDER:
        raise JetOrderError(f"jet order {nt + ns} exceeds the cap {MAX_ORDER}")
    return JetVar(base, nt, ns, space).symbol


_JET_CACHE: dict = {}


def jet_info(sym, space=LAG):
    """Decode a symbol into a JetVar of ``space``; None if it is not a field there."""
    key = (sym, space.name)
    if key in _JET_CACHE:
        return _JET_CACHE[key]
    info = None
    if isinstance(sym, sp.Symbol):
        name = sym.name
        if name in space.fields:
            info = JetVar(name, 0, 0, space)
        elif "_" in name:
            base, suffix = name.rsplit("_", 1)
            a, b = space.letters
            m = re.fullmatch(f"({a}*)({b}*)", suffix)
            if base in space.fields and m and suffix:
                info = JetVar(base, len(m.group(1)), len(m.group(2)), space)
    _JET_CACHE[key] = info
    return info


def is_jet(sym, space=None):
    spaces = (LAG, EUL) if space is None else (space,)
    return any(jet_info(sym, sp_) is not None for sp_ in spaces)


def fields(names, space=LAG):
    return [jet(n, space=space) for n in names.split()]


# ---------------------------------------------------------------------------
# opaque functions


class OpaqueFunction(sp.Function):
    """Arbitrary smooth function; ``orders`` records the partial derivative taken."""

    opaque_name = "f"
    orders: tuple = ()

    @classmethod
    def eval(cls, *args):
        return None

    def fdiff(self, argindex=1):
        orders = list(self.orders)
        orders[argindex - 1] += 1
        return opaque(self.opaque_name, len(orders), orders)(*self.args)


_OPAQUE: dict = {}


def opaque(name, nargs, orders=None):
    """Return the (cached) function class for ``name`` with the given partial orders."""
    orders = tuple(int(o) for o in orders) if orders is not None else (0,) * nargs
    if len(orders) != nargs:
        raise ValueError("order vector length must equal the number of arguments")
    key = (name, orders)
    cls = _OPAQUE.get(key)
    if cls is None:
        clsname = name if not any(orders) else name + "__" + "_".join(map(str, orders))
        cls = type(clsname, (OpaqueFunction,), {"opaque_name": name, "orders": orders, "nargs": nargs})
        _OPAQUE[key] = cls
    return cls


def fn(name, *args):
    """Apply the opaque function ``name`` to ``args``."""
    return opaque(name, len(args))(*map(sp.sympify, args))


def opaque_atoms(e):
    return {a for a in sp.sympify(e).atoms(sp.Function) if isinstance(a, OpaqueFunction)}


# ---------------------------------------------------------------------------
# differentiation


def _axis(wrt, space=None):
    if wrt not in _AXES:
        raise ValueError(f"unknown differentiation direction {wrt!r}")
    sp_, axis = _AXES[wrt]
    return (space or sp_), axis


def total_derivative(e, wrt, canonical=True):
    """D_t / D_s (Lagrangian) or D_T / D_R (Eulerian) of ``e``."""
    e = sp.sympify(e)
    space, axis = _axis(wrt)
    out = _total(e, space, axis)
    return canonicalize(out) if canonical else out


def _total(e, space, axis):
    indep = sp.Symbol(space.indep[axis])
    terms = [sp.diff(e, indep)]
    for sym in e.free_symbols:
        info = jet_info(sym, space)
        if info is None:
            continue
        d = sp.diff(e, sym)
        if d != 0:
            terms.append(d * info.shifted(axis).symbol)
    return sp.Add(*terms)


def Dt(e):
    return _total(sp.sympify(e), LAG, 0)


def Ds(e):
    return _total(sp.sympify(e), LAG, 1)


# ---------------------------------------------------------------------------
# exponent handling and canonical form

_DUMMY_PREFIX = "_Z"


def _variable_symbol(sym):
    return sym in (t, s, r) or is_jet(sym) or sym.name.startswith(_DUMMY_PREFIX)


def check_exponents(e):
    """Reject exponents that depend on fields or independent variables."""
    for p in sp.sympify(e).atoms(sp.Pow):
        bad = [x for x in p.exp.free_symbols if _variable_symbol(x)]
        if bad:
            raise ExponentError(f"exponent {p.exp} depends on {bad}")
    return e


def _split_exponent(ex):
    n, rest = sp.sympify(ex).as_coeff_Add()
    parts = []
    for term in sp.Add.make_args(rest):
        if term == 0:
            continue
        k, m = term.as_coeff_Mul()
        parts.append((sp.Rational(k), m))
    return sp.Rational(n) if n.is_Rational else None, parts


def _dummyize(e):
    """Replace symbolic powers b^(n + k*m) by b^n * Z^(kL) with Z = b^(m/L).

    Returns the rewritten expression and the back-substitution map.  Plain
    rational exponents are left alone.
    """
    pows = []
    for p in e.atoms(sp.Pow, sp.exp):
        b, ex = p.as_base_exp()
        if ex.is_Number:
            continue
        pows.append((p, b, ex))
    if not pows:
        return e, {}
    denoms: dict = {}
    split = {}
    for p, b, ex in pows:
        n, parts = _split_exponent(ex)
        if n is None:
            n, parts = sp.Integer(0), [(sp.Integer(1), ex)]
        split[p] = (b, n, parts)
        for k, m in parts:
            key = (b, m)
            denoms[key] = sp.ilcm(denoms.get(key, 1), k.q)
    zsym = {}
    back = {}
    for i, (key, L) in enumerate(sorted(denoms.items(), key=lambda kv: sp.default_sort_key(kv[0]))):
        z = sp.Symbol(f"{_DUMMY_PREFIX}{i}")
        zsym[key] = (z, L)
        b, m = key
        back[z] = sp.Pow(b, m / L) if b is not sp.E else sp.exp(m / L)
    mapping = {}
    for p, (b, n, parts) in split.items():
        factors = [sp.Pow(b, n) if b is not sp.E else sp.exp(n)]
        for k, m in parts:
            z, L = zsym[(b, m)]
            factors.append(z ** int(k * L))
        mapping[p] = sp.Mul(*factors)
    # inner powers (inside function arguments) are rewritten as well
    out = e.xreplace(mapping)
    return out, back


def _prepare(e):
    e = sp.sympify(e)
    e = sp.expand_power_base(e, force=True)
    return _dummyize(e)


def canonicalize(e):
    """Normal form: one fraction of expanded, gcd-reduced polynomials.

    Symbolic powers are expanded with x^(a+b) = x^a x^b before normalization,
    so rho*rho^(gamma-1) becomes rho^gamma.
    """
    e = sp.sympify(e)
    if e.is_Number:
        return e
    check_exponents(e)
    ed, back = _prepare(e)
    c = sp.cancel(ed)
    num, den = sp.fraction(c)
    num, den = sp.expand(num), sp.expand(den)
    out = num / den
    return out.xreplace(back) if back else out


def _variable_factor(f):
    if isinstance(f, OpaqueFunction):
        return True
    return any(_variable_symbol(x) for x in f.free_symbols) or bool(opaque_atoms(f))


def _fast_zero(ed):
    """Expand and merge terms by their variable monomial; None if undecided."""
    ex = sp.expand(ed)
    if ex == 0:
        return True, ex
    groups: dict = {}
    for term in sp.Add.make_args(ex):
        const, var = [], []
        for f in sp.Mul.make_args(term):
            (var if _variable_factor(f) else const).append(f)
        key = sp.Mul(*var)
        groups.setdefault(key, []).append(sp.Mul(*const))
    for key, coeffs in groups.items():
        c = sp.Add(*coeffs)
        if c == 0:
            continue
        if sp.cancel(sp.together(c)) != 0:
            return None, ex
    return True, ex


@dataclass
class ZeroTestResult:
    is_zero: bool
    method: str
    residual: float


def zero_test(e, system=None, numeric=True, rng_seed=None, space=LAG):
    """Two-stage zero test of ``e`` on the manifold of ``system`` (or unconstrained)."""
    e = sp.sympify(e)
    if system is not None:
        e = reducer_for(system, space).reduce(e)
    if e == 0:
        return ZeroTestResult(True, "symbolic", 0.0)
    ed, back = _prepare(e)
    ok, ex = _fast_zero(ed)
    if ok:
        return ZeroTestResult(True, "symbolic", 0.0)
    num = sp.together(ed).as_numer_denom()[0]
    if sp.expand(num) == 0:
        return ZeroTestResult(True, "symbolic", 0.0)
    if not numeric:
        return ZeroTestResult(False, "symbolic", float("nan"))
    terms = [x.xreplace(back) for x in sp.Add.make_args(ex)] if back else list(sp.Add.make_args(ex))
    res = numeric_residual(terms, rng_seed=rng_seed)
    if res <= ZERO_TOL:
        return ZeroTestResult(True, "numeric", res)
    if res < INCONCLUSIVE_TOL:
        raise InconclusiveZeroTest(res)
    return ZeroTestResult(False, "numeric", res)


def is_zero_on_manifold(e, system=None, space=LAG):
    return zero_test(e, system, space=space).is_zero


def is_zero(e):
    return zero_test(e).is_zero


# ---------------------------------------------------------------------------
# numeric sampling


def default_seed():
    return int(os.environ.get("CYLMHD_SEED", "0"))


_SEED_OVERRIDE = [None]


def set_seed(seed):
    _SEED_OVERRIDE[0] = seed


def _seed(rng_seed):
    if rng_seed is not None:
        return rng_seed
    if _SEED_OVERRIDE[0] is not None:
        return _SEED_OVERRIDE[0]
    return default_seed()


def _freeze_functions(exprs):
    """Replace every opaque application by a fresh symbol (values sampled independently)."""
    apps = set()
    for e in exprs:
        apps |= opaque_atoms(e)
    # outermost applications first so nested ones disappear with them
    mapping = {}
    for i, a in enumerate(sorted(apps, key=lambda a: (-sp.count_ops(a), sp.default_sort_key(a)))):
        mapping[a] = sp.Symbol(f"_F{i}")
    if not mapping:
        return list(exprs)
    return [e.xreplace(mapping) for e in exprs]


def numeric_residual(terms, n=SAMPLE_POINTS, rng_seed=None):
    """max over sample points of |sum(terms)| / sum(|terms|)."""
    terms = _freeze_functions([sp.sympify(x) for x in terms])
    syms = sorted(set().union(*[x.free_symbols for x in terms]), key=lambda x: x.name)
    dens = set()
    for x in terms:
        d = sp.denom(x)
        if d != 1:
            dens.add(d)
    rng = np.random.default_rng(_seed(rng_seed))
    vals = rng.uniform(SAMPLE_LOW, SAMPLE_HIGH, size=(len(syms), 4 * n))
    ok = np.ones(4 * n, dtype=bool)
    if dens and syms:
        fden = sp.lambdify(syms, list(dens), "numpy")
        with np.errstate(all="ignore"):
            for dv in fden(*vals):
                ok &= np.abs(np.broadcast_to(np.asarray(dv, dtype=float), ok.shape)) > DENOM_GUARD
    vals = vals[:, ok][:, :n]
    if vals.shape[1] < n:
        raise InconclusiveZeroTest(float("nan"), "too many samples rejected near denominator zeros")
    f = sp.lambdify(syms, terms, "numpy")
    with np.errstate(all="ignore"):
        tv = np.array([np.broadcast_to(np.asarray(x, dtype=float), (n,)) for x in f(*vals)])
    total = np.abs(tv.sum(axis=0))
    scale = np.abs(tv).sum(axis=0)
    rel = total / np.maximum(scale, 1e-300)
    if not np.all(np.isfinite(rel)):
        return float("inf")
    return float(rel.max())


# ---------------------------------------------------------------------------
# substitution / reduction


def _as_jet_rules(rules, space):
    out = {}
    for k, v in rules.items():
        key = sp.Symbol(k) if isinstance(k, str) else (k.symbol if isinstance(k, JetVar) else k)
        info = jet_info(key, space)
        if info is None:
            raise ValueError(f"rule key {key} is not a jet variable")
        out[info] = sp.sympify(v)
    return out


class Reducer:
    """Replaces principal derivatives (rule keys and their derivatives) recursively."""

    def __init__(self, rules, space=LAG):
        self.space = space
        self.rules = _as_jet_rules(rules, space)
        self._by_base: dict = {}
        for info, rhs in self.rules.items():
            self._by_base.setdefault(info.base, []).append((info, rhs))
        self._cache: dict = {}
        self._check_cycles()

    def key_for(self, info):
        best = None
        for kinfo, rhs in self._by_base.get(info.base, ()):
            if kinfo.nt <= info.nt and kinfo.ns <= info.ns:
                rank = (kinfo.order, kinfo.nt)
                if best is None or rank > best[0]:
                    best = (rank, kinfo, rhs)
        return None if best is None else best[1:]

    def _check_cycles(self):
        graph = {}
        for info, rhs in self.rules.items():
            deps = set()
            for sym in rhs.free_symbols:
                j = jet_info(sym, self.space)
                if j is None:
                    continue
                k = self.key_for(j)
                if k is not None:
                    deps.add(k[0])
            graph[info] = deps
        state = {}

        def visit(node):
            state[node] = 1
            for nxt in graph.get(node, ()):
                if state.get(nxt) == 1:
                    raise CyclicRules(f"cyclic rules through {node.name} -> {nxt.name}")
                if state.get(nxt) is None:
                    visit(nxt)
            state[node] = 2

        for node in graph:
            if state.get(node) is None:
                visit(node)

    def value(self, info):
        if info in self._cache:
            return self._cache[info]
        found = self.key_for(info)
        if found is None:
            return None
        kinfo, rhs = found
        if kinfo == info:
            val = self.reduce(rhs)
        else:
            if info.ns > kinfo.ns:
                parent, axis = JetVar(info.base, info.nt, info.ns - 1, self.space), 1
            else:
                parent, axis = JetVar(info.base, info.nt - 1, info.ns, self.space), 0
            val = self.reduce(_total(self.value(parent), self.space, axis))
        self._cache[info] = val
        return val

    def reduce(self, e):
        e = sp.sympify(e)
        for _ in range(64):
            subs = {}
            for sym in e.free_symbols:
                info = jet_info(sym, self.space)
                if info is None:
                    continue
                v = self.value(info)
                if v is not None:
                    subs[sym] = v
            if not subs:
                return e
            e = e.xreplace(subs)
        raise CyclicRules("reduction did not terminate")


def substitute(e, rules, space=LAG):
    """Simultaneous substitution of solved-form rules (derivatives of keys included)."""
    if not rules:
        return sp.sympify(e)
    return canonicalize(Reducer(rules, space).reduce(e))


_REDUCERS: dict = {}


def reducer_for(system, space=LAG):
    if isinstance(system, Reducer):
        return system
    if isinstance(system, dict):
        return Reducer(system, space)
    key = id(system)
    red = _REDUCERS.get(key)
    if red is None or red[0] is not system:
        red = (system, Reducer(system.rules(), space))
        _REDUCERS[key] = red
    return red[1]


# ---------------------------------------------------------------------------
# numeric evaluation

_REGISTERED: dict = {}


def register_function(name, func):
    """Register ``func(orders, *args) -> float`` as the numeric model of opaque ``name``."""
    _REGISTERED[name] = func


def eval_numeric(e, point, functions=None):
    """Evaluate ``e`` in IEEE double precision at ``point`` (symbol or name -> float)."""
    env = {}
    for k, v in point.items():
        env[k if isinstance(k, str) else k.name] = float(v)
    funcs = dict(_REGISTERED)
    if functions:
        funcs.update(functions)
    return _ev(sp.sympify(e), env, funcs)


def _ev(e, env, funcs):
    if e.is_Number:
        return float(e)
    if e.is_Symbol:
        if e.name not in env:
            raise UnboundSymbol(e.name)
        return env[e.name]
    if e is sp.E:
        return math.e
    if e is sp.pi:
        return math.pi
    if e.is_Add:
        return math.fsum(_ev(a, env, funcs) for a in e.args)
    if e.is_Mul:
        return _fold(lambda x, y: x * y, (_ev(a, env, funcs) for a in e.args), 1.0)
    if e.is_Pow:
        b = _ev(e.base, env, funcs)
        x = _ev(e.exp, env, funcs)
        if b == 0.0 and x < 0:
            raise DomainError("division by zero")
        if b < 0 and not float(x).is_integer():
            raise DomainError(f"negative base {b} with non-integer exponent {x}")
        return b ** x
    if isinstance(e, sp.exp):
        return math.exp(_ev(e.args[0], env, funcs))
    if isinstance(e, sp.log):
        a = _ev(e.args[0], env, funcs)
        if a <= 0:
            raise DomainError("log of nonpositive value")
        return math.log(a)
    if isinstance(e, OpaqueFunction):
        f = funcs.get(e.opaque_name)
        if f is None:
            raise UnboundSymbol(f"no numeric model registered for {e.opaque_name}")
        return float(f(e.orders, *[_ev(a, env, funcs) for a in e.args]))
    raise DomainError(f"cannot evaluate node {type(e).__name__}")


# ---------------------------------------------------------------------------
# text format

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_BUILTINS = {"exp": sp.exp, "sqrt": sp.sqrt, "log": sp.log, "E": sp.E}


def to_text(e):
    return sp.sstr(sp.sympify(e)).replace("**", "^")


def parse(text):
    """Parse infix text (``^`` for powers, ``name(args)`` for opaque functions)."""
    local = {}
    for m in _IDENT.finditer(text):
        name = m.group(0)
        follows = text[m.end():].lstrip()[:1]
        if name in _BUILTINS:
            local[name] = _BUILTINS[name]
        elif follows == "(":
            local[name] = _opaque_factory(name)
        else:
            local[name] = sp.Symbol(name)
    try:
        e = sp.parse_expr(text.replace("^", "**"), local_dict=local, global_dict={"Integer": sp.Integer,
                          "Rational": sp.Rational, "Float": sp.Float, "Symbol": sp.Symbol})
    except Exception as exc:  # sympy raises a zoo of types here
        raise ParseError(f"cannot parse {text!r}: {exc}") from exc
    check_exponents(e)
    return e


def _opaque_factory(token):
    m = re.fullmatch(r"(.+?)__(\d+(?:_\d+)*)", token)
    name, orders = (m.group(1), tuple(int(x) for x in m.group(2).split("_"))) if m else (token, None)

    def make(*args):
        o = orders if orders is not None else (0,) * len(args)
        return opaque(name, len(args), o)(*args)

    return make
