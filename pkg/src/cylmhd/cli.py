"""Command-line front end: ``cylmhd verify | simulate | audit | list``."""

from __future__ import annotations

import argparse
import configparser
import fnmatch
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import lagsolver as ls
from . import mhd_systems as ms
from .errors import CylmhdError, InvalidConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# ---------------------------------------------------------------------------
# check registry


def all_checks():
    """Every symbolic check of the package, keyed by id."""
    from . import claw_audit, liecheck, noether

    out = {}
    for mod in (liecheck, noether, claw_audit):
        for cid, spec in mod.checks().items():
            if cid in out:
                raise RuntimeError(f"duplicate check id {cid}")
            out[cid] = spec
    return out


def select(ids, patterns):
    """Ids matching any of the shell-style ``patterns``, in registry order."""
    return [i for i in ids if any(fnmatch.fnmatchcase(i, p) for p in patterns)]


_REGISTRY = {}


def _init_worker(seed, tolerance):
    from . import symexpr

    if seed is not None:
        symexpr.set_seed(seed)
    if tolerance is not None:
        symexpr.ZERO_TOL = tolerance


def run_check(cid):
    """Evaluate one check by id (worker entry point)."""
    from .liecheck import evaluate

    if not _REGISTRY:
        _REGISTRY.update(all_checks())
    res = evaluate(_REGISTRY[cid])
    return res.as_dict(), res.detail


def effective_seed(flag):
    env = os.environ.get("CYLMHD_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise InvalidConfig(f"CYLMHD_SEED must be an integer, got {env!r}") from None
    return flag


# ---------------------------------------------------------------------------
# configuration

RUN_KEYS = {
    "regime": str, "gamma": float, "A": float, "conductivity": str, "C": float, "sigma_expr": str,
    "N": int, "s_min": float, "s_max": float, "r_inner": float, "cfl": float, "t_end": float,
    "max_steps": int, "bc_left": str, "bc_right": str, "p_ext_left": float, "p_ext_right": float,
    "viscosity": bool, "viscosity_coeff": float, "output_every": int,
}
PROFILE_KEYS = {"rho", "p", "S", "u", "v", "w", "Htheta", "Htheta_over_rrho", "Hz", "Hz_over_rho", "theta", "z"}
SECTIONS = ("run", "profiles")


def _line_of(text, section, key=None):
    """1-based line of ``[section]`` (or of ``key`` inside it) in INI text, 0 if not found."""
    cur = None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            cur = s[1:-1].strip()
            if key is None and cur == section:
                return n
            continue
        if cur == section and key is not None and s.split("=", 1)[0].split(":", 1)[0].strip() == key:
            return n
    return 0


def _convert(key, kind, raw, where):
    try:
        if kind is bool:
            if isinstance(raw, bool):
                return raw
            low = str(raw).strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is int and isinstance(raw, float) and not raw.is_integer():
            raise ValueError(raw)
        return kind(raw)
    except (TypeError, ValueError):
        raise InvalidConfig(f"{where}: {key} = {raw!r} is not a valid {kind.__name__}") from None


def parse_config(path):
    """Read an INI (or JSON) run configuration into a validated RunConfig."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc.strerror}") from None
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}:{exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise InvalidConfig(f"{path}: top level must be an object")
        where = lambda sec, key=None: f"{path} [{sec}]" + (f" {key}" if key else "")
    else:
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        cp.optionxform = str
        try:
            cp.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise InvalidConfig(f"{path}: {exc}") from None
        data = {sec: dict(cp[sec]) for sec in cp.sections()}
        where = lambda sec, key=None: f"{path}:{_line_of(text, sec, key)}"
    for sec in data:
        if sec not in SECTIONS:
            raise InvalidConfig(f"{where(sec)}: unknown section [{sec}]")
    run = data.get("run", {})
    prof = data.get("profiles", {})
    if not isinstance(run, dict) or not isinstance(prof, dict):
        raise InvalidConfig(f"{path}: sections must be key-value tables")
    kw = {}
    for key, raw in run.items():
        if key not in RUN_KEYS:
            raise InvalidConfig(f"{where('run', key)}: unknown key {key!r}")
        kw[key] = _convert(key, RUN_KEYS[key], raw, where("run", key))
    for key in prof:
        if key not in PROFILE_KEYS:
            raise InvalidConfig(f"{where('profiles', key)}: unknown profile {key!r}")
    regime = ms.Regime.parse(kw.pop("regime", "infinite-A0"))
    s_ext = (kw.pop("s_min", 0.0), kw.pop("s_max", 1.0))
    profiles = tuple(sorted((k, str(v)) for k, v in prof.items()))
    try:
        cfg = ls.RunConfig(regime=regime, s_extent=s_ext, profiles=profiles, **kw)
        ls.init_grid(cfg)  # validates the profiles before anything runs
    except CylmhdError as exc:
        raise InvalidConfig(f"{path}: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# commands


def _emit(lines, out_path):
    fh = open(out_path, "w") if out_path else None
    try:
        for line in lines:
            print(line, flush=True)
            if fh:
                fh.write(line + "\n")
    finally:
        if fh:
            fh.close()


def cmd_list(args):
    ids = list(all_checks())
    if args.patterns:
        ids = select(ids, args.patterns)
    for i in ids:
        print(i)
    return EXIT_OK


def cmd_verify(args):
    seed = effective_seed(args.seed)
    registry = all_checks()
    ids = select(list(registry), args.patterns or ["*"])
    if not ids:
        print(f"no check matches {' '.join(args.patterns)}", file=sys.stderr)
        return EXIT_USAGE
    _init_worker(seed, args.tolerance)
    _REGISTRY.update(registry)
    if args.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(args.jobs, initializer=_init_worker, initargs=(seed, args.tolerance)) as pool:
            results = list(pool.map(run_check, ids))
    else:
        results = [run_check(i) for i in ids]
    lines = [json.dumps(r) for r, _ in results]
    _emit(lines, args.out)
    bad = [(r["id"], r["status"], detail) for r, detail in results if r["status"] != "pass"]
    for cid, status, detail in bad:
        print(f"{status}: {cid}" + (f" ({detail})" if detail else ""), file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_simulate(args):
    cfg = parse_config(args.config)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    series = ls.run(cfg)
    with open(out / "snapshots.csv", "w") as fh:
        ls.write_csv(series, fh)
    with open(out / "snapshots.jsonl", "w") as fh:
        ls.write_jsonl(series, fh)
    print(json.dumps(ls.summary(series)))
    return EXIT_OK


def cmd_audit(args):
    from . import claw_audit as ca

    cfg = parse_config(args.config)
    laws = ca.catalog(cfg.regime, cfg.conductivity, cfg.gamma)
    with open(args.snapshots) as fh:
        series = ls.read_jsonl(fh, cfg)
    # laws of this regime that need another sigma model are listed as excluded
    extra = [x for x in ca.catalog(cfg.regime, "C_rho") if x.conductivity and x.conductivity != cfg.conductivity]
    report = ca.discrete_audit(laws + extra, series, strict=False)
    doc = report.as_dict()
    doc["tolerance"] = args.tolerance
    if args.compare:
        ccfg = parse_config(args.compare_config or args.config)
        with open(args.compare) as fh:
            fine = ls.read_jsonl(fh, ccfg)
        doc["convergence"] = ca.convergence_ratios(report, ca.discrete_audit(laws, fine, strict=False))
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    if args.series_csv:
        with open(args.series_csv, "w") as fh:
            fh.write("law,t,integral,flux_corrected\n")
            for e in report.entries:
                for t, I, Ic in e.history:
                    fh.write(f"{e.law},{t!r},{I!r},{Ic!r}\n")
    bad = [e.law for e in report.entries if not e.globalDrift <= args.tolerance]
    for name in bad:
        print(f"drift above tolerance: {name}", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="cylmhd", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tol_default):
        p.add_argument("--config", help="run configuration (INI with [run]/[profiles], or JSON)")
        p.add_argument("--out", help="output file (verify, audit) or directory (simulate)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--seed", type=int, default=None, help="sampling seed (CYLMHD_SEED wins)")
        p.add_argument("--tolerance", type=float, default=tol_default)

    p = sub.add_parser("verify", help="run symbolic checks matching the patterns")
    p.add_argument("patterns", nargs="*")
    common(p, None)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("simulate", help="run the Lagrangian solver")
    common(p, None)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("audit", help="drift report of the conservation laws on a run")
    common(p, 1e-3)
    p.add_argument("--snapshots", required=True, help="snapshots.jsonl written by simulate")
    p.add_argument("--compare", help="snapshots of a refined run, for convergence ratios")
    p.add_argument("--compare-config", help="config of the refined run (default: --config)")
    p.add_argument("--series-csv", help="write per-law integrals over time as CSV")
    p.set_defaults(func=cmd_audit)
    p = sub.add_parser("list", help="list check ids")
    p.add_argument("patterns", nargs="*")
    common(p, None)
    p.set_defaults(func=cmd_list)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command in ("simulate", "audit") and not args.config:
        print(f"{args.command} needs --config", file=sys.stderr)
        return EXIT_USAGE
    if args.jobs < 1:
        print("--jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CylmhdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
