"""Command line front end: quarttrace {spectrum|trace|diagnose} --config FILE.

Exit codes: 0 success, 1 numerical-check failure, 2 configuration error.
CSV and JSON reports are deterministic for a given config and version; the
run manifest (manifest.json) additionally records wall time.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import charfun as cf
from .asymptotics import l03_closed_count, root_drift, staircase
from .errors import ConfigError, NumericalError, QuarttraceError
from .model import FAMILIES, Family, RunConfig, load_config, require_valid_potential
from .norming import norm_closed, normalize_all
from .parallel import ordered_map
from .roots import complex_diag_exclusion, find_spectrum, imaginary_twin_check
from .trace import POLE_FAMILIES, chain_compare, residue_limit_oracle

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2
RESIDUE_SEED = 5  # fixed, so diagnose output is reproducible


# --- output helpers -----------------------------------------------------------------

def write_csv(path: Path, rows: list[dict], fields: list[str] | None = None):
    fields = fields or (list(rows[0]) if rows else [])
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


class RunManifest:
    """Config hash, version, command, wall time, stage status and outputs."""

    def __init__(self, command: str, config_path: str):
        self.command = command
        self.config_path = config_path
        try:
            self.config_hash = hashlib.sha256(Path(config_path).read_bytes()).hexdigest()
        except OSError:
            self.config_hash = None
        self.stages: dict[str, str] = {}
        self.outputs: list[str] = []
        self._t0 = time.perf_counter()

    def write(self, out: Path):
        data = dict(command=self.command, config=self.config_path, config_sha256=self.config_hash,
                    version=__version__, wall_time_s=round(time.perf_counter() - self._t0, 3),
                    stages=self.stages, outputs=sorted(self.outputs))
        (out / "manifest.json").write_text(dumps(data))


def _families(arg) -> tuple:
    if not arg or arg == "all":
        return FAMILIES
    return tuple(Family.parse(f) for f in arg.split(","))


# --- commands ------------------------------------------------------------------------

def cmd_spectrum(rc: RunConfig, args, out: Path, man: RunManifest) -> int:
    cfg = rc.solver
    if args.modes:
        cfg = cfg.replace(K_max=args.modes)
    if args.roots:
        cfg = cfg.replace(J_max=args.roots, galerkin_dim=max(cfg.galerkin_dim, 2 * args.roots),
                          ladder=tuple(J for J in cfg.ladder if J <= args.roots))
    rc = RunConfig(rc.gamma_law, rc.alpha, rc.potential, cfg)
    fams = _families(args.family)
    jobs = [(m, f) for m in rc.modes() for f in fams]

    def run(job):
        mode, fam = job
        pts = find_spectrum(mode, fam, cfg)
        return pts, normalize_all(mode, pts)

    results = ordered_map(run, jobs)
    roots = [p.csv_row() for pts, _ in results for p in pts]
    norms = [pr.csv_row() for _, prs in results for pr in prs]
    write_csv(out / "roots.csv", roots, ["k", "j", "family", "z", "lambda", "residual", "origin"])
    write_csv(out / "norms.csv", norms, ["k", "j", "family", "z", "c_squared", "norm_closed",
                                          "norm_derivative", "rel_diff"])
    man.outputs += ["roots.csv", "norms.csv"]
    man.stages["spectrum"] = "ok"
    worst = max((pr.rel_diff for _, prs in results for pr in prs), default=0.0)
    if args.json:
        sys.stdout.write(dumps(dict(roots=len(roots), worst_norm_rel_diff=worst)))
    return EXIT_OK


def cmd_trace(rc: RunConfig, args, out: Path, man: RunManifest) -> int:
    if rc.potential is None:
        raise ConfigError("trace needs a [potential] section")
    cfg = rc.solver
    require_valid_potential(rc.potential, cfg)
    if args.ladder:
        ladder = tuple(int(x) for x in args.ladder.replace(",", " ").split())
        cfg = cfg.replace(ladder=ladder, J_max=max(cfg.J_max, max(ladder)),
                          galerkin_dim=max(cfg.galerkin_dim, 2 * max(ladder)))
    fams = (Family.MAIN,) if args.chain == "off" else _families(args.family)
    rep = chain_compare(rc.modes(), rc.potential, cfg, families=fams)
    (out / "trace.json").write_text(dumps(rep.to_json()))
    write_csv(out / "trace.csv", rep.csv_rows(), ["k", "family", "J", "S_J", "first_order"])
    pert = [row for _, r in sorted(rep.records.items(), key=lambda kv: (kv[0][0], FAMILIES.index(kv[0][1])))
            for row in r.csv_rows()]
    write_csv(out / "perturbed.csv", pert, ["k", "j", "family", "lambda", "mu", "mu_minus_lambda", "method"])
    man.outputs += ["trace.json", "trace.csv", "perturbed.csv"]
    man.stages["trace"] = "pass" if rep.passed else "fail"
    totals = {str(f): v for f, v in rep.totals().items()}
    if args.json:
        sys.stdout.write(dumps(dict(passed=rep.passed, totals=totals, target=rep.target, spread=rep.spread(),
                                    errors={str(f): m for f, m in rep.errors.items()})))
    else:
        for f, v in totals.items():
            print(f"{f:5s} total {v:+.6f}")
        print(f"target {rep.target:+.6f}  spread {rep.spread():.3e}  {'PASS' if rep.passed else 'FAIL'}")
        for f, msg in rep.errors.items():
            print(f"{f}: {msg}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_NUMERICAL


def _check(name, ok, detail, checks):
    checks.append(dict(check=name, passed=bool(ok), detail=detail))


def run_diagnostics(rc: RunConfig) -> list[dict]:
    """Dual-method norms, residue limits, imaginary twin, diagonal exclusion, drift, staircase."""
    cfg = rc.solver
    modes = rc.modes()
    checks: list[dict] = []
    J = min(20, cfg.J_max)

    def norms(job):
        mode, fam = job
        prs = normalize_all(mode, find_spectrum(mode, fam, cfg, n_points=J))
        return max(pr.rel_diff for pr in prs)

    jobs = [(m, f) for m in modes for f in FAMILIES]
    worst = dict(zip([f"{f} k={m.k}" for m, f in jobs], ordered_map(norms, jobs)))
    w = max(worst.values())
    _check("norming_dual", w <= 1e-8, dict(worst=w, per_mode_family=worst), checks)

    m1 = modes[0]
    rng = np.random.default_rng(RESIDUE_SEED)
    res_err = 0.0
    for which, pair in POLE_FAMILIES.items():
        for fam in pair:
            sign = cf.RESIDUE_SIGN[(which, fam)]
            pts = [p for p in find_spectrum(m1, fam, cfg) if not p.is_diagonal][:10]
            for p in pts:
                t = np.sort(rng.uniform(0.0, 1.0, 5))
                (a, b), _ = cf.coefficients(p.z, m1, cf.RESIDUE_CONVENTION[which])
                ab = (float(a), float(b))
                c2y2 = cf.eigenfunction(p.z, t, ab) ** 2 / norm_closed(m1, p, ab)
                pr = normalize_all(m1, [p])[0]
                lim = residue_limit_oracle(m1, pr, which, t)
                res_err = max(res_err, float(np.max(np.abs(lim - sign * c2y2)) / np.max(np.abs(c2y2))))
    _check("residue_limit", res_err <= 1e-6, dict(worst_rel=res_err), checks)

    main = [p for p in find_spectrum(m1, Family.MAIN, cfg) if not p.is_diagonal]
    twin = max(imaginary_twin_check(p, m1) for p in main)
    _check("imaginary_twin", twin <= 1e-8, dict(worst=twin, roots=len(main)), checks)

    ex = complex_diag_exclusion(m1, 50.0, step=0.1)
    _check("diagonal_exclusion", ex.certified_from <= 5.0,
           dict(sign_changes=list(ex.roots), certified_from=ex.certified_from), checks)

    if len(modes) >= 2:
        dt = root_drift(modes, (3, 5, 8), cfg)
        ok = all(dt.decreasing(j) for j in (3, 5, 8))
        _check("root_drift", ok, {f"j={j}": [e for _, e in dt.errors(j)] for j in (3, 5, 8)}, checks)

    lam = [p.lam for p in find_spectrum(m1, Family.L03, cfg)]
    grid = np.linspace(m1.gamma, lam[-1], 400)
    ok = np.array_equal(staircase(lam, grid), l03_closed_count(m1.gamma, grid))
    _check("l03_staircase", ok, dict(points=grid.size), checks)
    return checks


def cmd_diagnose(rc: RunConfig, args, out: Path, man: RunManifest) -> int:
    checks = run_diagnostics(rc)
    passed = all(c["passed"] for c in checks)
    verdict = dict(passed=passed, checks=checks)
    (out / "diagnose.json").write_text(dumps(verdict))
    man.outputs.append("diagnose.json")
    man.stages["diagnose"] = "pass" if passed else "fail"
    if args.json:
        sys.stdout.write(dumps(verdict))
    else:
        for c in checks:
            print(f"{c['check']:20s} {'PASS' if c['passed'] else 'FAIL'}")
    return EXIT_OK if passed else EXIT_NUMERICAL


COMMANDS = {"spectrum": cmd_spectrum, "trace": cmd_trace, "diagnose": cmd_diagnose}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quarttrace", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"quarttrace {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=".")
        sp.add_argument("--family", default=None, help="comma-separated families or 'all'")
        sp.add_argument("--ladder", default=None, help="J ladder, e.g. 10,20,40")
        sp.add_argument("--json", action="store_true")
        if name == "spectrum":
            sp.add_argument("--modes", type=int, default=None)
            sp.add_argument("--roots", type=int, default=None)
        if name == "trace":
            sp.add_argument("--chain", choices=("on", "off"), default="on")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    man = RunManifest(args.command, args.config)
    try:
        rc = load_config(args.config)
        out.mkdir(parents=True, exist_ok=True)
        code = COMMANDS[args.command](rc, args, out, man)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        man.stages[args.command] = f"error: {exc}"
        code = EXIT_NUMERICAL
    except QuarttraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_NUMERICAL
    if out.is_dir():
        man.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
