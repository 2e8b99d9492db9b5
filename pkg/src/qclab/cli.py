"""qclab command-line front end.

    qclab <command> [--config PATH] [--seed N] [--workers N] [--out DIR]
                    [--format json|csv|both] [--no-plots] [--dump-config]
                    [per-command overrides]

Commands: distortion, modulus, means, phi, bounds, equicontinuity,
necessity, full-battery.  Exit code is nonzero iff any checked inequality
fails.  Reports land in the output directory as report.json, one CSV per
table, and (unless --no-plots) PNG figures rendered from the same rows.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import plots
from .divergence import DIVERGENT
from .geometry import Ring
from .mappings import (MappingModel, distortion_field, identity_map,
                       log_distortion_map, radial_stretch, shrinking_stretch_family,
                       wirtinger, distortion, LOG_MAP_KNEE)
from .modulus import (CONNECTING, SEPARATING, CurveFamilySpec, annulus_modulus,
                      discrete_modulus)
from .means import MeanProfile, circle_mean, fmo_estimate
from .phicalc import BUILTIN_PHIS, CONDITIONS, PhiFunction, equivalence_battery
from .report import COMMANDS, Report, Scenario, emit, load_config, merge_config
from .verification import (battery_maps, battery_rings, disk_power_bound_check,
                           equicontinuity_probe, necessity_demo,
                           ring_mean_bound_check, log_majorant_bound_check)


def resolve_map(selector: str) -> MappingModel:
    name, _, arg = selector.partition(":")
    if name == "identity":
        return identity_map()
    if name == "radial_stretch":
        return radial_stretch(float(arg))
    if name == "shrinking_stretch":
        return shrinking_stretch_family([int(arg)])[0]
    if name == "log_distortion":
        return log_distortion_map()
    raise SystemExit(f"unresolved map selector: {selector!r}")


def resolve_phi(selector: str) -> PhiFunction:
    try:
        return BUILTIN_PHIS[selector]()
    except KeyError:
        raise SystemExit(f"unresolved phi selector: {selector!r}; "
                         f"choose from {sorted(BUILTIN_PHIS)}") from None


def resolve_ring(selector: str) -> Ring:
    try:
        r1, r2 = (float(x) for x in selector.split(":"))
        return Ring(0j, r1, r2)
    except (ValueError, TypeError) as exc:
        raise SystemExit(f"unresolved ring selector: {selector!r} ({exc})") from None


def expected_distortion(selector: str, z: np.ndarray) -> np.ndarray:
    name, _, arg = selector.partition(":")
    r = np.abs(z)
    if name == "identity":
        return np.ones_like(r)
    if name == "radial_stretch":
        return np.full_like(r, float(arg))
    if name == "shrinking_stretch":
        return np.full_like(r, float(arg))
    if name == "log_distortion":
        return np.where(r < LOG_MAP_KNEE, np.log(1.0 / np.maximum(r, 1e-300)), 1.0)
    raise SystemExit(f"unresolved map selector: {selector!r}")


def run_distortion(cfg: dict, seed: int, report: Report):
    rng = np.random.default_rng(seed)
    rows = []
    worst_an, worst_fd = 0.0, 0.0
    for sel in cfg["distortion"]["maps"]:
        f = resolve_map(sel)
        n = int(cfg["distortion"]["n_samples"])
        r = np.exp(rng.uniform(math.log(1e-3), math.log(0.95), n))
        th = rng.uniform(0.0, 2.0 * math.pi, n)
        z = r * np.exp(1j * th)
        k_an = distortion_field(f)(z)
        k_fd = np.array([distortion(wirtinger(f, zi)) for zi in z])
        k_ref = expected_distortion(sel, z)
        err_an = float(np.max(np.abs(k_an - k_ref)))
        err_fd = float(np.max(np.abs(k_fd - k_ref)))
        worst_an, worst_fd = max(worst_an, err_an), max(worst_fd, err_fd)
        for zi, ka, kf, kr in zip(z, k_an, k_fd, k_ref):
            rows.append([sel, zi.real, zi.imag, ka, kf, kr])
    report.add_table("distortion", ["map", "re_z", "im_z", "k_analytic",
                                    "k_finite_diff", "k_expected"], rows)
    report.tree["distortion"] = {"max_err_analytic": worst_an, "max_err_fd": worst_fd}
    report.add_pass("distortion.analytic", worst_an < 1e-6)
    report.add_pass("distortion.finite_diff", worst_fd < 1e-3)
    return rows


def run_modulus(cfg: dict, seed: int, report: Report):
    rows = []
    ok = True
    res = int(cfg["modulus"]["resolution"])
    for sel in cfg["modulus"]["rings"]:
        ring = resolve_ring(sel)
        values = {}
        for kind in (CONNECTING, SEPARATING):
            closed = annulus_modulus(ring, kind)
            disc = discrete_modulus(CurveFamilySpec(kind, ring), (res, res))
            rel = abs(disc.value - closed) / closed
            values[kind] = disc.value
            ok &= rel < 0.02 and disc.converged
            rows.append([sel, kind, closed, disc.value, rel, disc.iterations,
                         disc.residual])
        duality = values[CONNECTING] * values[SEPARATING]
        ok &= abs(duality - 1.0) < 0.05
        rows.append([sel, "duality-product", 1.0, duality, abs(duality - 1.0), 0, 0.0])
    report.add_table("modulus", ["ring", "kind", "closed_form", "discrete",
                                 "rel_err", "sweeps", "residual"], rows)
    report.add_pass("modulus.convergence", ok)
    return rows


def run_means(cfg: dict, seed: int, report: Report):
    profile_rows, fmo_rows = [], []
    for sel in cfg["means"]["maps"]:
        f = resolve_map(sel)
        K = distortion_field(f)
        radii = np.geomspace(1e-4, 0.9, 25)
        for r in radii:
            profile_rows.append([sel, float(r), circle_mean(K, 0j, r, f.domain)])
        est = fmo_estimate(K, 0j, domain=f.domain)
        for e, o in zip(est.epsilons, est.oscillations):
            fmo_rows.append([sel, float(e), float(o), est.verdict])
    report.add_table("means_profiles", ["map", "r", "q"], profile_rows)
    report.add_table("means_fmo", ["map", "eps", "oscillation", "verdict"], fmo_rows)
    report.tree["means"] = {"verdicts": sorted({(r[0], r[3]) for r in fmo_rows})}
    report.add_pass("means.computed", True)
    return profile_rows, fmo_rows


def run_phi(cfg: dict, seed: int, report: Report, workers: int = 1):
    phis = [resolve_phi(s) for s in cfg["phi"]["phis"]]
    ps = [float(p) for p in cfg["phi"]["ps"]]
    battery = equivalence_battery(phis, ps)
    conds = CONDITIONS if cfg["phi"]["conditions"] == "all" else tuple(cfg["phi"]["conditions"])
    rows = [[name, p, cond, battery.verdicts[(name, p, cond)]]
            for (name, p, cond) in sorted(battery.verdicts)
            if cond in conds]
    report.add_table("phi_conditions", ["phi", "p", "condition", "verdict"], rows)
    agree_rows = [[name, p, battery.agreement[(name, p)]]
                  for (name, p) in sorted(battery.agreement)]
    report.add_table("phi_agreement", ["phi", "p", "decisive_agree"], agree_rows)
    report.tree["phi"] = {"all_agree": battery.all_agree,
                          "p_monotone": battery.p_monotone}
    report.add_pass("phi.agreement", battery.all_agree)
    report.add_pass("phi.p_monotone", all(battery.p_monotone.values()))
    return rows


def run_bounds(cfg: dict, seed: int, report: Report, workers: int = 1):
    maps = [(sel, resolve_map(sel)) for sel in cfg["bounds"]["maps"]]
    rings = [(sel, resolve_ring(sel)) for sel in cfg["bounds"]["rings"]]
    n = int(cfg["bounds"]["n_samples"])
    rows = []
    all_ok = True

    def one(task):
        (msel, f), (rsel, ring) = task
        rep = ring_mean_bound_check(f, 0j, ring.r2, 1.0, n_samples=n, seed=seed)
        out = []
        for z, lhs, rhs in zip(rep.samples, rep.lhs, rep.rhs):
            out.append([msel, rsel, float(abs(z)), float(lhs), float(rhs),
                        bool(lhs <= rhs * (1.0 + 1e-9) + 1e-12)])
        return rep.passed, out

    tasks = [(m, r) for m in maps for r in rings]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    for passed, out in results:
        all_ok &= passed
        rows.extend(out)

    disk_ok = True
    for msel, f in maps:
        rep = disk_power_bound_check(f, n_samples=n, seed=seed)
        disk_ok &= rep.passed
        for z, lhs, rhs in zip(rep.samples, rep.lhs, rep.rhs):
            rows.append([msel, "unit-disk", float(abs(z)), float(lhs), float(rhs),
                         bool(lhs <= rhs * (1.0 + 1e-9) + 1e-12)])
    log_rep = log_majorant_bound_check(log_distortion_map(), 0j, LOG_MAP_KNEE,
                                       1.0, c=1.0, n_samples=n, seed=seed)
    report.add_table("bounds", ["map", "ring", "abs_z", "lhs", "rhs", "pass"], rows)
    report.tree["bounds"] = {"ring_mean_pass": all_ok, "disk_power_pass": disk_ok,
                             "log_majorant_pass": log_rep.passed}
    report.add_pass("bounds.ring_mean", all_ok)
    report.add_pass("bounds.disk_power", disk_ok)
    report.add_pass("bounds.log_majorant", log_rep.passed)
    return rows


def run_equicontinuity(cfg: dict, seed: int, report: Report):
    rows = []
    alphas = [float(a) for a in cfg["equicontinuity"]["alphas"]]
    stretch_family = [radial_stretch(a) for a in alphas]
    t1 = equicontinuity_probe(stretch_family, 0j)
    for label in t1.labels:
        for eps in t1.eps_targets:
            d = t1.deltas[label][eps]
            rows.append(["radial_stretch", label, eps, "" if d is None else d])
    ms = [int(m) for m in cfg["equicontinuity"]["ms"]]
    shrink_family = shrinking_stretch_family(ms)
    t2 = equicontinuity_probe(shrink_family, 0j)
    for label in t2.labels:
        for eps in t2.eps_targets:
            d = t2.deltas[label][eps]
            rows.append(["shrinking_stretch", label, eps, "" if d is None else d])
    report.add_table("equicontinuity", ["family", "member", "eps", "delta"], rows)
    report.tree["equicontinuity"] = {"stretch_uniform": t1.uniform,
                                     "shrinking_uniform": t2.uniform,
                                     "gaps": t2.gaps}
    report.add_pass("equicontinuity.stretch_uniform", t1.uniform)
    report.add_pass("equicontinuity.shrinking_fails", not t2.uniform)
    return rows


def run_necessity(cfg: dict, seed: int, report: Report):
    phi = resolve_phi(cfg["necessity"]["phi"])
    budget = float(cfg["necessity"]["budget"])
    delta = float(cfg["necessity"]["delta"])
    members = int(cfg["necessity"]["members"])
    demo = necessity_demo(phi, budget, delta, n_members=members)
    rows = []
    for m, (f, mem) in enumerate(zip(demo.family, demo.memberships), start=1):
        dm = 2.0 ** (-m)
        img = float(np.abs(f(np.asarray([dm + 0j])))[0])
        gap = img / math.sqrt(1.0 + img * img)
        rows.append([m, mem.weighted_integral, mem.member, gap, dm])
    report.add_table("necessity", ["member", "weighted_budget", "member_pass",
                                   "gap", "inner_radius"], rows)
    report.tree["necessity"] = {"gamma": demo.gamma, "lam": demo.lam,
                                "target_radius": demo.target_radius,
                                "probe_uniform": demo.table.uniform,
                                "succeeded": demo.succeeded}
    report.add_pass("necessity.family", demo.succeeded)
    return rows


def make_figures(report: Report, out_dir: Path):
    written = []
    t = report.tables
    if "bounds" in t:
        written += plots.plot_bounds(t["bounds"][1], out_dir)
    if "modulus" in t:
        written += plots.plot_modulus([r for r in t["modulus"][1]
                                       if r[1] != "duality-product"], out_dir)
    if "means_profiles" in t and "means_fmo" in t:
        written += plots.plot_means(t["means_profiles"][1], t["means_fmo"][1], out_dir)
    if "phi_conditions" in t:
        written += plots.plot_phi(t["phi_conditions"][1], out_dir)
    if "equicontinuity" in t:
        written += plots.plot_equicontinuity(t["equicontinuity"][1], out_dir)
    if "necessity" in t:
        written += plots.plot_necessity(t["necessity"][1], out_dir)
    return written


RUNNERS = {
    "distortion": run_distortion,
    "modulus": run_modulus,
    "means": run_means,
    "phi": run_phi,
    "bounds": run_bounds,
    "equicontinuity": run_equicontinuity,
    "necessity": run_necessity,
}


def run(command: str, config: dict, seed: int, workers: int = 1) -> Report:
    """Execute a scenario and return its report (no files written)."""
    scenario = Scenario(command, config, seed)
    report = Report(scenario)
    todo = [c for c in RUNNERS] if command == "full-battery" else [command]
    for name in todo:
        t0 = time.perf_counter()
        runner = RUNNERS[name]
        if name in ("phi", "bounds"):
            runner(config, seed, report, workers=workers)
        else:
            runner(config, seed, report)
        report.timings[name] = time.perf_counter() - t0
    if command == "full-battery":
        summary = []
        for name in todo:
            checks = [(n, ok) for n, ok in report.passes if n.startswith(name + ".")]
            summary.append([name, len(checks), all(ok for _, ok in checks)])
        report.add_table("summary", ["module", "checks", "passed"], summary)
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qclab",
                                 description="numerical laboratory for plane "
                                             "homeomorphisms with finite distortion")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", default=None, help="TOML config overriding defaults")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--format", choices=("json", "csv", "both"), default=None)
    ap.add_argument("--no-plots", action="store_true")
    ap.add_argument("--dump-config", action="store_true",
                    help="print the effective config as JSON and exit")
    ap.add_argument("--map", action="append", dest="maps",
                    help="map selector override (repeatable)")
    ap.add_argument("--ring", action="append", dest="rings",
                    help="ring selector r1:r2 (repeatable)")
    ap.add_argument("--phi", action="append", dest="phis",
                    help="phi selector override (repeatable)")
    ap.add_argument("--conditions", default=None,
                    help="'all' or comma-separated condition ids")
    return ap


def apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    ov = {}
    if args.seed is not None:
        ov["seed"] = args.seed
    if args.workers is not None:
        ov["workers"] = args.workers
    if args.out is not None:
        ov["out"] = args.out
    if args.format is not None:
        ov["format"] = args.format
    if args.no_plots:
        ov["plots"] = False
    if args.maps:
        ov.setdefault("bounds", {})["maps"] = args.maps
        ov.setdefault("distortion", {})["maps"] = args.maps
        ov.setdefault("means", {})["maps"] = args.maps
    if args.rings:
        ov.setdefault("bounds", {})["rings"] = args.rings
        ov.setdefault("modulus", {})["rings"] = args.rings
    if args.phis:
        ov.setdefault("phi", {})["phis"] = args.phis
    if args.conditions is not None:
        ov.setdefault("phi", {})["conditions"] = (
            "all" if args.conditions == "all" else args.conditions.split(","))
    return merge_config(cfg, ov)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = apply_overrides(load_config(args.config), args)
    if args.dump_config:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return 0
    seed = int(cfg["seed"])
    report = run(args.command, cfg, seed, workers=int(cfg["workers"]))
    out_dir = Path(cfg["out"])
    written = emit(report, out_dir, cfg["format"])
    if cfg.get("plots", True):
        written += make_figures(report, out_dir)
    for name, ok in report.passes:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"wrote {len(written)} file(s) to {out_dir}")
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
