"""``cocycle-spectra`` command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 enumeration budget exceeded,
4 any other failure of the wrapped computation.
"""

import argparse
import math
import os
from pathlib import Path
import sys
import warnings

import numpy as np

from . import config as cfgmod
from . import io
from . import linalg2 as la
from .axioms import BlendingInterval, cec_ladder, check_acc, check_cec, synchronize
from .cocycle_spectrum import CocycleFamily, track_v0, translate_spectrum
from .ellipticity import perturb_diagonal, rotation_perturbation_derivative, shyp_membership
from .errors import BudgetExceeded, CocycleSpectraError, NotElliptic
from .symbolic import RNG_ALGORITHM, BernoulliSampler, Word, sample_sequence
from .thermo import (NEGATIVE, POSITIVE, MAX_OVER_FIBER, counting_spectrum, default_delta,
                     extract_summary, legendre_fenchel, pressure_curve, word_exponents)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_FAILED = 4


def _family(cfg):
    spec = cfg.system
    if "fibers" in spec:
        raise cfgmod.ConfigError("this command needs a matrix system, not fiber specs")
    return CocycleFamily(tuple(cfgmod.build_matrices(spec)))


def cmd_classify(cfg, args):
    if "fibers" in cfg.system:
        mats = [f.matrix for f in cfgmod.build_system(cfg.system).maps]
    else:
        mats = cfgmod.build_matrices(cfg.system)
    rows = []
    print(f"{'index':>5}  {'class':<10}  {'det':>12}  {'trace':>12}  rotation_number")
    for i, m in enumerate(mats):
        c = la.classify(m)
        rot = "" if c.rotation_number is None else f"{c.rotation_number:.12g}"
        print(f"{i:>5}  {c.tag:<10}  {m.det:>12.6g}  {m.trace:>12.6g}  {rot}")
        rows.append({"index": i, "class": c.tag, "det": m.det, "trace": m.trace,
                     "rotation_number": c.rotation_number})
    return rows


def _grid(spec):
    return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))


def cmd_spectrum(cfg, args):
    out = Path(args.out)
    system = cfgmod.build_system(cfg.system)
    policy = cfgmod.parse_policy(cfg.x_policy)
    n = cfg.n
    delta = cfg.delta or default_delta(system.M, n)
    parts = cfg.partitions or args.threads
    wx = word_exponents(system, n, policy, parts, args.threads, cfg.budget)
    cs = counting_spectrum(system, n, delta, policy, exponents=wx)
    q = _grid(cfg.q_grid)
    p_neg = pressure_curve(system, n, q, NEGATIVE, policy, delta, exponents=wx)
    p_pos = pressure_curve(system, n, q, POSITIVE, policy, delta, exponents=wx)
    alpha = _grid(cfg.alpha_grid) if cfg.alpha_grid else cs.alpha_grid
    lf_neg = legendre_fenchel(p_neg, alpha)
    lf_pos = legendre_fenchel(p_pos, alpha)
    summary = extract_summary(cs, cs, p_neg, p_pos)

    io.write_spectrum_csv(cs, out / "spectrum.csv")
    io.write_spectrum_csv(lf_neg, out / "spectrum_lf_neg.csv")
    io.write_spectrum_csv(lf_pos, out / "spectrum_lf_pos.csv")
    io.write_pressure_csv(p_neg, out / "pressure_neg.csv")
    io.write_pressure_csv(p_pos, out / "pressure_pos.csv")
    curves = {"spectrum": io.spectrum_meta(cs), "spectrum_lf_neg": io.spectrum_meta(lf_neg),
              "spectrum_lf_pos": io.spectrum_meta(lf_pos),
              "pressure_neg": io.pressure_meta(p_neg), "pressure_pos": io.pressure_meta(p_pos)}
    if policy == MAX_OVER_FIBER and "fibers" not in cfg.system:
        with warnings.catch_warnings(record=True):
            warnings.simplefilter("always")
            cocycle = translate_spectrum(cs)
        io.write_spectrum_csv(cocycle, out / "cocycle_spectrum.csv")
        curves["cocycle_spectrum"] = io.spectrum_meta(cocycle)
    doc = {"summary": io.summary_dict(summary), "curves": curves,
           "run": {"partitions": parts, "threads": args.threads, "n": n, "delta": delta,
                   "words": int(wx.high.size)},
           "config": cfg.to_dict()}
    io.dump_json(doc, out / "summary.json")
    print(f"n={n} delta={delta:.6g} words={wx.high.size}")
    for k, v in io.summary_dict(summary).items():
        print(f"  {k:<16} {v:.6g}")
    return doc


def cmd_synchronize(cfg, args):
    system = cfgmod.build_system(cfg.system)
    s = cfg.sync
    weights = s.weights or [1.0 / system.N] * system.N
    sampler = BernoulliSampler(tuple(weights), cfg.seed)
    fwd = synchronize(system, sampler, s.samples, s.steps, s.grid_points, s.sync_tol, args.threads)
    bwd = synchronize(system.inverse(), sampler, s.samples, s.steps, s.grid_points, s.sync_tol,
                      args.threads)
    doc = fwd.to_dict()
    doc["mean_exponent"] = float(np.mean(fwd.exponent_estimates))
    doc["backward"] = {"sync_fraction": bwd.sync_fraction,
                       "mean_exponent": float(np.mean(bwd.exponent_estimates))}
    doc["rng"] = RNG_ALGORITHM
    io.dump_json(doc, Path(args.out) / "sync_report.json")
    print(f"sync_fraction={fwd.sync_fraction:.4g} mean_exponent={doc['mean_exponent']:.6g} "
          f"backward_sync_fraction={bwd.sync_fraction:.4g}")
    return doc


def cmd_check_axioms(cfg, args):
    system = cfgmod.build_system(cfg.system)
    ax = cfg.axioms
    J = BlendingInterval(ax.J[0], ax.J[1], ax.side)
    H = la.Arc.from_endpoints(*ax.H) if ax.H else J.arc
    cec = check_cec(system, J, H, ax.max_len)
    frac, transition = check_acc(system, J, ax.max_len, ax.acc_grid)
    ells, k2, k3 = cec_ladder(system, J, ax.ladder, ax.max_len)
    doc = {"J": [J.lo, J.hi], "side": J.side, "cec": cec.to_dict(),
           "acc": {"covered_fraction": frac, "max_transition": transition, "grid": ax.acc_grid},
           "constants": {"K2_empirical": k2, "K3_empirical": k3, "K4_margin": cec.margin,
                         "K5_threshold": cec.threshold, "M_I_empirical": transition},
           "ladder": {"sizes": ax.ladder, "ell": ells}}
    io.dump_json(doc, Path(args.out) / "cec_certificate.json")
    print(f"CEC on J=[{J.lo:.6g}, {J.hi:.6g}] ({J.side})")
    print(f"  covered        {cec.covered}")
    print(f"  witness        {cec.word} (length {cec.ell})")
    print(f"  expansion rate {cec.expansion_rate:.6g} >= {cec.threshold}")
    print(f"  margin         {cec.margin:.6g}")
    print(f"  K2, K3 (fit)   {k2:.4g}, {k3:.4g}")
    print(f"Acc: covered_fraction {frac:.4g}, max transition {transition}")
    return doc


def cmd_perturb(cfg, args):
    fam = _family(cfg)
    p = cfg.perturb
    report = shyp_membership(fam, p.max_depth, p.irrationality_tol, cfg.budget)
    doc = report.to_dict()
    last = fam.mats[-1]
    pert = perturb_diagonal(last, p.t)
    doc["perturb_diagonal"] = {"t": p.t, "input": list(last.entries()),
                               "output": list(pert.entries()), "det_change": pert.det - last.det}
    ew = report.search.elliptic_witness
    if ew is not None:
        try:
            doc["rotation_derivative"] = {
                "word": str(ew[0]), "h": p.h,
                "value": rotation_perturbation_derivative(fam, ew[0], p.h)}
        except NotElliptic:
            doc["rotation_derivative"] = None
    io.dump_json(doc, Path(args.out) / "perturb.json")
    print(f"member={report.member} (heuristic)")
    for note in report.notes:
        print(f"  {note}")
    return doc


def cmd_track_v0(cfg, args):
    fam = _family(cfg)
    t = cfg.track
    if t.word:
        w = Word.from_string(t.word, fam.N)
    else:
        w = sample_sequence(BernoulliSampler.uniform(fam.N, cfg.seed), t.length)
    tracker = track_v0(fam, w, t.checkpoints, t.threshold)
    tracker.to_csv(Path(args.out) / "tracker.csv")
    print(f"word={w} lambda1={tracker.lambda1:.6g} v0={tracker.v0_estimate:.12g} "
          f"chi(v0)={tracker.chi_at_v0:.6g}")
    return tracker


COMMANDS = {
    "classify": cmd_classify,
    "spectrum": cmd_spectrum,
    "synchronize": cmd_synchronize,
    "check-axioms": cmd_check_axioms,
    "perturb": cmd_perturb,
    "track-v0": cmd_track_v0,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (JSON); defaults apply if omitted")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--seed", type=int, help="RNG seed, u64 (overrides the config)")
    parser = argparse.ArgumentParser(prog="cocycle-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load(args.config) if args.config else cfgmod.ExperimentConfig()
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise cfgmod.ConfigError("seed must be a u64")
            cfg.seed = args.seed
        if args.threads < 1:
            raise cfgmod.ConfigError("--threads must be positive")
        args.out = args.out or cfg.output_dir
        Path(args.out).mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, args)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CocycleSpectraError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
