"""Command-line entry point: ``hawkes-decay <command> ...``.

Every stochastic command needs ``--seed``. Outputs go to ``--out`` together
with ``manifest.json``. Exit codes: 0 success, 1 invalid input, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, bayes, changepoint, experiments
from . import io as hio
from .core import spectral_radius
from .estimators import METHODS, FitConfig, fit_decay, sequential_estimates
from .exceptions import NonStationary, NumericalError, ValidationError
from .likelihood import LoglikOptions, loglik_scan
from .sim import SimSpec, simulate_batch

SCAN_RANGES = {"large": (0.1, 100.0, True), "medium": (0.6, 2.4, False), "small": (1.1, 1.3, False)}


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _threads_default() -> int:
    raw = os.environ.get("HAWKES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hawkes-decay", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=_threads_default(),
                   help="worker processes for repetitions and chains (default: $HAWKES_THREADS or 1)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_, stochastic=True):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        if stochastic:
            sp.add_argument("--seed", type=int, required=True)
        return sp

    sp = add("sim", "simulate realizations to an event CSV")
    sp.add_argument("--params", type=Path, required=True, help="parameter JSON")
    stop = sp.add_mutually_exclusive_group(required=True)
    stop.add_argument("--T", type=float, help="time horizon")
    stop.add_argument("--n-events", type=int, help="stop after this many events")
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--allow-nonstationary", action="store_true")

    sp = add("scan", "negative log-likelihood over a decay grid")
    sp.add_argument("--params", type=Path, required=True, help="true parameter JSON")
    sp.add_argument("--events", type=Path, required=True)
    sp.add_argument("--range", choices=sorted(SCAN_RANGES), default="medium")
    sp.add_argument("--grid", type=float, nargs=2, metavar=("LO", "HI"),
                    help="explicit grid limits, overriding --range")
    sp.add_argument("--points", type=int, default=60)
    sp.add_argument("--log", action="store_true", help="log-spaced explicit grid")
    sp.add_argument("--resamples", type=int, default=1000)
    sp.add_argument("--horizon", choices=("stream_T", "last_event"), default="stream_T")

    sp = add("fit", "fit the decay (and baseline, excitation)")
    sp.add_argument("--events", type=Path, required=True)
    sp.add_argument("--dims", type=int, default=1)
    sp.add_argument("--method", choices=METHODS, default="nonlinear")
    sp.add_argument("--bounds", type=float, nargs=2, default=(1e-3, 1e3), metavar=("LO", "HI"))
    sp.add_argument("--budget", type=int, default=50)
    sp.add_argument("--grid-count", type=int, default=10)
    sp.add_argument("--init", type=float)
    sp.add_argument("--horizon", choices=("stream_T", "last_event"), default="stream_T")
    sp.add_argument("--sequential", choices=("pooled", "iid"),
                    help="also write estimates.json with one estimate per realization")

    sp = add("bayes", "conjugate predictive summary of decay estimates", stochastic=False)
    sp.add_argument("--estimates", type=Path, required=True)
    sp.add_argument("--a0", type=float)
    sp.add_argument("--b0", type=float, default=1.0)
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--predictive", choices=("paper", "conjugate"), default="paper")

    sp = add("changepoint", "changepoint posterior over decay estimates")
    sp.add_argument("--estimates", type=Path, required=True)
    sp.add_argument("--rate1", type=float, default=1.0)
    sp.add_argument("--rate2", type=float, default=0.7)
    sp.add_argument("--samples", type=int, default=20_000)
    sp.add_argument("--burn-in", type=int)
    sp.add_argument("--chains", type=int, default=1)

    sp = add("experiment", "run a scripted synthetic study")
    sp.add_argument("--name", choices=sorted(experiments.EXPERIMENTS), required=True)
    sp.add_argument("--scale", choices=("desk", "paper"), default="desk")
    sp.set_defaults(out=Path("report.json"))
    for a in sp._actions:
        if a.dest == "out":
            a.help = "report JSON path (tables are written next to it)"
    return p


def _write_csv(path: Path, header, rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return hio.write_text(path, buf.getvalue())


def _cmd_sim(args):
    params = hio.parse_params(args.params)
    rho = spectral_radius(params)
    if rho >= 1 and not args.allow_nonstationary:
        raise NonStationary(f"spectral radius rho = {rho:.6g} >= 1; "
                            "pass --allow-nonstationary to simulate anyway")
    spec = SimSpec(params, T=args.T, n_events=args.n_events, seed=args.seed)
    rs = simulate_batch(spec, args.reps)
    return [hio.write_events(args.out / "events.csv", rs)], [args.params]


def _cmd_scan(args):
    params = hio.parse_params(args.params)
    rs = hio.parse_events(args.events, params.dims)
    if args.grid:
        lo, hi, log = args.grid[0], args.grid[1], args.log
    else:
        lo, hi, log = SCAN_RANGES[args.range]
    grid = (10.0 ** np.linspace(np.log10(lo), np.log10(hi), args.points) if log
            else np.linspace(lo, hi, args.points))
    scan = loglik_scan(params, rs, grid, resamples=args.resamples, seed=args.seed,
                       options=LoglikOptions(args.horizon))
    return [hio.write_text(args.out / "scan.csv", scan.to_csv())], [args.params, args.events]


def _cmd_fit(args):
    rs = hio.parse_events(args.events, args.dims)
    cfg = FitConfig(method=args.method, bounds=tuple(args.bounds), budget=args.budget,
                    grid_spec=(args.grid_count, -1.0, 2.0), init=args.init, seed=args.seed,
                    horizon_mode=args.horizon)
    fit = fit_decay(rs, cfg)
    outputs = [hio.write_json(args.out / "fit.json", fit.to_dict())]
    if args.sequential:
        est = sequential_estimates(rs, cfg, mode=args.sequential)
        outputs.append(hio.write_json(args.out / "estimates.json", est.to_dict()))
    return outputs, [args.events]


def _cmd_bayes(args):
    est = hio.read_estimates(args.estimates)
    model = bayes.GammaExpModel(b0=args.b0, a0=args.a0)
    summary = bayes.summarize(model, est, level=args.level, convention=args.predictive)
    return [hio.write_json(args.out / "predictive.json", summary.to_dict())], [args.estimates]


def _chain(job):
    values, model, n, burn, seed = job
    return changepoint.mcmc(values, model, n, burn, seed=seed)


def _cmd_changepoint(args):
    est = hio.read_estimates(args.estimates)
    if args.chains < 1:
        raise ValidationError("--chains must be >= 1")
    model = changepoint.ChangepointModel(args.rate1, args.rate2)
    seeds = [args.seed] + [experiments.subseed(args.seed, c) for c in range(1, args.chains)]
    jobs = [(est.values, model, args.samples, args.burn_in, s) for s in seeds]
    posts = experiments._pmap(_chain, jobs, args.threads)
    outputs = []
    for c, post in enumerate(posts):
        name = "samples.csv" if c == 0 else f"samples_chain{c}.csv"
        rows = [(i, repr(float(a)), repr(float(b)), int(k))
                for i, (a, b, k) in enumerate(zip(post.b1, post.b2, post.kappa))]
        outputs.append(_write_csv(args.out / name, ("iter", "b1", "b2", "kappa"), rows))
    merged = changepoint.ChangepointPosterior(
        np.concatenate([p.b1 for p in posts]), np.concatenate([p.b2 for p in posts]),
        np.concatenate([p.kappa for p in posts]), posts[0].acceptance, posts[0].K, args.seed)
    doc = changepoint.summarize(merged).to_dict()
    doc["chains"] = [{"seed": s, "acceptance": p.acceptance} for s, p in zip(seeds, posts)]
    outputs.append(hio.write_json(args.out / "changepoint.json", doc))
    return outputs, [args.estimates]


def _cmd_experiment(args):
    out = args.out
    if out.suffix.lower() != ".json":
        out = out / "report.json"
    report = experiments.run(args.name, args.scale, args.seed, n_jobs=args.threads)
    outputs = [hio.write_json(out, report.to_dict())]
    for name, table in sorted(report.tables.items()):
        outputs.append(hio.write_text(out.with_name(f"{out.stem}_{name}.csv"), table.to_csv()))
    args.out = out.parent
    return outputs, []


COMMANDS = {
    "sim": _cmd_sim,
    "scan": _cmd_scan,
    "fit": _cmd_fit,
    "bayes": _cmd_bayes,
    "changepoint": _cmd_changepoint,
    "experiment": _cmd_experiment,
}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _config_doc(args) -> dict:
    # input files enter the hash by name and content, not by location
    skip = {"out", "threads"}
    return {k: (v.name if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
            if k not in skip}


def dispatch(argv=None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    if args.threads < 1:
        print("hawkes-decay: error: --threads must be >= 1", file=sys.stderr)
        return 1
    started = _now()
    config = _config_doc(args)
    try:
        outputs, inputs = COMMANDS[args.command](args)
        manifest = hio.RunManifest(
            command=["hawkes-decay", *argv], config_hash=hio.config_hash(config, inputs),
            seed=getattr(args, "seed", None), version=__version__, started=started,
            finished=_now(), outputs=[p.name for p in outputs])
        manifest.write(args.out)
    except ValidationError as exc:
        print(f"hawkes-decay {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"hawkes-decay {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hawkes-decay {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
