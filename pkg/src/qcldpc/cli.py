"""Command-line surface: construct / analyze / threshold / optimize / simulate.

Every command is a pure function of its inputs, flags and seed; each output
file gets a sidecar ``<name>.manifest.json`` recording the command, input
digests, the full parameter set, seed, tool version and timestamp, so runs
can be replayed and compared.

Exit codes: 0 success, 2 usage, 3 validation error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import density, formats, optimize, simulate, tanner
from .construct import BaseMatrix, MaskMatrix, builtin_mask, label_search, lift
from .decoder import DecoderConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


@dataclasses.dataclass
class RunManifest:
    command: str
    inputs: dict  # path -> sha256
    parameters: dict
    seed: int | None
    version: str
    timestamp: str

    @classmethod
    def create(cls, command: str, args: argparse.Namespace, input_paths) -> "RunManifest":
        params = {
            k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")
        }
        digests = {}
        for path in input_paths:
            with open(path, "rb") as f:
                digests[str(path)] = hashlib.sha256(f.read()).hexdigest()
        return cls(
            command=command,
            inputs=digests,
            parameters=params,
            seed=params.get("seed"),
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )

    def write_for(self, output_path: str) -> None:
        with open(f"{output_path}.manifest.json", "w", encoding="utf-8") as f:
            json.dump(dataclasses.asdict(self), f, indent=2, sort_keys=True)
            f.write("\n")


def _float_list(text: str) -> list:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_construct(args) -> int:
    if args.base is not None:
        base, mask, p = formats.read_base(args.base)
        if args.p is not None and args.p != p:
            raise ValueError(f"--p {args.p} contradicts base file p={p}")
        p = args.p or p
        inputs = [args.base]
    else:
        if args.mask is None:
            raise ValueError("either --base FILE or --mask KIND is required")
        if args.p is None:
            raise ValueError("--p is required with --mask")
        mask = builtin_mask(args.mask, args.J, args.L)
        p = args.p
        base = None
        inputs = []
    if args.search is not None:
        objective = (
            "max-girth" if args.search == "girth" else "max-girth-then-min-ace-violations"
        )
        found = label_search(
            mask, p, objective=objective, budget=args.budget, seed=args.seed
        )
        base = found.base
        print(
            f"label search: girth {found.girth if found.girth is not None else '> cap'} "
            f"after {found.evaluations} evaluations"
        )
    elif base is None:
        rng = np.random.default_rng(args.seed)
        shifts = rng.integers(0, p, size=mask.shape, dtype=np.int64)
        shifts[mask.bits == 0] = 0
        base = BaseMatrix(shifts)
    pcm = lift(base, mask, p)
    manifest = RunManifest.create("construct", args, inputs)
    alist_path = f"{args.out}.alist"
    base_path = f"{args.out}.base"
    formats.write_alist(pcm, alist_path)
    manifest.write_for(alist_path)
    formats.write_base(base, mask, p, base_path)
    manifest.write_for(base_path)
    print(f"wrote {alist_path} ({pcm.r} x {pcm.n}) and {base_path}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    pcm = formats.read_alist(args.alist)
    report = tanner.audit(
        pcm,
        l_max=args.l_max,
        a_max=args.a_max,
        b_max=args.b_max,
        per_vn_cap=args.per_vn_cap,
    )
    print(report.to_text())
    if args.json is not None:
        manifest = RunManifest.create("analyze", args, [args.alist])
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=2)
            f.write("\n")
        manifest.write_for(args.json)
    return EXIT_OK


def _de_config(args) -> density.DeConfig:
    kwargs = {}
    for name in ("epsilon", "max_iter", "llr_max", "bits", "sigma_tol", "sigma_lo", "sigma_hi"):
        val = getattr(args, name, None)
        if val is not None:
            kwargs[name] = val
    return density.DeConfig(**kwargs)


def cmd_threshold(args) -> int:
    dist = formats.read_distribution(args.distribution)
    config = _de_config(args)
    result = density.threshold(dist, config)
    print(
        f"sigma* = {result.sigma_star:.6f} "
        f"(bracket [{result.bracket[0]:.6f}, {result.bracket[1]:.6f}], "
        f"{len(result.probes)} probes, bits={config.bits})"
    )
    if args.json is not None:
        manifest = RunManifest.create("threshold", args, [args.distribution])
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(result.to_dict(), f, indent=2)
            f.write("\n")
        manifest.write_for(args.json)
    return EXIT_OK


def cmd_optimize(args) -> int:
    config = _de_config(args)
    result = optimize.diff_evolution(
        args.lambda_support,
        args.rho_support,
        rate=args.rate,
        np_size=args.np_size,
        scale_f=args.scale_f,
        seed=args.seed,
        config=config,
        sigma0=args.sigma0,
        sigma_step=args.sigma_step,
        generations_per_sigma=args.generations,
        fitness_iters=args.fitness_iters,
    )
    print(
        f"best distribution: sigma* = {result.threshold.sigma_star:.6f} "
        f"after {result.generations} generations (ladder reached {result.sigma_reached:.4f})"
    )
    manifest = RunManifest.create("optimize", args, [])
    if args.out_dist is not None:
        formats.write_distribution(result.distribution, args.out_dist)
        manifest.write_for(args.out_dist)
        print(f"wrote {args.out_dist}")
    if args.json is not None:
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(result.to_dict(), f, indent=2)
            f.write("\n")
        manifest.write_for(args.json)
    return EXIT_OK


def cmd_simulate(args) -> int:
    pcm = formats.read_alist(args.alist)
    config = DecoderConfig(
        algorithm=args.decoder,
        max_iterations=args.max_iter,
        alpha=args.alpha,
        punctured=tuple(args.puncture or ()),
    )
    result = simulate.run_monte_carlo(
        pcm,
        args.snr,
        config,
        min_frame_errors=args.min_errors,
        max_frames=args.max_frames,
        seed=args.seed,
        threads=args.threads,
        rank_rate=args.rank_rate,
    )
    result.to_csv(args.out)
    RunManifest.create("simulate", args, [args.alist]).write_for(args.out)
    for p in result.points:
        print(
            f"Eb/N0 {p.snr_db:5.2f} dB  sigma {p.sigma:.4f}  frames {p.frames:7d}  "
            f"FER {p.fer:.3e}  BER {p.ber:.3e}  iters {p.mean_iters:.1f}"
        )
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcldpc",
        description="QC-LDPC construction, Tanner-graph audits, DE thresholds and BP simulation",
    )
    parser.add_argument("--version", action="version", version=f"qcldpc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="lift a (base, mask, p) description to an alist")
    c.add_argument("--base", help="base-matrix file (-1 marks masked blocks)")
    c.add_argument("--mask", choices=("M1", "M2", "M3", "M_RA"), help="built-in mask family")
    c.add_argument("--J", type=int, help="block rows for M1/M2/M3")
    c.add_argument("--L", type=int, help="block columns for M1/M2/M3")
    c.add_argument("--p", type=int, help="circulant size")
    c.add_argument("--search", choices=("girth", "girth-ace"), help="labeling search objective")
    c.add_argument("--budget", type=int, default=1000, help="labeling evaluations (default 1000)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="code", help="output prefix (default 'code')")
    c.set_defaults(func=cmd_construct)

    a = sub.add_parser("analyze", help="audit girth/diameter/ACE/TS/spectral bound")
    a.add_argument("alist")
    a.add_argument("--l-max", dest="l_max", type=int, default=None, help="cycle length cap (default girth+6)")
    a.add_argument("--a-max", dest="a_max", type=int, default=12)
    a.add_argument("--b-max", dest="b_max", type=int, default=8)
    a.add_argument("--per-vn-cap", dest="per_vn_cap", type=int, default=10_000)
    a.add_argument("--json", help="write the machine-readable report here")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("threshold", help="BP threshold of a degree distribution")
    t.add_argument("distribution", help="file of 'V degree fraction' / 'C degree fraction' lines")
    t.add_argument("--bits", type=int, default=None)
    t.add_argument("--llr-max", dest="llr_max", type=float, default=None)
    t.add_argument("--epsilon", type=float, default=None)
    t.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    t.add_argument("--sigma-lo", dest="sigma_lo", type=float, default=None)
    t.add_argument("--sigma-hi", dest="sigma_hi", type=float, default=None)
    t.add_argument("--tol", dest="sigma_tol", type=float, default=None)
    t.add_argument("--json", help="write the threshold report here")
    t.set_defaults(func=cmd_threshold)

    o = sub.add_parser("optimize", help="differential evolution over degree distributions")
    o.add_argument("--np", dest="np_size", type=int, default=10, help="population size (>= 6)")
    o.add_argument("--scale-f", dest="scale_f", type=float, default=0.5)
    o.add_argument("--lambda-support", dest="lambda_support", type=_int_list, required=True)
    o.add_argument("--rho-support", dest="rho_support", type=_int_list, required=True)
    o.add_argument("--rate", type=float, default=0.5)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--sigma0", type=float, default=0.85)
    o.add_argument("--sigma-step", dest="sigma_step", type=float, default=0.005)
    o.add_argument("--generations", type=int, default=20, help="generations per noise level")
    o.add_argument("--fitness-iters", dest="fitness_iters", type=int, default=100)
    o.add_argument("--bits", type=int, default=None)
    o.add_argument("--llr-max", dest="llr_max", type=float, default=None)
    o.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    o.add_argument("--sigma-lo", dest="sigma_lo", type=float, default=None)
    o.add_argument("--sigma-hi", dest="sigma_hi", type=float, default=None)
    o.add_argument("--tol", dest="sigma_tol", type=float, default=None)
    o.add_argument("--out-dist", dest="out_dist", help="write the best distribution here")
    o.add_argument("--json", help="write the optimizer report here")
    o.set_defaults(func=cmd_optimize)

    s = sub.add_parser("simulate", help="Monte-Carlo FER/BER of BP decoding")
    s.add_argument("alist")
    s.add_argument("--snr", type=_float_list, required=True, help="Eb/N0 points in dB")
    s.add_argument("--decoder", choices=("spa", "msa"), default="spa")
    s.add_argument("--alpha", type=float, default=1.0, help="min-sum normalization")
    s.add_argument("--max-iter", dest="max_iter", type=int, default=200)
    s.add_argument("--min-errors", dest="min_errors", type=int, default=100)
    s.add_argument("--max-frames", dest="max_frames", type=int, default=100_000)
    s.add_argument("--puncture", type=_int_list, default=None, help="punctured VN indices")
    s.add_argument("--rank-rate", dest="rank_rate", action="store_true",
                   help="use the GF(2)-rank rate for the Eb/N0 conversion")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--out", default="sim.csv")
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, formats.FormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (tanner.ConvergenceError, density.ConvergenceError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
