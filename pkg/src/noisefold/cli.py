"""Command-line entry point.

Exit codes: 0 success, 1 usage/config/I-O error, 2 numerical precondition
violated, 3 theorem verification failure.
"""

import argparse
import sys

from . import analysis, harness, recovery, textio, whitening
from .ensembles import FAMILIES, EnsembleSpec
from .errors import ConfigError, ConvergenceError, PreconditionError
from .model import NoiseSpec

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_THEOREM = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_matrix_source(sp):
    sp.add_argument("--matrix", help="matrix text file (otherwise generate one)")
    sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--r", type=int, help="number of bases for concat-orthobases")
    sp.add_argument("--seed", type=int)


def _load_matrix(args):
    if args.matrix:
        return textio.read_matrix(args.matrix)
    if args.family is None or args.n is None or args.seed is None:
        raise ConfigError("give --matrix FILE, or --family, --n, --p/--r and --seed")
    p = args.p
    if args.r is not None:
        p = args.r * args.n
    if p is None:
        raise ConfigError("--p (or --r for concat-orthobases) is required")
    return EnsembleSpec(args.family, args.n, p, args.seed).generate()


def _out(path):
    return open(path, "w", newline="\n", encoding="ascii") if path else sys.stdout


def cmd_gen(args):
    A = _load_matrix(args)
    fh = _out(args.out)
    textio.write_matrix(fh, A)
    if args.out:
        fh.close()
    return EXIT_OK


def cmd_eta(args):
    A = _load_matrix(args)
    eta = whitening.compute_eta(A)
    print(f"eta={eta:.16e}")
    if args.t is not None:
        n, p = A.shape
        bound = whitening.eta_gaussian_bound(n, p, args.t)
        print(f"gaussian_bound={bound:.16e}")
        print(f"within_bound={'true' if eta <= bound else 'false'}")
    return EXIT_OK


def cmd_coherence(args):
    A = _load_matrix(args)
    print(f"coherence={analysis.coherence(A):.16e}")
    return EXIT_OK


def cmd_rip(args):
    A = _load_matrix(args)
    report = analysis.rip_constants(A, args.s, subset_cap=args.cap, workers=args.workers)
    sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_whiten(args):
    A = _load_matrix(args)
    noise = NoiseSpec(args.sigma, args.sigma0)
    system = whitening.whiten(A, noise)
    n, p = A.shape
    fold = whitening.folding_gamma(args.sigma, args.sigma0, n, p)
    print(f"gamma={system.gamma:.16e}")
    if fold.degradation is not None:
        print(f"degradation={fold.degradation:.16e}")
    print(f"eta={system.eta:.16e}")
    if args.out_b:
        textio.write_matrix(args.out_b, system.B)
    if args.out_w:
        textio.write_matrix(args.out_w, system.W)
    if args.y:
        y = textio.read_vector(args.y)
        fh = _out(args.out_y)
        if fh is sys.stdout:
            print("whitened_y:")
        textio.write_vector(fh, whitening.apply_whitening(system, y))
        if args.out_y:
            fh.close()
    return EXIT_OK


def cmd_recover(args):
    A = _load_matrix(args)
    y = textio.read_vector(args.y)
    result = recovery.ALGORITHMS[args.algorithm](A, y, args.s)
    fh = _out(args.out)
    textio.write_vector(fh, result.xhat)
    if args.out:
        fh.close()
    print(
        f"support={' '.join(map(str, result.support))} "
        f"residual_norm={result.residual_norm:.6e} iterations={result.iterations}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_sweep(args):
    config = harness.parse_config(args.config)
    records = harness.run_folding_sweep(config, workers=args.workers)
    path = args.output or config.output_path
    if path:
        harness.emit_csv(records, path)
    else:
        sys.stdout.write(harness.csv_text(records))
    return EXIT_OK


def _parse_seeds(text):
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def cmd_verify(args):
    kwargs = {}
    if args.config:
        cfg = harness.parse_config(args.config)
        kwargs = dict(
            n=cfg.n,
            p=cfg.p,
            s=cfg.s,
            sigma=cfg.sigma,
            sigma0=cfg.sigma0,
            family=cfg.family,
            subset_cap=cfg.subset_cap,
        )
    for key in ("n", "p", "s", "sigma", "sigma0", "family"):
        val = getattr(args, key)
        if val is not None:
            kwargs[key] = val
    status, report = harness.run_verification_suite(
        seeds=_parse_seeds(args.seeds),
        workers=args.workers,
        covariance_draws=args.covariance_draws,
        **kwargs,
    )
    sys.stdout.write(report.to_text())
    return status


def build_parser():
    parser = _Parser(prog="noisefold", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("gen", help="write a seeded measurement matrix")
    _add_matrix_source(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("eta", help="distance of (n/p) A A^T from the identity")
    _add_matrix_source(sp)
    sp.add_argument("--t", type=float, help="also report the Gaussian bound at this t")
    sp.set_defaults(func=cmd_eta)

    sp = sub.add_parser("coherence", help="mutual coherence of the columns")
    _add_matrix_source(sp)
    sp.set_defaults(func=cmd_coherence)

    sp = sub.add_parser("rip", help="exhaustive RIP constants of order s")
    _add_matrix_source(sp)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--cap", type=int, default=analysis.TOL.subset_cap)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_rip)

    sp = sub.add_parser("whiten", help="build the whitened system B = (Q/gamma)^(-1/2) A")
    _add_matrix_source(sp)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--sigma0", type=float, required=True)
    sp.add_argument("--out-b")
    sp.add_argument("--out-w")
    sp.add_argument("--y", help="observation vector file to whiten")
    sp.add_argument("--out-y")
    sp.set_defaults(func=cmd_whiten)

    sp = sub.add_parser("recover", help="recover a sparse vector from y")
    _add_matrix_source(sp)
    sp.add_argument("--y", required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--algorithm", choices=sorted(recovery.ALGORITHMS), default="omp")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_recover)

    sp = sub.add_parser("sweep", help="run the noise-folding Monte Carlo experiment")
    sp.add_argument("--config", required=True)
    sp.add_argument("--output")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="check the RIP and coherence bounds on seeded instances")
    sp.add_argument("--config")
    sp.add_argument("--seeds", default="1-20", help="'a-b' or comma-separated list")
    sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--sigma0", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--covariance-draws", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"noisefold: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, ConvergenceError) as exc:
        print(f"noisefold: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError, TypeError) as exc:
        print(f"noisefold: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
