"""Command line driver: ``wente-lab <suite> [flags]``.

Writes one CSV per experiment and ``summary.txt`` into ``--out`` and exits 0
only when every criterion passes.

Analytic descriptors accepted by ``sample`` (and the ``--rhs`` flag of
``validate-solver``) are sympy expressions in x, y, r, theta using numpy
function names, plus the catalog entries

    h            x/|x|^2 - x
    f(alpha)     x |x|^alpha
    a_alpha(al)  (alpha + 2)|x|^alpha
    psi(j)       plateau cutoff of level j
    chi(j)       dyadic step cutoff of level j
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .errors import ParameterError

SUBCOMMANDS = tuple(ex.SUITES) + ("all",)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wente-lab", description=__doc__.split("\n\n")[0])
    p.add_argument("suite", choices=SUBCOMMANDS)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-levels", type=int, dest="levels")
    p.add_argument("--nodes-per-level", type=int)
    p.add_argument("--n-theta", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--alpha-list", help="comma separated, fractions allowed (e.g. 1,1/2,1/4)")
    p.add_argument("--beta", help="comma separated beta values for the divergence sweep")
    p.add_argument("--out", type=Path, default=Path("wente-out"))
    p.add_argument("--config", type=Path, help="file of key = value lines (ExperimentConfig fields)")
    return p


def build_config(args: argparse.Namespace) -> ex.ExperimentConfig:
    pairs = ex.load_config_file(args.config) if args.config else {}
    cfg = ex.ExperimentConfig.from_pairs(pairs)
    alphas = ex.parse_list(args.alpha_list) if args.alpha_list else None
    betas = ex.parse_list(args.beta) if args.beta else None
    return cfg.updated(seed=args.seed, levels=args.levels, nodes_per_level=args.nodes_per_level,
                       n_theta=args.n_theta, samples=args.samples, alpha_list=alphas,
                       betas=betas, out=args.out)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = build_config(args)
        run = ex.run_all if args.suite == "all" else ex.SUITES[args.suite]
        report = run(cfg)
    except ParameterError as exc:
        print(f"wente-lab: {exc}", file=sys.stderr)
        return 2
    lines = report.lines()
    lines.append(f"OVERALL  {'PASS' if report.passed else 'FAIL'}")
    text = "\n".join(lines) + "\n"
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "summary.txt").write_text(text)
    sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
