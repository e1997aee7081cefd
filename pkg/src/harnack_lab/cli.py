"""Command line interface.

Subcommands::

    harnack-lab mc maximal --config FILE [--force] [--workers N]
    harnack-lab topology count --coeff-file FILE [--max-depth D] [--oracle]
    harnack-lab spectral bergman|toeplitz|envelope ...
    harnack-lab conc hw|tails|orlicz ...
    harnack-lab ensemble gram --degree N --weight W --out FILE

Exit codes: 0 success, 2 configuration error, 3 certification budget
exceeded.

Coefficient files for ``topology count`` are text: a ``degree n`` line,
then either one coefficient per line in the lex order of the monomial
basis, or ``a b c value`` lines naming exponents explicitly; ``#`` starts
a comment.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .concentration import (
    ConcentrationProblem,
    get_sampler,
    hw_bound,
    norm_tail_experiment,
    orlicz_norm_estimate,
    empirical_quadratic_tail,
)
from .ensemble import MonomialBasis, build_orthonormal_basis, dimension, export_gram
from .envelope import build_envelope_grid, equilibrium_envelope_toric
from .geometry import Weight, build_quadrature
from .harness import (
    ExperimentConfig,
    estimate_maximal_probability,
    persist_run,
    rarity_trend,
)
from .spectral import bergman_at, density_check, test_functions, toeplitz_matrix
from .topology import count_zero_components, grid_component_count

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def _read_coeff_file(path):
    n = None
    seq = []
    explicit = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if n is None:
                if toks[0] != "degree" or len(toks) != 2:
                    raise ValueError("first line must be 'degree <n>'")
                n = int(toks[1])
                continue
            if len(toks) == 1:
                seq.append(float(toks[0]))
            elif len(toks) == 4:
                explicit.append((int(toks[0]), int(toks[1]), int(toks[2]), float(toks[3])))
            else:
                raise ValueError(f"bad coefficient line: {line!r}")
    if n is None:
        raise ValueError("missing 'degree' line")
    basis = MonomialBasis(n)
    if seq and explicit:
        raise ValueError("mix of bare and exponent-tagged coefficients")
    if seq:
        if len(seq) != basis.dim:
            raise ValueError(f"expected {basis.dim} coefficients, got {len(seq)}")
        coeffs = np.array(seq)
    else:
        coeffs = np.zeros(basis.dim)
        index = {tuple(e): k for k, e in enumerate(map(tuple, basis.exponents))}
        for a, b, c, v in explicit:
            if (a, b, c) not in index:
                raise ValueError(f"exponent ({a},{b},{c}) is not degree {n}")
            coeffs[index[(a, b, c)]] += v
    return n, coeffs, basis.exponents


def _cmd_mc_maximal(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = ExperimentConfig.from_text(fh.read())
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    def progress(row):
        print(
            f"n={row['n']} certified={row['certified']}/{row['trials']} "
            f"freq={row['freq_in_M']:.4g} mean_b0={row['mean_b0']:.4g}"
        )

    record = estimate_maximal_probability(cfg, workers=args.workers, progress=progress)
    try:
        files = persist_run(record, cfg.output_dir, force=args.force)
    except (FileNotFoundError, FileExistsError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for name, path in files.items():
        print(f"wrote {path}")
    if len(record.rows) >= 3:
        try:
            trend = rarity_trend(record)
            print(f"trend verdict: {trend['verdict']}")
        except ValueError:
            pass
    if any(r["aborted"] for r in record.rows):
        print("certification budget exceeded on at least one degree", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_topology_count(args) -> int:
    try:
        n, coeffs, exponents = _read_coeff_file(args.coeff_file)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rep = count_zero_components(n, coeffs, exponents, max_depth=args.max_depth)
    line = (
        f"b0={rep.b0} certified={'yes' if rep.certified else 'no'} "
        f"depth={rep.depth_used} discards={rep.unresolved_cells}"
    )
    if args.oracle:
        oracle = grid_component_count(n, coeffs, exponents)
        line += f" oracle_b0={oracle}"
    print(line)
    if not rep.certified and rep.discard_reason == "cell budget exceeded":
        return EXIT_BUDGET
    return EXIT_OK


def _csv_out(rows, header):
    print(",".join(header))
    for row in rows:
        print(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))


def _cmd_spectral(args) -> int:
    weight = Weight.from_spec(args.weight)
    if args.what == "bergman":
        onb = build_orthonormal_basis(args.degree, weight)
        d = dimension(args.degree)
        idx = np.linspace(0, len(onb.rule) - 1, args.points, dtype=int)
        vals = bergman_at(onb, onb.rule.hom[idx])
        total = density_check(onb)
        rows = [
            (args.degree, int(i), float(v), float(d), float(total - d))
            for i, v in zip(idx, vals)
        ]
        _csv_out(rows, ("n", "node", "value", "reference", "residual"))
    elif args.what == "toeplitz":
        onb = build_orthonormal_basis(args.degree, weight)
        phis = test_functions(weight)
        rows = []
        for name, phi in phis.items():
            tm = toeplitz_matrix(onb, phi, phi_id=name)
            ref = float(np.dot(onb.rule.weights, phi(onb.rule.hom) * bergman_at(onb, onb.rule.hom)))
            rows.append((args.degree, name, tm.trace, ref, tm.trace - ref))
            rows.append((args.degree, name + ":opnorm", tm.op_norm, tm.sup_abs_phi, max(0.0, tm.op_norm - tm.sup_abs_phi)))
        _csv_out(rows, ("n", "phi", "value", "reference", "residual"))
    else:  # envelope
        grid = build_envelope_grid(weight, window=(args.window[0], args.window[1]), num=args.points)
        try:
            env = equilibrium_envelope_toric(grid)
        except ValueError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        rows = []
        for s in env.slices:
            for x, p, e in zip(s.xs, s.profile, s.envelope):
                rows.append((0, s.slice_id, float(e), float(p), float(p - e)))
        _csv_out(rows, ("n", "slice", "value", "reference", "residual"))
    return EXIT_OK


def _cmd_conc(args) -> int:
    sampler = get_sampler(args.sampler)
    if args.what == "hw":
        A = np.eye(args.dim)
        freq = empirical_quadratic_tail(sampler, A, args.t, trials=args.trials, seed=args.seed)
        bound = hw_bound(
            ConcentrationProblem(A=A, K=sampler.psi2_parameter(), t=args.t, c=args.c)
        )
        _csv_out(
            [(args.sampler, args.dim, args.t, freq, bound, args.trials)],
            ("sampler", "N", "t", "frequency", "bound", "trials"),
        )
    elif args.what == "tails":
        res = norm_tail_experiment(args.dim, sampler, trials=args.trials, seed=args.seed)
        _csv_out(
            [(args.sampler, args.dim, float(args.dim**2), res["frequency"], res["reference_bound"], args.trials)],
            ("sampler", "N", "t", "frequency", "bound", "trials"),
        )
    else:  # orlicz
        est, argmax_p, warn = orlicz_norm_estimate(sampler, p_max=args.pmax, trials=args.trials)
        _csv_out(
            [(args.sampler, args.pmax, float(argmax_p), est, 0.0, args.trials)],
            ("sampler", "N", "t", "frequency", "bound", "trials"),
        )
        if warn:
            print("warning: supremum attained at p_max; increase --pmax", file=sys.stderr)
    return EXIT_OK


def _cmd_ensemble_gram(args) -> int:
    weight = Weight.from_spec(args.weight)
    onb = build_orthonormal_basis(args.degree, weight)
    export_gram(onb, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="harnack-lab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    mc = sub.add_parser("mc", help="Monte Carlo experiments")
    mcsub = mc.add_subparsers(dest="what", required=True)
    mx = mcsub.add_parser("maximal", help="near-maximal curve frequency per degree")
    mx.add_argument("--config", required=True)
    mx.add_argument("--force", action="store_true")
    mx.add_argument("--workers", type=int, default=1)
    mx.set_defaults(func=_cmd_mc_maximal)

    tp = sub.add_parser("topology", help="certified component counts")
    tpsub = tp.add_subparsers(dest="what", required=True)
    tc = tpsub.add_parser("count", help="count components of a coefficient file")
    tc.add_argument("--coeff-file", required=True)
    tc.add_argument("--max-depth", type=int, default=12)
    tc.add_argument("--oracle", action="store_true", help="also run the grid oracle")
    tc.set_defaults(func=_cmd_topology_count)

    spl = sub.add_parser("spectral", help="Bergman / Toeplitz / envelope tables")
    spl.add_argument("what", choices=("bergman", "toeplitz", "envelope"))
    spl.add_argument("--weight", default="fubini-study")
    spl.add_argument("--degree", type=int, default=3)
    spl.add_argument("--points", type=int, default=25)
    spl.add_argument("--window", type=float, nargs=2, default=(-4.0, 4.0))
    spl.set_defaults(func=_cmd_spectral)

    cc = sub.add_parser("conc", help="concentration experiments")
    cc.add_argument("what", choices=("hw", "tails", "orlicz"))
    cc.add_argument("--sampler", default="gaussian")
    cc.add_argument("--dim", type=int, default=6)
    cc.add_argument("--t", type=float, default=6.0)
    cc.add_argument("--c", type=float, default=1.0)
    cc.add_argument("--trials", type=int, default=100_000)
    cc.add_argument("--seed", type=int, default=31)
    cc.add_argument("--pmax", type=int, default=12)
    cc.set_defaults(func=_cmd_conc)

    en = sub.add_parser("ensemble", help="basis and Gram exports")
    ensub = en.add_subparsers(dest="what", required=True)
    eg = ensub.add_parser("gram", help="export the Gram matrix as text")
    eg.add_argument("--degree", type=int, required=True)
    eg.add_argument("--weight", default="fubini-study")
    eg.add_argument("--out", required=True)
    eg.set_defaults(func=_cmd_ensemble_gram)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
