"""Command-line orchestration.

Subcommands: search-inner, build-graph, build-ael, verify, thresholds,
compile-property.  Exit codes: 0 success (or decision matching --expect),
1 decision contrary to --expect or an honestly exhausted search, 2 usage
errors, 3 an enumeration guard was exceeded.

Every run writes a `<out>.run.kv` manifest with the resolved parameters and
seeds; rerunning the recorded command reproduces all outputs bit for bit
(the wallclock_ms line aside).  Rationals are written as `num/den`; floats
are rejected.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import _core
from .ael import (
    AelCode,
    BuildError,
    PipelineConfig,
    build_lcl_avoiding,
    build_list_decodable,
    read_bundle,
    write_bundle,
)
from .codes import LinearCode, code_from_text, code_to_text, search_inner_lcl, search_inner_rim
from .gf import GF
from .guards import GuardExceeded
from .lcl import (
    description_from_text,
    description_to_text,
    threshold_rate_v,
    threshold_rate_vu,
)
from .linalg import dist_subspaces, enumerate_subspaces
from .properties import (
    LrSpec,
    compile_lr_property,
    rlc_threshold_experiment,
    verify_lr_erasures,
    verify_specializations,
)
from .util import atomic_write_text, derive_seed, format_kv, parse_fraction


def _frac(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write_run_manifest(out_base: Path, args: argparse.Namespace,
                        extra: dict, started: float) -> None:
    items = {"subcommand": args.command, "argv": " ".join(sys.argv[1:]),
             "backend": _core.BACKEND}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func"):
            continue
        items[f"arg_{key}"] = value if not isinstance(value, Fraction) else value
    items.update(extra)
    items["wallclock_ms"] = int((time.time() - started) * 1000)
    atomic_write_text(out_base.with_suffix(out_base.suffix + ".run.kv"),
                      format_kv(items))


def _lr_spec_from_args(args) -> LrSpec:
    sigma = getattr(args, "sigma", None) or Fraction(0)
    return LrSpec(args.rho, sigma, args.ell, args.big_l,
                  relax_sigma_bound=bool(sigma > args.rho))


# -- search-inner ------------------------------------------------------------


def cmd_search_inner(args) -> int:
    started = time.time()
    field = GF(args.q)
    if args.mode == "rim":
        searcher = lambda seed: search_inner_rim(  # noqa: E731
            field, args.d, args.rate, args.big_l, args.eps, seed=seed,
            random_tries=args.random_tries)
    else:
        spec = _lr_spec_from_args(args)
        prop = compile_lr_property(spec, field)
        delta = args.delta if args.delta is not None else \
            args.eps / (2 * prop.locality)
        searcher = lambda seed: search_inner_lcl(  # noqa: E731
            prop, field, args.d, args.rate, delta, seed=seed,
            random_tries=args.random_tries)
    code = None
    if args.jobs > 1:
        # race seeded random phases; first witness wins, the exhaustive
        # sweep stays in the main thread afterwards if all miss
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(searcher, derive_seed(args.seed, f"job{j}"))
                       for j in range(args.jobs)]
            for fut in futures:
                found = fut.result()
                if found is not None and code is None:
                    code = found
    else:
        code = searcher(args.seed)
    out = Path(args.out)
    status = {"found": code is not None}
    if code is None:
        _write_run_manifest(out, args, status | {"exhausted": True}, started)
        print("search exhausted: no certified code at these parameters",
              file=sys.stderr)
        return 1
    atomic_write_text(out, code_to_text(code))
    _write_run_manifest(out, args, status, started)
    print(f"wrote {out} (q={args.q}, [{args.d}, {code.k}], "
          f"min distance {code.min_distance()})")
    return 0


# -- build-graph -------------------------------------------------------------


def cmd_build_graph(args) -> int:
    from .sampler import complete_bipartite, graph_to_text, random_biregular, verify_sampler

    started = time.time()
    if args.kind == "complete":
        graph = complete_bipartite(args.n)
    else:
        graph = random_biregular(args.n, args.d, derive_seed(args.seed, "graph"))
    cert = verify_sampler(graph, args.beta, args.eta, sizes=args.sizes,
                          seed=args.seed)
    out = Path(args.out)
    atomic_write_text(out, graph_to_text(graph))
    _write_run_manifest(out, args, {
        "cert_beta": cert.beta, "cert_eta": cert.eta, "cert_zeta": cert.zeta,
        "cert_verified": cert.verified, "cert_subsets": cert.subsets_checked,
        "cert_worst_violators": cert.worst_violators,
    }, started)
    print(f"wrote {out}; certificate zeta={cert.zeta} "
          f"({'exhaustive' if cert.verified else 'monte-carlo'})")
    return 0


# -- build-ael ---------------------------------------------------------------


def cmd_build_ael(args) -> int:
    started = time.time()
    config = PipelineConfig(
        q=args.q, d=args.d, big_n=args.n, inner_rate=args.inner_rate,
        outer_k=args.outer_k, eps=args.eps, seed=args.seed,
        graph_kind=args.graph, list_size=getattr(args, "big_l", None),
        delta=args.delta, random_tries=args.random_tries)
    try:
        if args.mode == "ld":
            code, report = build_list_decodable(config)
        else:
            spec = _lr_spec_from_args(args)
            prop = compile_lr_property(spec, GF(args.q))
            code, report = build_lcl_avoiding(prop, config)
    except BuildError as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_run_manifest(out / "bundle", args,
                            {"build_failed": str(exc)} | {
                                k: v for k, v in exc.report.items()
                                if isinstance(v, (str, int, bool, Fraction))},
                            started)
        return 1
    out = Path(args.out)
    write_bundle(code, out, extra={
        k: v for k, v in report.items()
        if isinstance(v, (str, int, bool, Fraction))})
    _write_run_manifest(out / "bundle", args, {
        k: v for k, v in report.items()
        if isinstance(v, (str, int, bool, Fraction))}, started)
    print(f"wrote bundle {out}: rate {report['rate_ael']} = "
          f"{report['rate_inner']} * {report['rate_outer']}, "
          f"alphabet GF({report['alphabet']}), verified={report['verified']}")
    return 0


# -- verify ------------------------------------------------------------------


def _load_code(args):
    if args.bundle:
        return read_bundle(args.bundle)
    return code_from_text(Path(args.code).read_text())


def cmd_verify(args) -> int:
    started = time.time()
    code = _load_code(args)
    if args.property == "lr-erasures":
        spec = _lr_spec_from_args(args)
        witness = verify_lr_erasures(code, spec,
                                     average_radius=args.average_radius)
        report = {"variant": "lr-erasures", "satisfied": witness is None,
                  "witness": witness}
    else:
        params = {}
        for key in ("rho", "sigma", "ell", "big_l", "t"):
            value = getattr(args, key, None)
            if value is not None:
                params[key] = value
        report = verify_specializations(code, args.property, **params)
    out = Path(args.out)
    body = {k: v for k, v in report.items()
            if isinstance(v, (str, int, bool, Fraction))}
    body["satisfied"] = report["satisfied"]
    if report.get("witness"):
        body["witness_codewords"] = ";".join(
            ",".join(str(s) for s in w) for w in report["witness"]["codewords"])
    atomic_write_text(out, format_kv(body))
    _write_run_manifest(out, args, {"satisfied": report["satisfied"]}, started)
    decision = "satisfied" if report["satisfied"] else "violated"
    print(f"{args.property}: {decision} (report in {out})")
    return 0 if decision == args.expect else 1


# -- thresholds --------------------------------------------------------------


def cmd_thresholds(args) -> int:
    started = time.time()
    text = Path(args.description).read_text()
    if not text.strip():
        print("empty description file", file=sys.stderr)
        return 2
    v = description_from_text(text)
    lines = ["subspace_dim subspace_basis r_vu"]
    for u in dist_subspaces(v.field, v.locality):
        r = threshold_rate_vu(v, u)
        basis = ";".join(",".join(str(e) for e in u.basis.row(i))
                         for i in range(u.dim)) or "-"
        lines.append(f"{u.dim} {basis} {r.numerator}/{r.denominator}")
    r_v = threshold_rate_v(v)
    lines.append(f"r_v - {r_v.numerator}/{r_v.denominator}")
    out = Path(args.out)
    atomic_write_text(out, "\n".join(lines) + "\n")
    extra = {"r_v": r_v}
    if args.montecarlo:
        subs = enumerate_subspaces(v.field, v.locality)
        u = subs[args.u_index] if args.u_index is not None else \
            min(dist_subspaces(v.field, v.locality),
                key=lambda s: (threshold_rate_vu(v, s), s.sort_key()))
        rates = [parse_fraction(r) for r in args.rates.split(",")]
        rows = rlc_threshold_experiment(v, u, args.n, rates, args.trials,
                                        args.seed)
        csv_lines = ["rate,trials,hits,frequency,gamma,wilson_low,wilson_high"]
        for row in rows:
            csv_lines.append(
                f"{row['rate']},{row['trials']},{row['hits']},"
                f"{row['frequency']},{row['gamma']},"
                f"{row['wilson_low']:.4f},{row['wilson_high']:.4f}")
        atomic_write_text(out.with_suffix(".csv"), "\n".join(csv_lines) + "\n")
        extra["montecarlo_csv"] = str(out.with_suffix(".csv"))
    _write_run_manifest(out, args, extra, started)
    print(f"wrote {out}; R_V = {r_v}")
    return 0


# -- compile-property --------------------------------------------------------


def cmd_compile_property(args) -> int:
    started = time.time()
    spec = _lr_spec_from_args(args)
    prop = compile_lr_property(spec, GF(args.q))
    out = Path(args.out)
    summary = {
        "property": prop.name,
        "locality": prop.locality,
        "t_p": prop.t_p,
        "kappa_terms": ";".join(f"{c}*log({a})" for c, a in prop.kappa.terms),
    }
    emitted = 0
    if args.n is not None:
        descs = list(prop.descriptions_at(args.n))
        summary["descriptions_at_n"] = len(descs)
        summary["n"] = args.n
        if args.emit:
            emit_dir = Path(args.emit)
            emit_dir.mkdir(parents=True, exist_ok=True)
            for i, v in enumerate(descs):
                atomic_write_text(emit_dir / f"desc_{i:05d}.txt",
                                  description_to_text(v))
                emitted += 1
            summary["emitted"] = emitted
    atomic_write_text(out, format_kv(summary))
    _write_run_manifest(out, args, {"emitted": emitted}, started)
    print(f"wrote {out}" + (f" and {emitted} description files" if emitted else ""))
    return 0


# -- parser ------------------------------------------------------------------


def _add_common(sub, seed=True, jobs=False):
    if seed:
        sub.add_argument("--seed", type=int, default=0)
    if jobs:
        sub.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aelforge",
        description="construct, search, and exhaustively verify "
                    "expander-redistributed codes and their local properties")
    commands = parser.add_subparsers(dest="command", required=True)

    si = commands.add_parser("search-inner", help="brute-force an inner code")
    si.add_argument("--mode", choices=("rim", "lcl"), required=True)
    si.add_argument("--q", type=int, required=True)
    si.add_argument("--d", type=int, required=True)
    si.add_argument("--rate", type=_frac, required=True)
    si.add_argument("--L", dest="big_l", type=int, required=True)
    si.add_argument("--eps", type=_frac, required=True)
    si.add_argument("--delta", type=_frac, default=None)
    si.add_argument("--property", choices=("lr",), default="lr")
    si.add_argument("--rho", type=_frac, default=Fraction(0))
    si.add_argument("--sigma", type=_frac, default=Fraction(0))
    si.add_argument("--ell", type=int, default=1)
    si.add_argument("--random-tries", type=int, default=200)
    si.add_argument("--out", required=True)
    _add_common(si, jobs=True)
    si.set_defaults(func=cmd_search_inner)

    bg = commands.add_parser("build-graph", help="construct and certify a sampler graph")
    bg.add_argument("--kind", choices=("complete", "random"), required=True)
    bg.add_argument("--n", type=int, required=True)
    bg.add_argument("--d", type=int, required=True)
    bg.add_argument("--beta", type=_frac, required=True)
    bg.add_argument("--eta", type=_frac, required=True)
    bg.add_argument("--sizes", choices=("exact", "up"), default="exact")
    bg.add_argument("--out", required=True)
    _add_common(bg)
    bg.set_defaults(func=cmd_build_graph)

    ba = commands.add_parser("build-ael", help="assemble and verify a full bundle")
    ba.add_argument("--mode", choices=("ld", "lcl"), required=True)
    ba.add_argument("--q", type=int, required=True)
    ba.add_argument("--d", type=int, required=True)
    ba.add_argument("--n", type=int, required=True)
    ba.add_argument("--inner-rate", dest="inner_rate", type=_frac, required=True)
    ba.add_argument("--outer-k", dest="outer_k", type=int, required=True)
    ba.add_argument("--eps", type=_frac, required=True)
    ba.add_argument("--L", dest="big_l", type=int, default=None)
    ba.add_argument("--rho", type=_frac, default=Fraction(0))
    ba.add_argument("--sigma", type=_frac, default=Fraction(0))
    ba.add_argument("--ell", type=int, default=1)
    ba.add_argument("--delta", type=_frac, default=None)
    ba.add_argument("--graph", choices=("complete", "random"), default="complete")
    ba.add_argument("--random-tries", type=int, default=200)
    ba.add_argument("--out", required=True)
    _add_common(ba, jobs=True)
    ba.set_defaults(func=cmd_build_ael)

    ve = commands.add_parser("verify", help="verify a recovery-family property")
    ve.add_argument("--property",
                    choices=("lr", "ld", "zero-error", "erasure-lr", "phf",
                             "lr-erasures"),
                    required=True)
    ve.add_argument("--code", default=None)
    ve.add_argument("--bundle", default=None)
    ve.add_argument("--rho", type=_frac, default=None)
    ve.add_argument("--sigma", type=_frac, default=None)
    ve.add_argument("--ell", type=int, default=None)
    ve.add_argument("--L", dest="big_l", type=int, default=None)
    ve.add_argument("--t", type=int, default=None)
    ve.add_argument("--average-radius", action="store_true")
    ve.add_argument("--expect", choices=("satisfied", "violated"),
                    default="satisfied")
    ve.add_argument("--out", required=True)
    _add_common(ve)
    ve.set_defaults(func=cmd_verify)

    th = commands.add_parser("thresholds", help="exact threshold-rate table")
    th.add_argument("--description", required=True)
    th.add_argument("--montecarlo", action="store_true")
    th.add_argument("--n", type=int, default=40)
    th.add_argument("--trials", type=int, default=200)
    th.add_argument("--rates", default="1/4,1/2,3/4")
    th.add_argument("--u-index", dest="u_index", type=int, default=None)
    th.add_argument("--out", required=True)
    _add_common(th)
    th.set_defaults(func=cmd_thresholds)

    cp = commands.add_parser("compile-property",
                             help="compile recovery parameters to descriptions")
    cp.add_argument("--rho", type=_frac, required=True)
    cp.add_argument("--sigma", type=_frac, default=Fraction(0))
    cp.add_argument("--ell", type=int, required=True)
    cp.add_argument("--L", dest="big_l", type=int, required=True)
    cp.add_argument("--q", type=int, required=True)
    cp.add_argument("--n", type=int, default=None)
    cp.add_argument("--emit", default=None)
    cp.add_argument("--out", required=True)
    _add_common(cp)
    cp.set_defaults(func=cmd_compile_property)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and not (args.code or args.bundle):
        parser.error("verify needs --code or --bundle")
    try:
        return args.func(args)
    except GuardExceeded as exc:
        print(f"unverified at this scale: {exc}", file=sys.stderr)
        return 3
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
