"""Command-line front end: ``opnorm <command> [options]``.

Every command prints a JSON report on stdout. Exit status is 0 when all
hard checks pass, 1 when one fails and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import contraction as ct
from . import distrib as ds
from . import extension as ex
from . import fourier as fo
from . import metricmaps as mp
from . import opspace as op
from . import suite
from .config import (
    RunConfig,
    builtin_operator,
    dump_json,
    load_config,
    metric_params,
    parse_samples,
    parse_space,
    parse_vector,
    parse_vectors,
    space_from_section,
    write_csv,
)
from .errors import ConfigInvalid, OpnormError
from .spaces import FiniteSpace, InnerProductSpace, SampleSet, norm_metric
from .testfn import Bump


def _space(cfg: RunConfig, flag: str | None, section: str, fallback: FiniteSpace | None = None) -> FiniteSpace:
    if flag:
        return parse_space(flag)
    if cfg.section(section):
        return space_from_section(cfg.section(section))
    return fallback or FiniteSpace(2)


# -- subcommands ---------------------------------------------------------------


def cmd_norm(args, cfg: RunConfig):
    X = _space(cfg, args.space, "space")
    Y = _space(cfg, args.codomain, "codomain", X)
    name = args.operator or cfg.get("operator", "expr") or cfg.get("operator", "name", "identity")
    F = builtin_operator(name, X, Y)
    S = parse_samples(args.samples or cfg.get("operator", "samples", "halton:256"), X, cfg.seed)
    kind = op.NormKind.parse(args.kind or cfg.get("operator", "kind", "p"))
    est = op.estimate_norm(F, kind, S)
    eq = op.norm_equivalence_report(F, S, cfg.tol_exact)
    M = ct.estimate_M(F, S)
    report = {
        "estimate": est.as_dict(),
        "witness": est.witness,
        "p": eq.p,
        "p_star": eq.p_star,
        "equivalence_holds": eq.holds,
        "contraction_M": M.M_hat,
    }
    return report, eq.holds, {}


def cmd_ubt(args, cfg: RunConfig):
    X = _space(cfg, args.space, "space", FiniteSpace(3))
    kind = args.family or cfg.get("family", "kind", "unit_forms")
    size = args.size or cfg.get("family", "size", 32, int)
    rng = np.random.default_rng(cfg.seed)
    if kind == "unit_forms":
        R = FiniteSpace(1)
        members = []
        for j in range(size):
            a = rng.normal(size=X.dimension)
            members.append(op.linear_operator((a / np.linalg.norm(a) * rng.uniform(0.1, 1.0)).reshape(1, -1), X, R, f"a{j}"))
    elif kind == "scaled_identity":
        members = [float(j) * op.identity(X) for j in range(1, size + 1)]
    else:
        raise ConfigInvalid(f"unknown family {kind!r}; use unit_forms or scaled_identity")
    S = parse_samples(args.samples or "halton:64", X, cfg.seed)
    rep = ct.uniform_boundedness_harness(ct.FamilyHandle(members), S)
    report = {
        "family": kind,
        "size": size,
        "L_hat": rep.L_hat,
        "uniform_bound": rep.uniform_bound,
        "empirically_bounded": rep.empirically_bounded,
        "set_aside_pairs": rep.degenerate_pairs,
        "obstructions": rep.obstructions,
    }
    tables = {"pointwise.csv": (["sample", "c_x"], list(enumerate(rep.pointwise_bounds)))}
    return report, True, tables


def _functional_from(args, cfg: RunConfig) -> ex.PartialFunctional:
    pts = args.points or cfg.get("extend", "points")
    vals = args.values or cfg.get("extend", "values")
    if pts is None or vals is None:
        raise ConfigInvalid("extend needs points and values")
    return ex.PartialFunctional(parse_vectors(pts), parse_vector(vals).real)


def cmd_extend(args, cfg: RunConfig):
    mode = args.mode
    scale = args.scale or cfg.get("extend", "scale", 1.0, float)
    if mode in ("t4", "c2", "c3"):
        F = _functional_from(args, cfg)
        d = F.dimension
        norm = args.norm or cfg.get("extend", "norm", "ell1")
        X = parse_space(f"{norm}:{d}") if norm != "weighted" else parse_space("weighted:" + cfg.get("extend", "weights", ""))
        targets = parse_vectors(args.targets or cfg.get("extend", "targets", ""))
        if mode == "c3":
            r = ex.extend_posneg(F, cfg.get("extend", "M1", 1.0, float), cfg.get("extend", "M2", 1.0, float), targets, X, cfg.tol_exact)
            report = {"points": r.functional.points, "values": r.functional.values, "pair_margin": r.pair_margin,
                      "point_margin": r.point_margin, "parts_nonnegative": r.parts_nonnegative, "holds": r.holds}
            return report, r.holds, {}
        p = ex.norm_functional(X, scale)
        m = ex.STRICT if mode == "t4" else ex.ALL
        out = ex.extend_over_set(F, p, targets, m, cfg.tol_exact)
        v = ex.check_pairwise_inequality(out, p, m, cfg.tol_exact)
        report = {"mode": m, "points": out.points, "values": out.values, "margin": v.margin, "pairs": v.pairs, "passes": v.passes}
        rows = [(*pt, val) for pt, val in zip(out.points, out.values)]
        return report, v.passes, {"extended.csv": ([f"x{i}" for i in range(d)] + ["value"], rows)}
    if mode == "t5":
        d = cfg.get("extend", "dimension", 3, int)
        amb = InnerProductSpace(d)
        base = tuple(int(v) for v in parse_vector(cfg.get("extend", "base", "0")).real)
        a = parse_vector(cfg.get("extend", "coefficients", " ".join(["0.5"] + ["0"] * (d - 1)))).real
        p = ex.norm_functional(parse_space(f"{args.norm or cfg.get('extend', 'norm', 'ell2')}:{d}"), scale)
        state = ex.HilbertExtensionState(amb, base, lambda v: float(a @ v))
        t_grid = parse_vector(cfg.get("extend", "t_grid", "-2 -1 -0.5 0 0.5 1 2")).real
        reports = []
        for _ in range(d - len(base)):
            state, rep = ex.hilbert_step(state, p, t_grid, tol=cfg.tol_exact)
            reports.append({"direction": rep.direction, "r_values": rep.r_values, "pair_margin": rep.pair_margin,
                            "continuity_ratio": rep.continuity_ratio, "holds": rep.holds})
        ok = all(r["holds"] for r in reports)
        return {"steps": reports, "holds": ok}, ok, {}
    if mode == "c8":
        basis = parse_vectors(cfg.get("extend", "basis", "1 0 0"))
        coef = parse_vector(cfg.get("extend", "coefficients", "1")).real
        k = cfg.get("extend", "k", 1, int)
        res = ex.extend_via_linear(ex.LinearFormExtension(basis, coef, ("power", k)), InnerProductSpace(basis.shape[1]))
        report = {"representer": res.representer, "T_norm": res.T_norm, "T_hat_norm": res.T_hat_norm,
                  "pk_norm": res.pk_norm.as_dict() if res.pk_norm else None, "holds": res.holds}
        return report, res.holds, {}
    raise ConfigInvalid(f"unknown extend mode {mode!r}")


def cmd_bd(args, cfg: RunConfig):
    kind = args.kind or cfg.get("bd", "kind", "metric")
    X = _space(cfg, args.space, "space", FiniteSpace(2))
    S = parse_samples(args.samples or cfg.get("bd", "samples", "halton:64"), X, cfg.seed)
    if kind == "metric":
        Y = _space(cfg, None, "codomain", X)
        mm = mp.normed_mapping_metric(X, Y, S)
        F1 = mp.MappingHandle.from_operator(builtin_operator(args.operator or "double", X, Y))
        F2 = mp.MappingHandle.from_operator(builtin_operator("identity", X, Y))
        d = mp.metric_d(F1, F2, mm)
        v = mp.norm_structure_check(mm, F1, F2, tol=cfg.tol_exact)
        report = {"distance": d.as_dict(), "homogeneity_gap": v.homogeneity_gap, "triangle_excess": v.triangle_excess,
                  "translation_gap": v.translation_gap, "holds": v.holds}
        return report, v.holds, {}
    if kind == "algebra":
        alg = mp.MatrixAlgebra(2) if cfg.get("bd", "algebra", "matrix") == "matrix" else mp.ScalarAlgebra()
        mm = mp.MappingMetric(norm_metric(X), list(S.points), X.zero(), algebra=alg)
        rng = np.random.default_rng(cfg.seed)
        shape = (2, 2) if isinstance(alg, mp.MatrixAlgebra) else ()

        def rand_map():
            C0, C1 = rng.normal(size=shape), rng.normal(size=shape)
            u = rng.normal(size=X.dimension)
            return mp.MappingHandle(lambda x: C0 + C1 * float(x @ u), X.zero())

        v = mp.algebra_laws(rand_map(), rand_map(), rand_map(), mm, cfg.tol_exact)
        report = {"assoc_gap": v.assoc_gap, "distrib_gap": v.distrib_gap, "submult_margin": v.submult_margin,
                  "unit_gap": v.unit_gap, "holds": v.holds}
        return report, v.holds, {}
    if kind == "complete":
        terms = cfg.get("bd", "terms", 40, int)
        mm = mp.normed_mapping_metric(X, X, S)
        F = mp.MappingHandle.from_operator(3.0 * op.identity(X))
        G = mp.MappingHandle.from_operator(op.identity(X))
        v = mp.completeness_harness([F + 2.0**-n * G for n in range(1, terms + 1)], F, mm)
        rows = list(zip(range(1, terms + 1), v.limit_distances, v.tail_diameters))
        return {"final_distance": v.limit_distances[-1], "converged": v.converged}, v.converged, {
            "completeness.csv": (["n", "distance_to_limit", "tail_diameter"], rows)}
    raise ConfigInvalid(f"unknown bd kind {kind!r}; use metric, algebra or complete")


def _parse_functional(text: str, cfg: RunConfig) -> tuple[ds.FunctionalHandle, list]:
    name, _, arg = text.partition(":")
    kv = dict(part.split("=", 1) for part in arg.split(",") if "=" in part)
    try:
        if name == "delta":
            c = float(kv.get("c", 0.0))
            return ds.delta(c), [(c,)]
        if name == "dderiv":
            return ds.deriv_delta(int(kv.get("k", 1))), [(0.0,)]
        if name == "kernel":
            expr = cfg.get("kernel", "expr", "1 + 0*t")
            code = compile(expr, "<kernel>", "eval")
            m = lambda t: np.asarray(eval(code, {"__builtins__": {}, "np": np, "cos": np.cos, "sin": np.sin, "exp": np.exp, "abs": np.abs}, {"t": t})) * np.ones_like(t)
            kern = ds.IntegralKernel(m, (cfg.get("kernel", "lo", 0.0, float), cfg.get("kernel", "hi", 1.0, float)),
                                     tuple(parse_vector(cfg.get("kernel", "breakpoints", "")).real), name=expr)
            return ds.integral(kern), []
    except (ValueError, SyntaxError) as exc:
        raise ConfigInvalid(f"bad functional {text!r}: {exc}") from None
    raise ConfigInvalid(f"unknown functional {text!r}; use delta:c=.., dderiv:k=.. or kernel")


def cmd_distrib(args, cfg: RunConfig):
    L, anchors = _parse_functional(args.functional, cfg)
    params = metric_params(cfg, anchors=anchors + [(0.0,)])
    rng = np.random.default_rng(cfg.seed)
    size = args.size or cfg.get("family", "size", 50, int)
    family = [Bump((float(rng.uniform(-1.5, 1.5)),), float(rng.uniform(0.15, 1.2)), float(rng.uniform(0.2, 3.0))) for _ in range(size)]
    r = ds.functional_norm(L, family, params)
    ok = r.upper is None or r.lower <= r.upper + cfg.tol_quad
    report = {"functional": str(L.label), **r.as_dict(), "probes": size, "within_bound": ok}
    return report, ok, {"ratios.csv": (["probe", "ratio"], list(enumerate(r.ratios)))}


def cmd_fourier(args, cfg: RunConfig):
    what = args.check
    if what == "l1c0":
        g = fo.gaussian_integrable(cfg.get("fourier", "width", 1.0, float), cfg.get("fourier", "center", 0.0, float))
        t_max = cfg.get("fourier", "t_max", 6.0, float)
        v = fo.check_l1_c0_bound(g, np.linspace(-t_max, t_max, cfg.get("fourier", "t_count", 49, int)), cfg.tol_quad)
        return {"sup_abs": v.sup_abs, "L1_norm": v.L1_norm, "sharp_bound": v.sharp_bound, "holds": v.holds}, v.holds, {}
    if what == "plancherel":
        rng = np.random.default_rng(cfg.seed)
        n, count = cfg.get("fourier", "length", 1024, int), cfg.get("fourier", "vectors", 20, int)
        vs = [fo.plancherel_check(rng.normal(size=n) + 1j * rng.normal(size=n)) for _ in range(count)]
        ok = all(v.holds for v in vs)
        return {"worst_norm_gap": max(v.norm_gap for v in vs), "worst_roundtrip_gap": max(v.roundtrip_gap for v in vs), "holds": ok}, ok, {}
    if what == "schwartz":
        from .testfn import Gaussian

        k_max = cfg.get("fourier", "k_max", 3, int)
        amp = fo.schwartz_fourier_bounded([Gaussian((0.0,), 1.0 / s) for s in (1.0, 2.0, 4.0)], k_max)
        rows = [(s, *r) for s, r in zip((1, 2, 4), amp.ratios)]
        return {"max_ratio_per_k": amp.max_ratio_per_k, "finite": amp.finite}, amp.finite, {
            "amplification.csv": (["dilation", *[f"k{k}" for k in range(k_max + 1)]], rows)}
    raise ConfigInvalid(f"unknown fourier check {what!r}")


def cmd_suite(args, cfg: RunConfig):
    sc = suite.SuiteConfig(
        cfg.tol_exact, cfg.tol_quad,
        cfg.get("metric", "a", 10.0, float), cfg.get("metric", "b", 1.0, float), cfg.get("metric", "N", 2, int),
    )
    only = None if not args.only else {int(v) for v in args.only.split(",")}
    if only is None:
        report, results = suite.run_suite(cfg.seed, sc, None, determinism=not args.no_determinism)
    else:
        results = suite.run_battery(cfg.seed, sc, only)
        report = suite.report_dict(results, cfg.seed, sc)
    for r in results:
        print(r.line(), file=sys.stderr)
    tables = {name: t for r in results for name, t in r.tables.items()}
    return report, report["all_pass"], tables


COMMANDS = {
    "norm": cmd_norm, "ubt": cmd_ubt, "extend": cmd_extend, "bd": cmd_bd,
    "distrib": cmd_distrib, "fourier": cmd_fourier, "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with run settings")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="directory for report.json and CSV tables")
    common.add_argument("--tol-exact", type=float)
    common.add_argument("--tol-quad", type=float)

    parser = argparse.ArgumentParser(prog="opnorm", description="Numerical checks for nonlinear operator norms and extensions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="estimate an operator norm on samples")
    p.add_argument("--space", help="e.g. ell2:3 or weighted:1,2")
    p.add_argument("--codomain")
    p.add_argument("--operator", help="builtin name or numpy expression in x")
    p.add_argument("--kind", help="p | pstar | q:s | qstar:s | pk:k")
    p.add_argument("--samples", help="halton:N[:radius] or a CSV file")

    p = sub.add_parser("ubt", parents=[common], help="uniform boundedness harness")
    p.add_argument("--space")
    p.add_argument("--family", choices=["unit_forms", "scaled_identity"])
    p.add_argument("--size", type=int)
    p.add_argument("--samples")

    p = sub.add_parser("extend", parents=[common], help="extend a partial functional")
    p.add_argument("mode", choices=["t4", "c2", "c3", "t5", "c8"],
                   help="t4 distinct pairs, c2 all pairs, c3 positive/negative parts, t5 Hilbert steps, c8 f(|T|)")
    p.add_argument("--points", help='domain points, e.g. "1 0; -1 0"')
    p.add_argument("--values", help='values, e.g. "1 -1"')
    p.add_argument("--targets", help='points to add, e.g. "0 1"')
    p.add_argument("--norm", help="ell1, ell2, ellinf or weighted")
    p.add_argument("--scale", type=float)

    p = sub.add_parser("bd", parents=[common], help="mapping-space metric, algebra and completeness checks")
    p.add_argument("kind", nargs="?", choices=["metric", "algebra", "complete"])
    p.add_argument("--space")
    p.add_argument("--operator")
    p.add_argument("--samples")

    p = sub.add_parser("distrib", parents=[common], help="norm of a functional on test functions")
    p.add_argument("functional", help="delta:c=0.5 | dderiv:k=1 | kernel (reads [kernel])")
    p.add_argument("--size", type=int, help="number of bump probes")

    p = sub.add_parser("fourier", parents=[common], help="Fourier transform checks")
    p.add_argument("check", choices=["l1c0", "plancherel", "schwartz"])

    p = sub.add_parser("suite", parents=[common], help="run the full acceptance battery")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--no-determinism", action="store_true", help="skip the second run that checks reproducibility")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, {"seed": args.seed, "out": args.out, "tol_exact": args.tol_exact, "tol_quad": args.tol_quad})
        t0 = time.perf_counter()
        body, ok, tables = COMMANDS[args.command](args, cfg)
        elapsed = time.perf_counter() - t0
    except ConfigInvalid as exc:
        print(dump_json({"command": args.command, "error": "ConfigInvalid", "message": str(exc)}))
        return 2
    except OpnormError as exc:
        print(dump_json({"command": args.command, "error": type(exc).__name__, "message": str(exc), "verdict": "fail"}))
        return 1
    report = {"command": args.command, "argv": list(argv if argv is not None else sys.argv[1:]), "seed": cfg.seed,
              "verdict": "pass" if ok else "fail", "result": body}
    text = dump_json(report)
    print(text)
    if cfg.out:
        root = Path(cfg.out)
        root.mkdir(parents=True, exist_ok=True)
        (root / "report.json").write_text(text + "\n", encoding="utf-8")
        (root / "timing.json").write_text(dump_json({"seconds": elapsed}) + "\n", encoding="utf-8")
        for name, (header, rows) in tables.items():
            write_csv(root / name, header, rows)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
