"""Command line entry point: ``muntzlab <subcommand> [--config FILE] ...``.

Exit codes: 0 every verdict PASS, 1 some FAIL, 2 inconclusive, 3 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from .config import Config, build_measure, build_operator, build_partition, load_config
from .errors import ConfigError, MuntzLabError
from .exponents import check_subgeometric
from .measures import distribution, lp_norm
from .muntz_poly import MuntzPolynomial, sup_norm
from . import typeconst as tc
from . import verify as vf

EXIT = {vf.PASS: 0, vf.FAIL: 1, vf.INCONCLUSIVE: 2}
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", default=d(None), help="INI experiment file")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--out", default=d(None), help="directory for JSON/CSV reports")
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--parallel", type=int, default=d(1), help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="muntzlab", description=__doc__.splitlines()[0])
    _globals(ap, False)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    cmds = {
        "seq": "validate the configured exponent sequence and partition",
        "norm": "weighted L^p norm or distribution value of a polynomial",
        "typeconst": "per-block restricted constants or a global lower bound",
        "thmA": "interpolation check for beta >= 1",
        "thmB": "interpolation check for 0 < beta < 1",
        "growth": "counterexample growth fits",
        "necessity": "summability of the eps_k profile of a positive operator",
        "embed": "moment conditions versus embedding constants",
        "report": "summarize JSON reports in --out",
    }
    ps = {}
    for name, help_ in cmds.items():
        ps[name] = sub.add_parser(name, help=help_)
        _globals(ps[name], True)
    ps["norm"].add_argument("--poly", required=True, help='JSON terms, e.g. "[[2, 1], [3, -1]]"')
    ps["norm"].add_argument("--p", type=float, default=None)
    ps["norm"].add_argument("--level", type=float, default=None)
    ps["typeconst"].add_argument("--kind", default="restricted-strong",
                                 choices=("restricted-strong", "restricted-weak",
                                          "global-strong-lower"))
    ps["typeconst"].add_argument("--s", type=float, default=None, help="exponent (default r)")
    ps["typeconst"].add_argument("--k-max", type=int, default=None)
    ps["growth"].add_argument("--which", choices=("subcritical", "supercritical"), default=None)
    return ap


def _interp_cfg(cfg: Config):
    part = build_partition(cfg.sequence)
    mu = build_measure(cfg.measure)
    E = cfg.experiment
    try:
        return tc.InterpolationConfig(float(E["p"]), float(E["q"]), float(E["r"]),
                                      float(E.get("alpha", 1.0)), float(E.get("beta", 1.0)),
                                      mu, part)
    except KeyError as e:
        raise ConfigError(f"[experiment] needs {e}") from e


def _emit(args, name: str, payload: dict, tables: dict | None = None, csv_text: str | None = None):
    text = json.dumps(vf._jsonable(payload), sort_keys=True, indent=1)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{name}.json"), "w") as fh:
            fh.write(text + "\n")
        for tname, body in (tables or {}).items():
            with open(os.path.join(args.out, f"{name}_{tname}.csv"), "w") as fh:
                fh.write(body)
    if args.format == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        print(text)


def _emit_report(args, rep: vf.ExperimentReport) -> int:
    tables = {t: rep.table_csv(t) for t, rows in rep.tables.items()
              if isinstance(rows, list) and rows and isinstance(rows[0], dict)}
    first = next(iter(tables.values()), "")
    _emit(args, rep.experiment, rep.to_dict(), tables, first)
    return EXIT[rep.verdict]


def cmd_seq(args, cfg):
    part = build_partition(cfg.sequence)
    out = {"partition": part.to_dict(), "n_blocks": part.n_blocks,
           "endpoint_ratios": part.endpoint_ratios().tolist(),
           "reciprocal_sum": part.seq.reciprocal_sum}
    qp = cfg.sequence.get("q_prime")
    if qp is not None:
        chk = check_subgeometric(part, float(qp))
        out["subgeometric"] = {"ok": chk.ok, "first_violation": chk.first_violation}
    _emit(args, "seq", out)
    return 0


def cmd_norm(args, cfg):
    try:
        f = MuntzPolynomial.from_json(args.poly)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"bad --poly: {e}") from e
    mu = build_measure(cfg.measure)
    out = {"poly": f.to_list(), "measure": mu.to_dict(), "sup": sup_norm(f)}
    if args.p is not None:
        out["p"] = args.p
        out["norm"] = lp_norm(f, args.p, mu)
    if args.level is not None:
        out["level"] = args.level
        out["distribution"] = distribution(f, mu, args.level)
    _emit(args, "norm", out)
    return 0


def cmd_typeconst(args, cfg):
    icfg = _interp_cfg(cfg)
    T = build_operator(cfg.operator, icfg.part)
    s = args.s if args.s is not None else icfg.r
    k_max = args.k_max if args.k_max is not None else cfg.get("k_max", icfg.part.n_blocks - 1)
    ks = range(min(int(k_max) + 1, icfg.part.n_blocks))
    rep = tc.type_constant_report(T, icfg, args.kind, s, ks, seed=args.seed,
                                  parallel=args.parallel,
                                  family_size=int(cfg.get("family_size", 200)))
    _emit(args, f"typeconst_{args.kind}", rep.to_dict(), {"constants": rep.to_csv()}, rep.to_csv())
    return 0


def cmd_thm(args, cfg, which):
    icfg = _interp_cfg(cfg)
    T = build_operator(cfg.operator, icfg.part)
    run = vf.run_theorem_A_check if which == "A" else vf.run_theorem_B_check
    rep = run(T, icfg, family_size=int(cfg.get("family_size", 100)), seed=args.seed,
              k_max=cfg.get("k_max"), parallel=args.parallel)
    return _emit_report(args, rep)


def cmd_growth(args, cfg):
    which = args.which or cfg.get("which", "subcritical")
    params = {k: cfg.experiment[k] for k in ("beta", "r", "eps", "eta", "alpha", "gamma", "ratio")
              if k in cfg.experiment}
    rep = vf.run_counterexample_growth(which, params, cfg.get("N_list", [8, 16, 32, 64, 128]),
                                       seed=args.seed)
    return _emit_report(args, rep)


def cmd_necessity(args, cfg):
    icfg = _interp_cfg(cfg)
    T = build_operator(cfg.operator, icfg.part)
    rep = vf.run_necessity_check(T, icfg, int(cfg.get("k_max", 40)), seed=args.seed)
    return _emit_report(args, rep)


def cmd_embed(args, cfg):
    part = build_partition(cfg.sequence)
    mu = build_measure(cfg.measure)
    E = cfg.experiment
    rep = vf.run_embedding_corollaries(mu, part, float(E.get("alpha", 1.0)),
                                       float(E.get("beta", 1.0)), float(E.get("p", 1.0)),
                                       E.get("r_list", [2.0]),
                                       family_size=int(E.get("family_size", 50)),
                                       seed=args.seed,
                                       equivalence=bool(E.get("equivalence", True)),
                                       parallel=args.parallel)
    return _emit_report(args, rep)


def cmd_report(args, cfg):
    if not args.out:
        raise ConfigError("report needs --out pointing at a report directory")
    rows, worst = [], 0
    for path in sorted(glob.glob(os.path.join(args.out, "*.json"))):
        with open(path) as fh:
            d = json.load(fh)
        if "verdict" not in d:
            continue
        rows.append({"experiment": d["experiment"], "verdict": d["verdict"]})
        worst = max(worst, {0: 0, 2: 1, 1: 2}[EXIT[d["verdict"]]])
    if args.format == "csv":
        sys.stdout.write("experiment,verdict\n" + "".join(f"{r['experiment']},{r['verdict']}\n"
                                                          for r in rows))
    else:
        print(json.dumps(rows, indent=1))
    if not rows:
        return EXIT[vf.INCONCLUSIVE]
    return {0: 0, 1: 2, 2: 1}[worst]


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        handlers = {
            "seq": cmd_seq, "norm": cmd_norm, "typeconst": cmd_typeconst,
            "thmA": lambda a, c: cmd_thm(a, c, "A"), "thmB": lambda a, c: cmd_thm(a, c, "B"),
            "growth": cmd_growth, "necessity": cmd_necessity, "embed": cmd_embed,
            "report": cmd_report,
        }
        return handlers[args.cmd](args, cfg)
    except (ConfigError, MuntzLabError, ValueError) as e:
        print(f"muntzlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
