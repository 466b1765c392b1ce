"""``pushpull`` command line: profile, predict, simulate, sweep."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .advisor import ConfigCodeError, algo_properties, default_registry, predict
from .config import ConfigFileError, load_hardware, load_sim_params, load_thresholds
from .graph import GraphFormatError, load_graph
from .kernels import AlgoParams, KernelSpecError, result_to_json
from .memsim import breakdown_csv, default_config_set, simulate, sweep
from .memsim.params import SimConfigError
from .metrics import PROFILE_FIELDS, profile


class CliError(Exception):
    pass


def _fmt(x) -> str:
    return f"{x:.3f}" if isinstance(x, float) else str(x)


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [[_fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _csv(rows: list[dict], fields) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _algo(name: str) -> str:
    try:
        algo_properties(name)
    except KeyError as exc:
        raise CliError(exc.args[0]) from None
    return name.upper()


def _load(args):
    return load_graph(args.graph, args.graph_format)


def _profile_of(args, g):
    return profile(g, load_hardware(args.hw), load_thresholds(args.thresholds))


def cmd_profile(args) -> str:
    g = _load(args)
    d = _profile_of(args, g).to_dict()
    if args.format == "json":
        return _dumps({"graph": g.name, **d})
    if args.format == "csv":
        return _csv([d], PROFILE_FIELDS)
    rows = [[k, d[k]] for k in PROFILE_FIELDS]
    return f"graph {g.name}: {g.num_vertices} vertices, {g.num_edges} edges\n" + _table(rows, ["field", "value"])


def cmd_predict(args) -> str:
    if not args.all_algos and not args.algo:
        raise CliError("predict needs --algo ID or --all-algos")
    algos = list(default_registry()) if args.all_algos else [_algo(args.algo)]
    g = _load(args)
    prof = _profile_of(args, g)
    recs = [predict(a, prof, allow_drfrlx=not args.no_drfrlx, graph=g.name) for a in algos]
    if args.format == "json":
        return _dumps(recs if args.all_algos else recs[0])
    if args.format == "csv":
        rows = [{**r, "rationale": "; ".join(r["rationale"])} for r in recs]
        return _csv(rows, ["graph", "algorithm", "code", "direction", "coherence", "consistency", "rationale"])
    if args.all_algos:
        return _table([[g.name] + [r["code"] for r in recs]], ["graph"] + algos)
    r = recs[0]
    return f"{r['code']}\n" + "".join(f"  {why}\n" for why in r["rationale"])


def _algo_params(args) -> AlgoParams:
    kw = {"source": args.source}
    if args.max_iters is not None:
        kw["max_iters"] = args.max_iters
    return AlgoParams(**kw)


def cmd_simulate(args) -> str:
    algo = _algo(args.algo)
    params = load_sim_params(args.params, args.hw)
    g = _load(args)
    rep = simulate(g, algo, args.config, params, _algo_params(args))
    if args.format == "json":
        return _dumps({"graph": g.name, **rep.to_dict()})
    if args.format == "csv":
        return breakdown_csv([rep])
    d = rep.to_dict()
    head = [
        f"graph {g.name}  algorithm {algo}  config {rep.config}",
        f"total_cycles {rep.total_cycles}  launches {rep.kernel_launches}  iterations {rep.iterations}",
    ]
    stalls = _table([[k, d[k]] for k in ("busy", "comp", "data", "sync", "idle")], ["stall", "cycles"])
    counters = _table([[k, v] for k, v in rep.counters.items()], ["counter", "value"])
    res = result_to_json(rep.functional_result)
    shown = res if len(res) <= 16 else res[:16] + ["..."]
    return "\n".join(head) + "\n" + stalls + counters + f"result {shown}\n"


def cmd_sweep(args) -> str:
    algo = _algo(args.algo)
    params = load_sim_params(args.params, args.hw)
    g = _load(args)
    reports = sweep(g, algo, default_config_set(algo), params, _algo_params(args))
    predicted = predict(algo, _profile_of(args, g), graph=g.name)["code"]
    if args.format == "json":
        return _dumps({
            "graph": g.name, "algorithm": algo, "predicted": predicted,
            "ranking": [r.to_dict() for r in reports],
        })
    if args.format == "csv":
        return breakdown_csv(reports)
    rows = [
        [i + 1, r.config + (" *" if r.config == predicted else ""), r.total_cycles,
         *(r.breakdown[k] for k in ("busy", "comp", "data", "sync", "idle"))]
        for i, r in enumerate(reports)
    ]
    out = _table(rows, ["rank", "config", "total_cycles", "busy", "comp", "data", "sync", "idle"])
    return out + f"* advisor prediction: {predicted}\n"


def _common(defaults: bool) -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; the subcommand
    # copy suppresses its defaults so it cannot clobber a flag given earlier
    def d(value):
        return value if defaults else argparse.SUPPRESS

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default=d("table"))
    common.add_argument("--hw", metavar="PATH", default=d(None), help="hardware key = value file")
    common.add_argument("--thresholds", metavar="PATH", default=d(None), help="classification thresholds file")
    common.add_argument("--params", metavar="PATH", default=d(None), help="simulator parameters file")
    common.add_argument("--graph-format", choices=("mtx", "el"), default=d(None),
                        help="override format inferred from the file extension")
    return common


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pushpull", description=__doc__, parents=[_common(True)])
    common = _common(False)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], help="volume, reuse and imbalance of a graph")
    p.add_argument("graph")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("predict", parents=[common], help="advise a system configuration")
    p.add_argument("graph")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--algo")
    grp.add_argument("--all-algos", action="store_true")
    p.add_argument("--no-drfrlx", action="store_true", help="exclude relaxed-atomics configurations")
    p.set_defaults(func=cmd_predict)

    for name, func, text in (
        ("simulate", cmd_simulate, "simulate one configuration"),
        ("sweep", cmd_sweep, "simulate and rank the default configurations"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("graph")
        p.add_argument("--algo", required=True)
        if name == "simulate":
            p.add_argument("--config", required=True, help="three-letter code such as SGR or TG0")
        p.add_argument("--source", type=int, default=0, help="SSSP source vertex")
        p.add_argument("--max-iters", type=int, default=None)
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CliError, GraphFormatError, ConfigFileError, ConfigCodeError, SimConfigError,
            KernelSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if str(exc).startswith("cannot open") else 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
