"""Command-line driver.

Exit codes: 0 success, 1 usage error, 2 I/O or data error, 3 exact oracle
capacity exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

from .bench import (
    Pipeline,
    SweepConfig,
    evaluate_result,
    load_config_file,
    run_query,
    run_sweep,
    sample_groups,
    write_header,
)
from .diffusion import CapacityError, SeedSpec, exact_spread
from .predictor import PredictorKind
from .query import ALGORITHMS
from .sketch import theta_bound
from .temporal_graph import ParseError, write_edge_pairs

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _algorithms(text: str) -> list[str]:
    names = []
    for part in text.split(","):
        part = part.strip().lower().replace("-", "_")
        if part == "all":
            names.extend(ALGORITHMS)
        elif part in ALGORITHMS:
            names.append(part)
        else:
            raise argparse.ArgumentTypeError(f"unknown algorithm {part!r}")
    return [a for a in ALGORITHMS if a in names]


def _predictor(text: str) -> PredictorKind:
    try:
        return PredictorKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file; flags override its keys")
    p.add_argument("--dataset", help="temporal edge list 'src dst ts'")
    p.add_argument("--snapshots", type=int, default=None, metavar="T")
    p.add_argument("--theta", type=int, default=None, metavar="N", help="number of sketches")
    p.add_argument("--predictor", type=_predictor, default=None,
                   help="persistence | union:<k> | threshold:<tau>")
    p.add_argument("--gt-file", default=None, help="edge list used directly as the predicted snapshot")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rtlr", description="Reconnecting top-l relationships queries.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("query", help="run one query group through the algorithms")
    _add_data_flags(q)
    q.add_argument("--group", default=None, help="comma-separated vertex labels")
    q.add_argument("--group-size", type=_int_list, default=None, metavar="K",
                   help="sample one random group of this size instead of --group")
    q.add_argument("--l", type=_int_list, default=None)
    q.add_argument("--algorithm", type=_algorithms, default=None)
    q.add_argument("--eval-trials", type=int, default=None)
    q.add_argument("--timing", action="store_true", help="fill runtime_ms (non-deterministic)")

    s = sub.add_parser("sweep", help="parameter sweep to CSV")
    _add_data_flags(s)
    s.add_argument("--l", type=_int_list, default=None)
    s.add_argument("--group-size", type=_int_list, default=None)
    s.add_argument("--queries", type=int, default=None, metavar="Q")
    s.add_argument("--algorithm", type=_algorithms, default=None)
    s.add_argument("--eval-trials", type=int, default=None)
    s.add_argument("--timing", action="store_true", help="fill runtime_ms (non-deterministic)")

    e = sub.add_parser("evaluate", help="spread gain of a given edge set")
    _add_data_flags(e)
    e.add_argument("--group", required=False, default=None)
    e.add_argument("--edges", default="", help="'u->v;x->y' in raw labels")
    e.add_argument("--eval-trials", type=int, default=None)
    e.add_argument("--exact", action="store_true", help="enumerate live-edge worlds instead of sampling")

    p = sub.add_parser("predict", help="write the predicted snapshot (or candidates)")
    _add_data_flags(p)
    p.add_argument("--candidates", action="store_true", help="write the candidate edges instead")

    t = sub.add_parser("theta-bound", help="sufficient sketch count for |V|, l, epsilon")
    t.add_argument("--vertices", type=int, default=None)
    t.add_argument("--dataset", default=None, help="take |V| from this edge list")
    t.add_argument("--l", type=int, default=10)
    t.add_argument("--epsilon", type=float, default=0.1)
    return parser


_CONFIG_KEYS = {
    "dataset": str, "snapshots": int, "theta": int, "predictor": _predictor, "gt-file": str,
    "seed": int, "out": str, "group": str, "group-size": _int_list, "l": _int_list,
    "queries": int, "algorithm": _algorithms, "eval-trials": int,
}


def _merge_config(args: argparse.Namespace) -> None:
    """Fill flags the user left unset from ``--config``."""
    if not getattr(args, "config", None):
        return
    for key, raw in load_config_file(args.config).items():
        if key not in _CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}")
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            try:
                setattr(args, attr, _CONFIG_KEYS[key](raw))
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {key}: {exc}") from None


def _sweep_config(args) -> SweepConfig:
    d = SweepConfig()
    return SweepConfig(
        dataset_path=args.dataset,
        T=args.snapshots if args.snapshots is not None else d.T,
        theta=args.theta if args.theta is not None else d.theta,
        l_values=getattr(args, "l", None) or d.l_values,
        group_sizes=getattr(args, "group_size", None) or d.group_sizes,
        num_queries=getattr(args, "queries", None) or d.num_queries,
        predictor=args.predictor or d.predictor,
        algorithms=getattr(args, "algorithm", None) or d.algorithms,
        seed=args.seed if args.seed is not None else d.seed,
        eval_trials=getattr(args, "eval_trials", None) or 0,
        gt_file=args.gt_file,
        timing=getattr(args, "timing", False),
    )


@contextlib.contextmanager
def _output(path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _labels(pipe: Pipeline, text: str) -> list[int]:
    try:
        return pipe.resolve_group(x.strip() for x in text.split(",") if x.strip())
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def cmd_query(args) -> int:
    cfg = _sweep_config(args)
    cfg.validate()
    pipe = Pipeline.from_config(cfg)
    if args.group:
        group = _labels(pipe, args.group)
    else:
        size = (args.group_size or cfg.group_sizes)[0]
        group = sample_groups(pipe.gt, size, 1, cfg.seed)[0]
    with _output(args.out) as out:
        w = write_header(out)
        for l in cfg.l_values:
            for row in run_query(pipe, group, l, cfg.algorithms, 0, cfg.eval_trials,
                                 cfg.seed, cfg.timing):
                w.writerow(row.as_csv())
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    cfg.validate()
    pipe = Pipeline.from_config(cfg)
    with _output(args.out) as out:
        run_sweep(cfg, out, pipe)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _sweep_config(args)
    if not args.group:
        raise UsageError("--group is required")
    pipe = Pipeline.from_config(cfg)
    group = _labels(pipe, args.group)
    try:
        edges = pipe.parse_edges(args.edges)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    present = [e for e in edges if pipe.gt.has_edge(*e)]
    if present:
        raise UsageError(f"edge(s) already in the predicted snapshot: {pipe.format_edges(present)}")
    with _output(args.out) as out:
        if args.exact:
            with_ = exact_spread(pipe.gt, SeedSpec.of(group, edges)).mean
            base = exact_spread(pipe.gt, SeedSpec.of(group)).mean
            out.write(f"method=exact gain={with_ - base:.6f} spread={with_:.6f} baseline={base:.6f}\n")
        else:
            trials = args.eval_trials or 10000
            est = evaluate_result(pipe.gt, group, edges, trials, cfg.seed)
            out.write(f"method=mc gain={est.mean:.6f} stderr={est.stderr:.6f} trials={est.trials}\n")
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = _sweep_config(args)
    pipe_graph = Pipeline.from_config(cfg)
    with _output(args.out) as out:
        if args.candidates:
            lab = pipe_graph.graph.labels
            for u, v in pipe_graph.ce:
                out.write(f"{lab[u]} {lab[v]}\n")
        else:
            write_edge_pairs(pipe_graph.gt, pipe_graph.graph.labels, out)
    print(f"# |V|={pipe_graph.graph.num_vertices} |E_t|={pipe_graph.gt.num_edges} "
          f"|CE|={len(pipe_graph.ce)}", file=sys.stderr)
    return EXIT_OK


def cmd_theta_bound(args) -> int:
    n = args.vertices
    if n is None:
        if not args.dataset:
            raise UsageError("give --vertices or --dataset")
        from .temporal_graph import load_temporal_edges
        n = load_temporal_edges(args.dataset).num_vertices
    try:
        value = theta_bound(n, args.l, args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"vertices={n} l={args.l} epsilon={args.epsilon:g} theta={value:.6g}")
    return EXIT_OK


COMMANDS = {
    "query": cmd_query,
    "sweep": cmd_sweep,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "theta-bound": cmd_theta_bound,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _merge_config(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rtlr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"rtlr: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (OSError, ParseError) as exc:
        print(f"rtlr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"rtlr: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
