"""Command-line interface.

One executable, `plumbcalc`, with subcommands for dataset generation,
training, evaluation, searching and invariants.  Every artifact-producing
run also writes `<out>.manifest.json` recording the command, full config,
seeds, SHA-256 hashes of inputs and outputs, and wall-clock time, so runs
are auditable and reruns comparable.  Exit codes: 0 success, 1 usage,
2 bad input, 3 exhausted search budget where that is fatal.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import classify, generate, rl, search
from .graph import determinant, read_graph

EXIT_USAGE = 1
EXIT_BAD_INPUT = 2
EXIT_BUDGET = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_BAD_INPUT):
        super().__init__(message)
        self.code = code


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(
    manifest_path: str,
    command: str,
    config: dict,
    inputs: list[str],
    outputs: list[str],
    elapsed: float,
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "inputs": {p: _sha256(p) for p in inputs},
        "outputs": {p: _sha256(p) for p in outputs},
        "wall_clock_s": round(elapsed, 3),
    }
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_graph(path: str):
    try:
        return read_graph(path)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read graph {path}: {exc}") from exc


def _config_dict(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _manifest_path(args, default_anchor: str | None):
    if getattr(args, "manifest", None):
        return args.manifest
    if default_anchor:
        return default_anchor + ".manifest.json"
    return None


def _finish(args, command: str, config: dict, inputs: list[str], outputs: list[str], t0: float, anchor: str | None):
    manifest_path = _manifest_path(args, anchor)
    if manifest_path:
        _write_manifest(manifest_path, command, config, inputs, outputs, time.time() - t0)


# --- subcommand handlers ------------------------------------------------------


def _cmd_gen(args) -> int:
    t0 = time.time()
    cfg = generate.GeneratorConfig()
    if args.kind in ("equiv", "inequiv", "tweak"):
        header = generate.make_pair_dataset(args.out, args.kind, args.count, args.seed, args.nmax, cfg)
    elif args.kind == "sl-mix":
        header = generate.make_sl_dataset(args.out, args.seed, n_max=args.nmax, total=args.count)
    elif args.kind == "test4":
        header = generate.make_test4_pairs(args.out, args.count, args.seed, args.nmax)
    else:  # pragma: no cover - argparse choices guard this
        raise CliError(f"unknown kind {args.kind}")
    print(json.dumps(header, sort_keys=True))
    _finish(args, "gen", _config_dict(args), [], [args.out], t0, args.out)
    return 0


def _cmd_train_sl(args) -> int:
    t0 = time.time()
    model = classify.build_model(args.arch, seed=args.seed)
    config = classify.TrainConfig(
        epochs=args.epochs,
        lr=args.lr,
        batch_size=args.batch,
        val_fraction=args.val_frac,
        seed=args.seed,
        early_stop_acc=args.early_stop_acc,
    )
    try:
        history = classify.train_sl(model, args.data, config)
    except (OSError, ValueError) as exc:
        raise CliError(f"training failed: {exc}") from exc
    model.save(args.out)
    metrics_path = args.metrics or (args.out + ".metrics.csv")
    classify.write_metrics_csv(metrics_path, history)
    best_val = max(r["accuracy"] for r in history if r["split"] == "val")
    print(json.dumps({"arch": args.arch, "epochs_run": history[-1]["epoch"], "best_val_accuracy": best_val}))
    _finish(args, "train-sl", _config_dict(args),
            [args.data], [args.out, metrics_path], t0, args.out)
    return 0


def _cmd_eval_sl(args) -> int:
    t0 = time.time()
    try:
        model = classify.load_model(args.model)
        result = classify.evaluate(model, args.data)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write("epoch,split,loss,accuracy\n")
        fh.write(f"0,test,{result['mean_loss']},{result['accuracy']}\n")
    print(json.dumps(result, sort_keys=True))
    _finish(args, "eval-sl", _config_dict(args),
            [args.model, args.data], [args.report], t0, args.report)
    return 0


def _cmd_train_rl(args) -> int:
    t0 = time.time()
    if args.algo == "a3c":
        cfg = rl.A3CConfig(
            episodes=args.episodes,
            workers=args.workers,
            lr=args.lr,
            seed=args.seed,
            async_workers=args.async_workers,
        )
        net, history = rl.a3c_train(cfg)
        net.save(args.out, {"episodes": args.episodes})
    else:
        qcfg = rl.DQNConfig(episodes=args.episodes, lr=args.lr, seed=args.seed)
        net, history = rl.dqn_train(qcfg)
        net.save(args.out, {"episodes": args.episodes})
    log_path = args.log or (args.out + ".log.csv")
    with open(log_path, "w", encoding="utf-8") as fh:
        fh.write("episode,return,steps,terminal_f\n")
        for row in history:
            fh.write(f"{row['episode']},{row['ret']},{row['steps']},{row['final_f']}\n")
    mean_last = sum(r["ret"] for r in history[-500:]) / min(500, len(history))
    print(json.dumps({"algo": args.algo, "episodes": len(history), "mean_return_last500": mean_last}))
    _finish(args, "train-rl", _config_dict(args),
            [], [args.out, log_path], t0, args.out)
    return 0


def _load_policy_selector(path: str):
    try:
        store, manifest = rl.ParamStore.load(path)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read checkpoint {path}: {exc}") from exc
    arch = manifest.get("arch", "")
    if arch.startswith("dqn"):
        return rl.greedy_q_selector(rl.QNet(store=store)), arch
    return rl.sampling_selector(rl.PolicyValueNet(store=store)), arch


def _cmd_eval_rl(args) -> int:
    t0 = time.time()
    selector, arch = _load_policy_selector(args.policy)
    report = rl.evaluate_pairs(
        selector, args.n, args.pairs, budget_multiplier=args.budget_mult, seed=args.seed
    )
    report["policy"] = arch
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True)
        fh.write("\n")
    print(json.dumps(report, sort_keys=True))
    _finish(args, "eval-rl", _config_dict(args),
            [args.policy], [args.report], t0, args.report)
    return 0


def _cmd_simplify(args) -> int:
    t0 = time.time()
    g = _load_graph(args.infile)
    if args.mode == "greedy":
        best, path = search.greedy_simplify(g, budget=args.budget)
    elif args.mode == "beam":
        best, path = search.beam_simplify(g, width=args.width, expansion_cap=args.budget)
    else:
        if not args.policy:
            raise CliError("--mode policy requires --policy CKPT", EXIT_USAGE)
        selector, _arch = _load_policy_selector(args.policy)
        best, path = rl.simplify_with_policy(selector, g, args.budget, seed=args.seed)
    out = {
        "graph": {"weights": list(best.weights), "edges": [list(e) for e in best.edges]},
        "actions": [search.action_to_json(a) for a in path],
    }
    text = json.dumps(out, sort_keys=True)
    outputs = []
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        outputs.append(args.out)
    print(text)
    _finish(args, "simplify", _config_dict(args),
            [args.infile], outputs, t0, args.out)
    return 0


def _cmd_decide(args) -> int:
    t0 = time.time()
    g1 = _load_graph(args.g1)
    g2 = _load_graph(args.g2)
    verdict = search.decide_equivalence(g1, g2, expansions_per_side=args.budget)
    print(verdict.to_json())
    _finish(args, "decide", _config_dict(args),
            [args.g1, args.g2], [], t0, None)
    return 0


def _cmd_path(args) -> int:
    t0 = time.time()
    g1 = _load_graph(args.g1)
    g2 = _load_graph(args.g2)
    result = search.bidirectional_path(g1, g2, max_depth=args.max_depth)
    _finish(args, "path", _config_dict(args),
            [args.g1, args.g2], [], t0, None)
    if result is None:
        print(json.dumps({"path": None, "max_depth": args.max_depth}))
        return EXIT_BUDGET
    print(
        json.dumps(
            {
                "length": result.length,
                "from_g1": [search.action_to_json(a) for a in result.from_g1],
                "from_g2": [search.action_to_json(a) for a in result.from_g2],
            },
            sort_keys=True,
        )
    )
    return 0


def _cmd_stats_moves(args) -> int:
    t0 = time.time()
    if args.policy == "uniform":
        selector = None
    else:
        selector, _arch = _load_policy_selector(args.policy)
    fractions = rl.move_stats(selector, args.episodes, seed=args.seed)
    out = {
        "categories": ["a-up", "b-up+", "b-up-", "c-up+", "c-up-", "a-down", "b-down", "c-down"],
        "fractions": [round(float(x), 6) for x in fractions],
    }
    print(json.dumps(out))
    _finish(args, "stats-moves", _config_dict(args),
            [] if args.policy == "uniform" else [args.policy], [], t0, None)
    return 0


def _cmd_det(args) -> int:
    g = _load_graph(args.infile)
    d = determinant(g)
    print(f"determinant {d}")
    print(f"homology_order {abs(d)}")
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plumbcalc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[], help="generate a pair dataset")
    p.add_argument("--kind", required=True, choices=["equiv", "inequiv", "tweak", "sl-mix", "test4"])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--nmax", type=int, default=40)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("train-sl", help="train a pair classifier")
    p.add_argument("--arch", default="gen+gat")
    p.add_argument("--data", required=True)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--val-frac", type=float, default=0.2)
    p.add_argument("--early-stop-acc", type=float, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--metrics")
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_train_sl)

    p = sub.add_parser("eval-sl", help="evaluate a pair classifier on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_eval_sl)

    p = sub.add_parser("train-rl", help="train a simplification agent")
    p.add_argument("--algo", choices=["a3c", "dqn"], default="a3c")
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--workers", type=int, default=8)
    p.add_argument("--lr", type=float, default=5e-4)
    p.add_argument("--async-workers", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log")
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_train_rl)

    p = sub.add_parser("eval-rl", help="pair-success evaluation of a trained agent")
    p.add_argument("--policy", required=True)
    p.add_argument("--n", type=int, required=True, help="moves per pair side (e.g. 20..100)")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--budget-mult", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_eval_rl)

    p = sub.add_parser("simplify", help="simplify one graph")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=["policy", "greedy", "beam"], default="beam")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--policy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_simplify)

    p = sub.add_parser("decide", help="three-valued equivalence decision")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--budget", type=int, default=None, help="beam expansions per side")
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("path", help="shortest move connection between two graphs")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_path)

    p = sub.add_parser("stats-moves", help="move-category fractions of a policy")
    p.add_argument("--policy", required=True, help="checkpoint path, or 'uniform'")
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_stats_moves)

    p = sub.add_parser("det", help="print the exact determinant of a graph")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_det)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"plumbcalc: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
