"""Batch front door: demo generation, tuple export, training, evaluation,
corpus reports, render-variant materialization, and the live play server.

Every command is deterministic given its flags (timestamps included: logs
are stamped from ``--stamp``, never the wall clock) and writes nothing
outside its ``--out`` target. Exit codes: 0 success, 2 flag or usage
problems, 3 data-format or version problems, 4 anything else.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from .agents import (
    BCConfig,
    RandomPolicy,
    ScriptedExpert,
    TrainConfig,
    load_blob,
    policy_from_params,
    save_blob,
    train_bc,
    train_dqn,
    train_predqn,
)
from .dataset import corpus_metas, export_tuples, read_trajectory, write_trajectory
from .errors import (
    ComparisonError,
    ConfigurationError,
    CorruptLog,
    GridcraftError,
    IncompatibleVersion,
    IntegrityError,
    NoScheduleError,
)
from .evaluation import (
    VARIANT_NAMES,
    make_variant_set,
    read_vault,
    run_evaluation,
    write_vault,
)
from .reports import (
    length_histogram,
    precedence_graph,
    render_histogram_svg,
    render_precedence_svg,
    write_curve_csv,
    write_histogram_csv,
    write_precedence_csv,
)
from .tasks import TASK_BY_NAME, make_task
from .trajectory import annotate, record
from .world import make_texture_pack

# Post-training spot check: a fixed block of seeds disjoint from the
# small-integer seeds that examples and demos tend to use.
SPOT_CHECK_SEEDS = tuple(range(2000, 2020))


# --- flat key = value config files ---------------------------------------------


def load_config(path, cls):
    """Parse ``key = value`` lines (#-comments allowed) into ``cls``.

    Field types come from the dataclass defaults, so ints reject floats.
    ``None`` passes through (callers treat it as "use the defaults").
    """
    if path is None:
        return None
    names = {f.name for f in dataclasses.fields(cls)}
    defaults = cls()
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, text = line.partition("=")
        key, text = key.strip(), text.strip()
        if not eq or not key or not text:
            raise ConfigurationError(
                f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in names:
            raise ConfigurationError(
                f"{path}:{lineno}: {cls.__name__} has no field {key!r}")
        want = type(getattr(defaults, key))
        try:
            values[key] = want(text)
        except ValueError:
            raise ConfigurationError(
                f"{path}:{lineno}: {key} expects {want.__name__}, "
                f"got {text!r}") from None
    return cls(**values)


# --- command handlers ------------------------------------------------------------


def _cmd_gen_demos(args) -> int:
    if args.count < 0:
        raise ConfigurationError(f"--count must be >= 0, got {args.count}")
    spec = make_task(TASK_BY_NAME[args.task])
    pack = make_texture_pack(args.pack)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scores = []
    for i in range(args.count):
        actor = (ScriptedExpert(spec.task_id) if args.policy == "expert"
                 else RandomPolicy())
        log = record(spec, args.seed + i, actor, pack, created_at=args.stamp)
        annotation = annotate(log, spec)
        write_trajectory(out, log, annotation)
        scores.append(annotation.total_score)
    mean = sum(scores) / len(scores) if scores else 0.0
    print(f"{args.count} {spec.name} trajectories ({args.policy}) -> {out}; "
          f"mean score {mean:.2f}")
    return 0


def _cmd_export_dataset(args) -> int:
    root = Path(args.corpus)
    pack = make_texture_pack(args.pack)
    metas = corpus_metas(root)
    ids = sorted(tid for tid in metas
                 if not args.expert_only or metas[tid].is_expert)
    for tid in ids:
        export_tuples(root, tid, pack)
    print(f"exported {len(ids)} tuple files under {root} (pack {pack.pack_id})")
    return 0


def _cmd_train(args) -> int:
    spec = make_task(TASK_BY_NAME[args.task])
    pack = make_texture_pack(args.pack)
    ids: list[str] = []
    if args.algo in ("bc", "predqn"):
        if args.corpus is None:
            raise ConfigurationError(f"--corpus is required for --algo {args.algo}")
        ids = sorted(corpus_metas(args.corpus))
        if not ids:
            raise ConfigurationError(f"corpus {args.corpus} holds no trajectories")
    if args.algo in ("dqn", "predqn") and args.budget is None:
        raise ConfigurationError(f"--budget is required for --algo {args.algo}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    curve_path = out.with_suffix(".curve.csv")

    if args.algo == "bc":
        policy, losses = train_bc(args.corpus, ids, pack,
                                  load_config(args.config, BCConfig), spec)
        curve = list(enumerate(losses, start=1))  # (epoch, mean loss) rows
    elif args.algo == "dqn":
        policy, curve = train_dqn(spec, args.budget,
                                  load_config(args.config, TrainConfig),
                                  args.seed, pack)
    else:
        policy, curve = train_predqn(spec, args.corpus, ids, args.budget,
                                     load_config(args.config, TrainConfig),
                                     args.seed, pack)

    save_blob(out, policy.params)
    write_curve_csv(curve, curve_path)
    report = run_evaluation(policy, spec, SPOT_CHECK_SEEDS, pack)
    print(f"blob -> {out}; curve -> {curve_path}; "
          f"spot-check mean {report.mean:.2f} over {len(SPOT_CHECK_SEEDS)} episodes")
    return 0


def _cmd_evaluate(args) -> int:
    spec = make_task(TASK_BY_NAME[args.task])
    policy = policy_from_params(load_blob(args.policy_blob))
    seeds = read_vault(args.vault)
    if args.episodes is not None:
        if not 0 < args.episodes <= len(seeds):
            raise ConfigurationError(
                f"--episodes must lie in [1, {len(seeds)}], got {args.episodes}")
        seeds = seeds[:args.episodes]
    pack = make_texture_pack(args.pack)
    report = run_evaluation(policy, spec, seeds, pack)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "score"])
        for number, score in enumerate(report.per_episode_scores, start=1):
            writer.writerow([number, f"{score:.6f}"])
    print(f"{spec.name}: mean {report.mean:.4f} std {report.std:.4f} over "
          f"{len(seeds)} episodes; tie-break episode {report.tie_break_episode}; "
          f"csv -> {args.out}")
    return 0


def _cmd_report(args) -> int:
    root = Path(args.corpus)
    ids = sorted(corpus_metas(root)) if root.is_dir() else []
    logs = [read_trajectory(root, tid) for tid in ids]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "histogram":
        hist = length_histogram(logs, args.bin_width)
        write_histogram_csv(hist, out / "histogram.csv")
        render_histogram_svg(hist, out / "histogram.svg")
    else:
        graph = precedence_graph(logs)
        write_precedence_csv(graph, out / "precedence.csv")
        render_precedence_svg(graph, out / "precedence.svg")
    print(f"{args.kind} report over {len(logs)} logs -> {out}")
    return 0


def _cmd_make_variants(args) -> int:
    if args.episodes <= 0:
        raise ConfigurationError(f"--episodes must be positive, got {args.episodes}")
    variants = make_variant_set(args.master_seed, args.episodes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for name in VARIANT_NAMES:
        write_vault(out / f"{name}.vault", variants.vaults[name])
        lines.append(f"{name}_pack_seed = {variants.packs[name].seed}")
        lines.append(f"{name}_shareable = {str(variants.shareable[name]).lower()}")
    (out / "variants.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"dev/val/eval vaults ({args.episodes} seeds each) + variants.txt -> {out}")
    return 0


def _cmd_serve_play(args) -> int:
    import uvicorn

    from .gateway import build_app

    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigurationError(f"--bind must be host:port, got {args.bind!r}")
    if args.tick_rate <= 0:
        raise ConfigurationError(f"--tick-rate must be positive, got {args.tick_rate}")
    corpus = Path(args.corpus)
    corpus.mkdir(parents=True, exist_ok=True)
    frontend = Path(args.frontend) if args.frontend else Path("frontend/dist")
    app = build_app(corpus, tick_rate=args.tick_rate, pack_seed=args.pack,
                    frontend_dir=frontend if frontend.is_dir() else None)
    print(f"play server on {args.bind}; recording into {corpus}")
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridcraft",
        description="Deterministic tile-world crafting: record demonstrations, "
                    "train and score baselines, report on corpora, and host "
                    "live play sessions.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    tasks = sorted(TASK_BY_NAME)

    p = sub.add_parser("gen-demos",
                       help="record scripted or random trajectories into a corpus")
    p.add_argument("--task", required=True, choices=tasks)
    p.add_argument("--count", type=int, required=True,
                   help="number of episodes (world seeds --seed .. --seed+count-1)")
    p.add_argument("--seed", type=int, default=0, help="first world seed")
    p.add_argument("--out", required=True, help="corpus directory")
    p.add_argument("--policy", choices=("expert", "random"), default="expert")
    p.add_argument("--pack", type=int, default=0, help="texture pack seed")
    p.add_argument("--stamp", type=int, default=0,
                   help="created_at stored in the logs (fixed, for reproducible ids)")
    p.set_defaults(handler=_cmd_gen_demos)

    p = sub.add_parser("export-dataset",
                       help="render learning tuples for every trajectory in a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pack", type=int, default=0, help="texture pack seed")
    p.add_argument("--expert-only", action="store_true",
                   help="export only trajectories whose stored expert flag is set")
    p.set_defaults(handler=_cmd_export_dataset)

    p = sub.add_parser("train", help="fit a policy and write blob + curve CSV")
    p.add_argument("--algo", required=True, choices=("bc", "dqn", "predqn"))
    p.add_argument("--task", required=True, choices=tasks)
    p.add_argument("--budget", type=int, help="environment sample budget (dqn/predqn)")
    p.add_argument("--corpus", help="demonstration corpus (bc/predqn)")
    p.add_argument("--config", help="flat key = value overrides for the trainer")
    p.add_argument("--out", required=True, help="parameter blob path")
    p.add_argument("--seed", type=int, default=0, help="training seed")
    p.add_argument("--pack", type=int, default=0, help="texture pack seed")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("evaluate", help="score a parameter blob over a seed vault")
    p.add_argument("--policy-blob", required=True)
    p.add_argument("--task", required=True, choices=tasks)
    p.add_argument("--vault", required=True, help="seed vault file")
    p.add_argument("--pack", type=int, default=0, help="texture pack seed")
    p.add_argument("--episodes", type=int,
                   help="evaluate only the first N vault seeds (default: all)")
    p.add_argument("--out", default="report.csv", help="per-episode score CSV")
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("report", help="corpus figures and tables (CSV + SVG)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", required=True, choices=("histogram", "precedence"))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--bin-width", type=int, default=100,
                   help="episode-length bin width (histogram only)")
    p.set_defaults(handler=_cmd_report)

    p = sub.add_parser("make-variants",
                       help="derive dev/val/eval texture packs and seed vaults")
    p.add_argument("--master-seed", type=int, required=True)
    p.add_argument("--episodes", type=int, default=100, help="seeds per vault")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=_cmd_make_variants)

    p = sub.add_parser("serve-play",
                       help="host live browser play sessions, recording each one")
    p.add_argument("--bind", default="127.0.0.1:8000", help="host:port")
    p.add_argument("--corpus", required=True, help="directory human logs land in")
    p.add_argument("--tick-rate", type=float, default=10.0, help="server ticks per second")
    p.add_argument("--pack", type=int, default=0, help="texture pack seed")
    p.add_argument("--frontend", help="built client bundle directory "
                                      "(default: ./frontend/dist when present)")
    p.set_defaults(handler=_cmd_serve_play)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ComparisonError, ConfigurationError, NoScheduleError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CorruptLog, IncompatibleVersion, IntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GridcraftError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
