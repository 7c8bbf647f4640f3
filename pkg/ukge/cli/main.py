"""
ukge command line.

    python -m ukge ingest     raw.tsv --out data/split --normalization log-min-max --lo 0.1 --hi 3.0
    python -m ukge synth      --out data/synth.tsv --plant-transitive
    python -m ukge mine-rules data/split --out rules.tsv --min-hit-ratio 0.5 --emit-rules mined.rules
    python -m ukge train      data/split --rules mined.rules --out model.ukge --set dim=64
    python -m ukge eval       model.ukge data/split --out report/
    python -m ukge predict    model.ukge --data data/split --head e1 --relation r0 --k 4

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal error.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from ukge import __version__
from ukge.cli import commands
from ukge.core.errors import ConfigError, UKGEError
from ukge.core.logger import get_logger, set_global_level
from ukge.core.schema import NormalizationMethod, NormalizationSpec, RelevancePool, Task
from ukge.core.settings import LOG_LEVELS
from ukge.ingestion.synthetic import SyntheticConfig

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _ratios(text: str) -> List[float]:
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"ratios must be three comma-separated numbers, got '{text}'")
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"ratios must be three comma-separated numbers, got '{text}'")
    return values


def _tasks(text: str) -> List[Task]:
    try:
        return [Task(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"tasks must be a comma-separated subset of {', '.join(t.value for t in Task)}"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ukge", description="Uncertain knowledge graph embeddings with soft-logic rules.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", type=str.upper, default=None,
        choices=LOG_LEVELS, help="overrides UKGE_LOG_LEVEL",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="parse, normalize and split a raw triple file")
    p.add_argument("triples", type=Path)
    p.add_argument("--out", type=Path, required=True, help="split directory to write")
    p.add_argument("--normalization", choices=[m.value for m in NormalizationMethod], default="identity")
    p.add_argument("--lo", type=float, default=None, help="lower clamp for log-min-max")
    p.add_argument("--hi", type=float, default=None, help="upper clamp for log-min-max")
    p.add_argument("--floor", type=float, default=0.1, help="smallest normalized score")
    p.add_argument("--ratios", type=_ratios, default=[0.85, 0.07, 0.08], help="train,valid,test (default 0.85,0.07,0.08)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=0.85, help="strong-fact threshold stored with the split")

    p = sub.add_parser("synth", help="generate a synthetic uncertain KG")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--entities", type=int, default=60)
    p.add_argument("--relations", type=int, default=3)
    p.add_argument("--facts", type=int, default=200)
    p.add_argument("--latent-dim", type=int, default=8)
    p.add_argument("--sharpness", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plant-transitive", action="store_true")
    p.add_argument("--chains", type=int, default=10)
    p.add_argument("--holdout", type=float, default=0.5, help="fraction of implied facts written to heldout.tsv")

    p = sub.add_parser("mine-rules", help="mine length-2 rules and report hit ratios")
    p.add_argument("split_dir", type=Path)
    p.add_argument("--out", type=Path, required=True, help="rule report (tsv)")
    p.add_argument("--tau", type=float, default=None, help="defaults to the split's tau")
    p.add_argument("--min-hit-ratio", type=float, default=0.0)
    p.add_argument("--min-support", type=int, default=1)
    p.add_argument("--max-paths", type=int, default=100_000, help="per relation pair; larger groups are truncated and flagged as estimated")
    p.add_argument("--emit-rules", type=Path, default=None, help="also write surviving rules in rule syntax")

    p = sub.add_parser("train", help="train embeddings on a split")
    p.add_argument("split_dir", type=Path)
    p.add_argument("--out", type=Path, required=True, help="model file to write")
    p.add_argument("--rules", type=Path, default=None)
    p.add_argument("--config", type=Path, default=None, help="JSON file with TrainConfig keys")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--resume", type=Path, default=None, help="continue from a saved model")
    p.add_argument("--log", type=Path, default=None, help="training log (default <model>.log.jsonl)")

    p = sub.add_parser("eval", help="evaluate a model on the test split")
    p.add_argument("model", type=Path)
    p.add_argument("split_dir", type=Path)
    p.add_argument("--out", type=Path, required=True, help="report directory")
    p.add_argument("--tasks", type=_tasks, default=list(Task))
    p.add_argument("--pool", choices=[p.value for p in RelevancePool], default="all")
    p.add_argument("--dump-queries", action="store_true", help="write ndcg_per_query.tsv")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("predict", help="score a triple or rank tails for (head, relation, ?)")
    p.add_argument("model", type=Path)
    p.add_argument("--data", type=Path, required=True, help="split directory providing names")
    p.add_argument("--head", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--tail", default=None)
    p.add_argument("--k", type=int, default=10)

    return parser


def _run(args: argparse.Namespace) -> None:
    if args.command == "ingest":
        try:
            spec = NormalizationSpec(method=args.normalization, lo=args.lo, hi=args.hi, floor=args.floor)
        except ValidationError as e:
            raise ConfigError(f"invalid normalization: {e}")
        commands.cmd_ingest(args.triples, args.out, spec, args.ratios, args.seed, args.tau)

    elif args.command == "synth":
        try:
            config = SyntheticConfig(
                num_entities=args.entities, num_relations=args.relations, num_facts=args.facts,
                latent_dim=args.latent_dim, sharpness=args.sharpness, seed=args.seed,
                plant_transitive=args.plant_transitive, num_chains=args.chains,
                holdout_fraction=args.holdout,
            )
        except ValidationError as e:
            raise ConfigError(f"invalid generator parameters: {e}")
        commands.cmd_synth(args.out, config)

    elif args.command == "mine-rules":
        reports = commands.cmd_mine_rules(
            args.split_dir, args.out, args.tau, args.min_hit_ratio, args.min_support, args.max_paths,
            args.emit_rules,
        )
        print(f"{len(reports)} rules written to {args.out}")

    elif args.command == "train":
        result = commands.cmd_train(
            args.split_dir, args.out, args.rules, args.config, args.overrides, args.resume, args.log,
        )
        print(f"best epoch {result.best_epoch}, selection MSE {result.best_selection_mse:.6f}")

    elif args.command == "eval":
        evaluation = commands.cmd_eval(
            args.model, args.split_dir, args.out, args.tasks, RelevancePool(args.pool), args.dump_queries,
            args.seed,
        )
        print(evaluation.report.to_text(), end="")

    elif args.command == "predict":
        rows = commands.cmd_predict(args.model, args.data, args.head, args.relation, args.tail, args.k)
        for row in rows:
            truth = "N/A" if row.true_score is None else f"{row.true_score:.4f}"
            print(f"{row.head}\t{row.relation}\t{row.tail}\t{row.confidence:.4f}\t{truth}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)

    if args.log_level:
        set_global_level(args.log_level)

    try:
        _run(args)
    except UKGEError as e:
        logger.error(f"[CLI] command={args.command} | error={type(e).__name__} | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ValidationError as e:
        logger.error(f"[CLI] command={args.command} | error=ConfigError | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, UnicodeError) as e:
        logger.error(f"[CLI] command={args.command} | error={type(e).__name__} | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        logger.critical(f"[CLI] command={args.command} | internal error", exc_info=True)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
