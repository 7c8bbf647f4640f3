"""
Command implementations. Each cmd_* function takes plain arguments, writes its
artifacts plus a RunManifest, and returns the in-memory result so it can be
driven from tests or notebooks as well as from the argument parser.
"""

import difflib
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import BaseModel

from ukge.cli.schemas import RunManifest, manifest_path_for
from ukge.core.errors import UnknownNameError
from ukge.core.logger import get_logger
from ukge.core.schema import NormalizationSpec, RelevancePool, Task
from ukge.evaluation.ranking import top_k_tails
from ukge.evaluation.report import ALL_TASKS, Evaluation, evaluate, write_reports
from ukge.ingestion.index import FactIndex
from ukge.ingestion.parser import Vocabulary, write_triples
from ukge.ingestion.pipeline import DEFAULT_TAU, LoadedSplit, ingest, load_split
from ukge.ingestion.split import DEFAULT_RATIOS
from ukge.ingestion.synthetic import SyntheticConfig, SyntheticKG, generate_synthetic
from ukge.models.embedding_model import confidence
from ukge.models.persistence import load_model, save_model
from ukge.reasoning.mining import DEFAULT_MAX_PATHS, MinedRuleReport, mine_rules, write_report
from ukge.reasoning.rules import bind_rules, read_rules, write_rules
from ukge.training.config import load_config
from ukge.training.trainer import TrainingResult, train

logger = get_logger(__name__)

HELDOUT_FILE = "heldout.tsv"
PLANTED_RULES_FILE = "planted.rules"


def cmd_ingest(
    triples_file: Path,
    out_dir: Path,
    normalization: NormalizationSpec = NormalizationSpec(),
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 0,
    tau: float = DEFAULT_TAU,
) -> LoadedSplit:
    manifest = RunManifest.start(
        "ingest",
        inputs=[triples_file],
        seed=seed,
        parameters={"normalization": normalization.model_dump(mode="json"), "ratios": list(ratios), "tau": tau},
    )
    loaded = ingest(triples_file, out_dir, normalization, ratios, seed, tau)
    manifest.finish([out_dir], manifest_path_for(out_dir))
    return loaded


def cmd_synth(out_file: Path, config: SyntheticConfig) -> SyntheticKG:
    out_file = Path(out_file)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.start("synth", seed=config.seed, parameters=config.model_dump(mode="json"))

    kg = generate_synthetic(config)
    write_triples(out_file, kg.facts, kg.vocab)
    outputs = [out_file]
    if kg.rule is not None:
        heldout = out_file.parent / HELDOUT_FILE
        rules = out_file.parent / PLANTED_RULES_FILE
        write_triples(heldout, kg.heldout, kg.vocab)
        write_rules(rules, [kg.rule])
        outputs += [heldout, rules]
    manifest.finish(outputs, manifest_path_for(out_file))
    return kg


def cmd_mine_rules(
    split_dir: Path,
    out_report: Path,
    tau: Optional[float] = None,
    min_hit_ratio: float = 0.0,
    min_support: int = 1,
    max_paths_per_pair: int = DEFAULT_MAX_PATHS,
    emit_rules: Optional[Path] = None,
) -> List[MinedRuleReport]:
    """Mine length-2 rules from the strong facts of the training split."""
    loaded = load_split(split_dir)
    tau = loaded.tau if tau is None else tau
    manifest = RunManifest.start(
        "mine-rules",
        inputs=[split_dir],
        parameters={"tau": tau, "min_hit_ratio": min_hit_ratio, "min_support": min_support,
                    "max_paths_per_pair": max_paths_per_pair},
    )
    index = FactIndex.build(loaded.split.train, tau, num_entities=loaded.vocab.num_entities)
    reports = mine_rules(index, loaded.vocab, min_hit_ratio, min_support, max_paths_per_pair)

    out_report = Path(out_report)
    out_report.parent.mkdir(parents=True, exist_ok=True)
    write_report(out_report, reports)
    outputs = [out_report]
    if emit_rules is not None:
        write_rules(emit_rules, [r.rule for r in reports])
        outputs.append(Path(emit_rules))
    manifest.finish(outputs, manifest_path_for(out_report))
    return reports


def default_log_path(model_path: Path) -> Path:
    model_path = Path(model_path)
    return model_path.with_name(model_path.name + ".log.jsonl")


def cmd_train(
    split_dir: Path,
    out_model: Path,
    rules_file: Optional[Path] = None,
    config_file: Optional[Path] = None,
    overrides: Sequence[str] = (),
    resume: Optional[Path] = None,
    log_path: Optional[Path] = None,
) -> TrainingResult:
    config = load_config(config_file, overrides)
    loaded = load_split(split_dir)
    # rules are checked against the split vocabulary before any training work
    rules = read_rules(rules_file, loaded.vocab) if rules_file is not None else []
    bound = bind_rules(rules, loaded.vocab)

    initial = None
    if resume is not None:
        initial, _ = load_model(resume, loaded.vocab)

    inputs = [split_dir] + [p for p in (rules_file, config_file, resume) if p is not None]
    manifest = RunManifest.start(
        "train", inputs=inputs, seed=config.seed, config=config.model_dump(mode="json"),
        parameters={"overrides": list(overrides), "tau": loaded.tau},
    )
    out_model = Path(out_model)
    out_model.parent.mkdir(parents=True, exist_ok=True)
    log_path = Path(log_path) if log_path is not None else default_log_path(out_model)

    result = train(config, loaded.split, bound, loaded.vocab, loaded.tau, initial, log_path)
    save_model(out_model, result.params, loaded.vocab)
    manifest.parameters["best_epoch"] = result.best_epoch
    manifest.finish([out_model, log_path], manifest_path_for(out_model))
    return result


def _verify_model_manifest(model_path: Path) -> None:
    path = manifest_path_for(model_path)
    if path.is_file():
        RunManifest.load(path).verify_outputs()


def cmd_eval(
    model_path: Path,
    split_dir: Path,
    out_dir: Path,
    tasks: Sequence[Task] = ALL_TASKS,
    pool: RelevancePool = RelevancePool.ALL,
    dump_queries: bool = False,
    seed: int = 0,
) -> Evaluation:
    loaded = load_split(split_dir)
    _verify_model_manifest(model_path)
    params, _ = load_model(model_path, loaded.vocab)
    manifest = RunManifest.start(
        "eval", inputs=[model_path, split_dir], seed=seed,
        parameters={"tasks": [Task(t).value for t in tasks], "pool": pool.value},
    )
    evaluation = evaluate(params, loaded.split, loaded.vocab, loaded.tau, tasks, pool, seed)
    written = write_reports(out_dir, evaluation, dump_queries)
    manifest.finish(written, manifest_path_for(out_dir))
    return evaluation


class PredictionRow(BaseModel):
    head: str
    relation: str
    tail: str
    confidence: float
    # ground-truth score when the fact is observed in any split
    true_score: Optional[float] = None


def _resolve(vocab: Vocabulary, kind: str, name: str) -> int:
    idx = vocab.entity_id(name) if kind == "entity" else vocab.relation_id(name)
    if idx is None:
        names = vocab.entities if kind == "entity" else vocab.relations
        raise UnknownNameError(kind, name, difflib.get_close_matches(name, names, n=3))
    return idx


def cmd_predict(
    model_path: Path,
    split_dir: Path,
    head: str,
    relation: str,
    tail: Optional[str] = None,
    k: int = 10,
) -> List[PredictionRow]:
    """
    Score one triple, or rank tails for (head, relation, ?) and return the top k.
    """
    loaded = load_split(split_dir)
    vocab = loaded.vocab
    params, _ = load_model(model_path, vocab)
    h = _resolve(vocab, "entity", head)
    r = _resolve(vocab, "relation", relation)
    observed = FactIndex.build(loaded.split.all_observed(), loaded.tau, num_entities=vocab.num_entities)

    if tail is not None:
        t = _resolve(vocab, "entity", tail)
        candidates = [(t, confidence(params, (h, r, t)))]
    else:
        candidates = top_k_tails(params, h, r, k)

    return [
        PredictionRow(
            head=head,
            relation=relation,
            tail=vocab.entity_name(t),
            confidence=score,
            true_score=observed.score(h, r, t),
        )
        for t, score in candidates
    ]
