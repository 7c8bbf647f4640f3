from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

from ukge.core.errors import VocabularyMismatchError
from ukge.core.logger import get_logger
from ukge.core.schema import Gain, RelevancePool, Task
from ukge.evaluation.classification import build_classification_sets, classify_strong
from ukge.evaluation.metrics import confidence_metrics
from ukge.evaluation.ranking import build_rank_queries, score_queries, summarize_ndcg
from ukge.ingestion.parser import Vocabulary
from ukge.ingestion.split import DatasetSplit
from ukge.models.embedding_model import ModelParams

logger = get_logger(__name__)

ALL_TASKS = (Task.CONFIDENCE, Task.RANKING, Task.CLASSIFICATION)


class EvalReport(BaseModel):
    """Headline metrics plus sample counts; tasks that were not run stay None."""
    tasks: List[Task]
    pool: RelevancePool = RelevancePool.ALL

    mse: Optional[float] = None
    mae: Optional[float] = None
    mse_positive_only: Optional[float] = None
    mae_positive_only: Optional[float] = None
    confidence_samples: Optional[int] = None

    ndcg_linear: Optional[float] = None
    ndcg_exp: Optional[float] = None
    queries_scored: Optional[int] = None
    queries_skipped: Optional[int] = None

    f1: Optional[float] = None
    accuracy: Optional[float] = None
    classification_train: Optional[int] = None
    classification_test: Optional[int] = None

    def to_text(self) -> str:
        lines = []
        for key, value in self.model_dump(mode="json").items():
            if isinstance(value, list):
                value = ",".join(value)
            lines.append(f"{key}: {'N/A' if value is None else value}")
        return "\n".join(lines) + "\n"


@dataclass
class Evaluation:
    report: EvalReport
    per_query: Optional[pd.DataFrame] = None


def evaluate(
    params: ModelParams,
    split: DatasetSplit,
    vocab: Vocabulary,
    tau: float,
    tasks: Sequence[Task] = ALL_TASKS,
    pool: RelevancePool = RelevancePool.ALL,
    seed: int = 0,
) -> Evaluation:
    if params.num_entities != vocab.num_entities or params.num_relations != vocab.num_relations:
        raise VocabularyMismatchError(
            f"model has {params.num_entities} entities / {params.num_relations} relations, "
            f"split vocabulary has {vocab.num_entities} / {vocab.num_relations}"
        )
    tasks = [Task(t) for t in tasks]
    report = EvalReport(tasks=tasks, pool=pool)
    per_query = None

    if Task.CONFIDENCE in tasks:
        report.mse, report.mae = confidence_metrics(params, split.test, split.test_negatives, include_negatives=True)
        report.mse_positive_only, report.mae_positive_only = confidence_metrics(
            params, split.test, include_negatives=False
        )
        report.confidence_samples = len(split.test) + len(split.test_negatives)
        logger.info(f"[EVAL] task=confidence | mse={report.mse:.6f} | mae={report.mae:.6f}")

    if Task.RANKING in tasks:
        queries = build_rank_queries(split, vocab, pool)
        linear = score_queries(params, queries, Gain.LINEAR, vocab)
        exponential = score_queries(params, queries, Gain.EXPONENTIAL, vocab)
        report.ndcg_linear, report.queries_scored, report.queries_skipped = summarize_ndcg(linear)
        report.ndcg_exp, _, _ = summarize_ndcg(exponential)
        per_query = pd.DataFrame(
            {
                "head": [vocab.entity_name(q.head) for q in queries],
                "relation": [vocab.relation_name(q.relation) for q in queries],
                "relevant_tails": [len(q.relevance) for q in queries],
                "ndcg_linear": linear,
                "ndcg_exp": exponential,
            }
        )
        logger.info(
            f"[EVAL] task=ranking | ndcg_linear={report.ndcg_linear:.6f} | ndcg_exp={report.ndcg_exp:.6f} "
            f"| scored={report.queries_scored} | skipped={report.queries_skipped}"
        )

    if Task.CLASSIFICATION in tasks:
        train_pairs, test_pairs = build_classification_sets(params, split, tau, seed)
        report.f1, report.accuracy = classify_strong(train_pairs, test_pairs)
        report.classification_train = len(train_pairs)
        report.classification_test = len(test_pairs)
        logger.info(f"[EVAL] task=classification | f1={report.f1:.6f} | accuracy={report.accuracy:.6f}")

    return Evaluation(report=report, per_query=per_query)


def write_reports(out_dir: Path, evaluation: Evaluation, dump_queries: bool = False) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / "report.txt", out_dir / "report.json"]
    written[0].write_text(evaluation.report.to_text(), encoding="utf-8")
    written[1].write_text(evaluation.report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    if dump_queries and evaluation.per_query is not None:
        path = out_dir / "ndcg_per_query.tsv"
        evaluation.per_query.to_csv(path, sep="\t", index=False, lineterminator="\n", na_rep="N/A")
        written.append(path)
    return written
