"""Phase-ordering benchmark: run the same labelled corpus through both orders."""

from __future__ import annotations

import json
import statistics
from dataclasses import asdict, dataclass, replace

from .cascade import ORDERS, PHASE1, PHASE2, PHASE3, CascadeConfig, Classifier, FeatureRanking
from .knowledge import KnowledgeTable, Warehouse, ensure_knowledge


@dataclass
class OrderingStats:
    order: str
    n: int
    resolved: dict[str, int]
    correct: int
    accuracy: float
    mean_ms: float
    median_ms: float


def bench(
    corpus,
    warehouse: Warehouse,
    config: CascadeConfig | None = None,
    orders=ORDERS,
    kb: KnowledgeTable | None = None,
    ranking: FeatureRanking | None = None,
) -> list[OrderingStats]:
    """Classify every ``(family, sequence)`` in ``corpus`` once per order.

    Each order gets its own classifier, so no trained network is shared
    between them; network training time is charged to the sequence that
    first needs it.
    """
    config = config or CascadeConfig()
    kb, _ = ensure_knowledge(warehouse, kb)
    report = []
    for order in orders:
        clf = Classifier(warehouse, kb, ranking, replace(config, order=order))
        ranking = clf.ranking
        resolved = {PHASE1: 0, PHASE2: 0, PHASE3: 0}
        correct = 0
        times = []
        for family, seq in corpus:
            res = clf.classify(seq)
            resolved[res.resolved_by] += 1
            correct += res.family == family
            times.append(res.total_time)
        n = len(corpus)
        report.append(
            OrderingStats(
                order,
                n,
                resolved,
                correct,
                correct / n if n else 0.0,
                statistics.fmean(times) if times else 0.0,
                statistics.median(times) if times else 0.0,
            )
        )
    return report


def format_table(report: list[OrderingStats], timing: bool = True) -> str:
    cols = ["order", "n", PHASE1, PHASE2, PHASE3, "correct", "accuracy"]
    if timing:
        cols += ["mean_ms", "median_ms"]
    lines = ["\t".join(cols)]
    for s in report:
        row = [s.order, str(s.n), *(str(s.resolved[p]) for p in (PHASE1, PHASE2, PHASE3)), str(s.correct), f"{s.accuracy:.4f}"]
        if timing:
            row += [f"{s.mean_ms:.3f}", f"{s.median_ms:.3f}"]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def format_records(report: list[OrderingStats], timing: bool = True) -> str:
    """One JSON object per line, one line per order."""
    out = []
    for s in report:
        d = asdict(s)
        if timing:
            d["mean_ms"] = round(s.mean_ms, 3)
            d["median_ms"] = round(s.median_ms, 3)
        else:
            del d["mean_ms"], d["median_ms"]
        out.append(json.dumps(d, sort_keys=True))
    return "\n".join(out) + "\n"
