"""Three-phase cascade: fuzzy range screening, a small backprop network, and a
nearest-neighbour vote.

Phases are named by the model they run, independent of execution order:
``phase1`` is the fuzzy screen, ``phase2`` the neural network, ``phase3`` the
neighbourhood vote.
"""

from __future__ import annotations

import time
import zlib
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateRange,
    EmptyWarehouse,
    InsufficientCandidates,
    InsufficientData,
    SequenceTooShort,
)
from .features import N_FEATURES, feature_vector
from .knowledge import FamilyRange, KnowledgeTable, Warehouse, standardize
from .seq_core import ProteinSequence

PHASE1 = "phase1"
PHASE2 = "phase2"
PHASE3 = "phase3"
FUZZY_FIRST = "fuzzy-first"
NEURAL_FIRST = "neural-first"
ORDERS = (FUZZY_FIRST, NEURAL_FIRST)


def component_rng(seed: int, *keys: str) -> np.random.Generator:
    """Independent PCG64 stream for one named component of a seeded run."""
    words = [zlib.crc32(k.encode("utf-8")) for k in keys]
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *words]))


@dataclass(frozen=True)
class CascadeConfig:
    top_r: int = 8
    theta: float = 0.5
    delta_frac: float = 0.1
    hidden_units: int = 32
    learning_rate: float = 0.1
    epochs: int = 200
    margin_gamma: float = 0.2
    k_neighbors: int = 5
    order: str = FUZZY_FIRST
    seed: int = 0

    def __post_init__(self):
        for name in ("top_r", "hidden_units", "epochs", "k_neighbors"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("theta", "margin_gamma"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.delta_frac < 0:
            raise ValueError("delta_frac must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")


# ---------------------------------------------------------------- ranking


@dataclass(frozen=True)
class FeatureRanking:
    order: tuple[int, ...]
    scores: np.ndarray  # indexed by feature, not by rank

    def top(self, r: int) -> list[int]:
        return list(self.order[:r])


def default_ranking() -> FeatureRanking:
    """Canonical feature order with zero scores, for warehouses too small to rank."""
    return FeatureRanking(tuple(range(N_FEATURES)), np.zeros(N_FEATURES))


def rank_features(warehouse: Warehouse, eps: float = 1e-9) -> FeatureRanking:
    """Fisher-style score: variance of family means over mean within-family variance.

    Families are weighted equally. Ties keep the lower feature index first.
    """
    labels = np.array(warehouse.labels, dtype=object)
    families = warehouse.families()
    sizes = [int(np.sum(labels == f)) for f in families]
    if len(families) < 2 or min(sizes) < 2:
        raise InsufficientData("feature ranking needs at least 2 families with at least 2 rows each")
    X = warehouse.matrix
    fam_means = np.empty((len(families), N_FEATURES))
    fam_vars = np.empty_like(fam_means)
    for i, f in enumerate(families):
        block = np.sort(X[labels == f], axis=0)
        fam_means[i] = block.mean(axis=0)
        fam_vars[i] = np.sort((block - fam_means[i]) ** 2, axis=0).mean(axis=0)
    between = np.sort((fam_means - fam_means.mean(axis=0)) ** 2, axis=0).mean(axis=0)
    within = np.sort(fam_vars, axis=0).mean(axis=0)
    scores = between / (within + eps)
    order = tuple(sorted(range(N_FEATURES), key=lambda j: (-scores[j], j)))
    return FeatureRanking(order, scores)


# ------------------------------------------------------------------ fuzzy


def _shoulder(lo, hi, mid, delta_frac):
    delta = delta_frac * (hi - lo)
    floor = 1e-6 * np.maximum(1.0, np.abs(mid))
    return np.maximum(delta, floor)


def membership_array(values, mins, maxs, means, delta_frac: float) -> np.ndarray:
    """Vectorised trapezoid: 1 on ``[min, max]``, linear to 0 over one shoulder width."""
    v = np.asarray(values, dtype=float)
    delta = _shoulder(mins, maxs, means, delta_frac)
    below = np.clip(1.0 - (mins - v) / delta, 0.0, 1.0)
    above = np.clip(1.0 - (v - maxs) / delta, 0.0, 1.0)
    return np.where(v < mins, below, np.where(v > maxs, above, 1.0))


def membership(value: float, rng: FamilyRange, delta_frac: float) -> float:
    return float(membership_array(value, rng.min, rng.max, rng.mean, delta_frac))


def linguistic_partition(value: float, global_min: float, global_max: float) -> tuple[float, float, float]:
    """Small/medium/large triangular memberships over a feature's global span.

    Diagnostic only; the gating in :func:`phase1_fuzzy` uses family ranges.
    """
    if not global_min < global_max:
        raise DegenerateRange(f"empty range [{global_min}, {global_max}]")
    half = (global_max - global_min) / 2
    mid = global_min + half
    small = min(1.0, max(0.0, (mid - value) / half))
    medium = min(1.0, max(0.0, 1.0 - abs(value - mid) / half))
    large = min(1.0, max(0.0, (value - mid) / half))
    return small, medium, large


def phase1_fuzzy(
    features,
    kb: KnowledgeTable,
    ranking: FeatureRanking,
    config: CascadeConfig,
    candidates=None,
) -> frozenset[str]:
    """Families whose weakest top-ranked membership still reaches ``theta``."""
    cols = ranking.top(min(config.top_r, N_FEATURES))
    f = np.asarray(features, dtype=float)[cols]
    mu = membership_array(f, kb.mins[:, cols], kb.maxs[:, cols], kb.means[:, cols], config.delta_frac)
    worst = mu.min(axis=1)
    pool = kb.families if candidates is None else [fam for fam in kb.families if fam in candidates]
    return frozenset(fam for fam in pool if worst[kb.family_index(fam)] >= config.theta)


# ----------------------------------------------------------------- neural


@dataclass
class MlpModel:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    families: tuple[str, ...]
    epochs_run: int = 0
    final_loss: float = float("nan")

    @property
    def params(self):
        return [self.W1, self.b1, self.W2, self.b2]

    def predict_proba(self, Z) -> np.ndarray:
        return forward(self.params, np.atleast_2d(Z))[1]


def _sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * a))


def _softmax(a):
    a = a - a.max(axis=1, keepdims=True)
    e = np.exp(a)
    return e / e.sum(axis=1, keepdims=True)


def forward(params, X):
    W1, b1, W2, b2 = params
    H = _sigmoid(X @ W1 + b1)
    return H, _softmax(H @ W2 + b2)


def loss_and_grad(params, X, Y):
    """Mean cross-entropy of a one-hot target ``Y`` and its gradient w.r.t. each parameter."""
    W1, b1, W2, b2 = params
    n = X.shape[0]
    H, P = forward(params, X)
    loss = -np.sum(Y * np.log(np.clip(P, 1e-300, None))) / n
    dO = (P - Y) / n
    gW2 = H.T @ dO
    gb2 = dO.sum(axis=0)
    dH = (dO @ W2.T) * H * (1.0 - H)
    gW1 = X.T @ dH
    gb1 = dH.sum(axis=0)
    return loss, [gW1, gb1, gW2, gb2]


def init_params(n_in: int, n_hidden: int, n_out: int, rng: np.random.Generator):
    return [
        rng.uniform(-0.5, 0.5, (n_in, n_hidden)),
        rng.uniform(-0.5, 0.5, n_hidden),
        rng.uniform(-0.5, 0.5, (n_hidden, n_out)),
        rng.uniform(-0.5, 0.5, n_out),
    ]


def train_mlp(X, labels, config: CascadeConfig) -> MlpModel:
    """Full-batch gradient descent on one sigmoid hidden layer with softmax output.

    ``X`` should already be standardized. Output units follow the sorted
    family labels.
    """
    families = tuple(sorted(set(labels)))
    if len(families) < 2:
        raise InsufficientCandidates("the network needs at least 2 candidate families")
    X = np.asarray(X, dtype=float)
    idx = {f: i for i, f in enumerate(families)}
    Y = np.zeros((len(labels), len(families)))
    Y[np.arange(len(labels)), [idx[l] for l in labels]] = 1.0
    rng = component_rng(config.seed, "mlp", *families)
    params = init_params(X.shape[1], config.hidden_units, len(families), rng)
    loss = float("nan")
    for _ in range(config.epochs):
        loss, grads = loss_and_grad(params, X, Y)
        for p, g in zip(params, grads):
            p -= config.learning_rate * g
    loss = float(loss_and_grad(params, X, Y)[0])
    return MlpModel(*params, families=families, epochs_run=config.epochs, final_loss=loss)


@dataclass(frozen=True)
class Phase2Outcome:
    accepted: str | None
    candidates: frozenset[str]
    probabilities: dict[str, float]


def decide_phase2(probabilities: dict[str, float], margin_gamma: float) -> Phase2Outcome:
    """Accept the argmax on a clear margin, otherwise narrow the pool.

    The narrowed pool keeps every family at or above the uniform share 1/k,
    plus any family within ``margin_gamma`` of the leader, so a near-tie never
    collapses to a single survivor.
    """
    ranked = sorted(probabilities.items(), key=lambda kv: (-kv[1], kv[0]))
    top = ranked[0][1]
    margin = top - (ranked[1][1] if len(ranked) > 1 else 0.0)
    if margin >= margin_gamma:
        return Phase2Outcome(ranked[0][0], frozenset([ranked[0][0]]), probabilities)
    floor = 1.0 / len(probabilities)
    kept = frozenset(f for f, p in probabilities.items() if p >= floor or top - p < margin_gamma)
    return Phase2Outcome(None, kept, probabilities)


def phase2_neural(features, warehouse: Warehouse, kb: KnowledgeTable, candidates, config: CascadeConfig, cache=None):
    """Score ``candidates`` with a network trained on their warehouse rows.

    ``cache`` maps ``(sorted candidates, countrow)`` to a trained model.
    """
    key = (tuple(sorted(candidates)), kb.row_count)
    model = cache.get(key) if cache is not None else None
    if model is None:
        model = train_mlp(*_candidate_rows(warehouse, kb, key[0]), config)
        if cache is not None:
            cache[key] = model
    probs = model.predict_proba(standardize(features, kb))[0]
    return decide_phase2({f: float(p) for f, p in zip(model.families, probs)}, config.margin_gamma)


def _candidate_rows(warehouse, kb, families, Z=None):
    wanted = set(families)
    mask = np.array([lab in wanted for lab in warehouse.labels], dtype=bool)
    if Z is None:
        Z = standardize(warehouse.matrix, kb)
    labels = [lab for lab, keep in zip(warehouse.labels, mask) if keep]
    return Z[mask], labels


# ------------------------------------------------------------ neighbourhood


def phase3_neighborhood(
    features, warehouse: Warehouse, kb: KnowledgeTable, candidates, config: CascadeConfig, Z=None
) -> str:
    """Majority vote of the k nearest candidate rows in standardized space.

    Vote ties go to the smaller mean neighbour distance, then the
    alphabetically first family. ``candidates=None`` means every family.
    """
    if len(warehouse) == 0:
        raise EmptyWarehouse("no rows to search")
    if Z is None:
        Z = standardize(warehouse.matrix, kb)
    labels = warehouse.labels
    if candidates is None:
        idx = np.arange(len(labels))
    else:
        idx = np.array([i for i, lab in enumerate(labels) if lab in candidates], dtype=int)
    if idx.size == 0:
        raise EmptyWarehouse("no warehouse rows belong to the candidate families")
    q = standardize(features, kb)
    dist = np.sqrt(np.sum((Z[idx] - q) ** 2, axis=1))
    k = min(config.k_neighbors, idx.size)
    nearest = np.lexsort((idx, dist))[:k]
    votes: dict[str, list[float]] = {}
    for n in nearest:
        votes.setdefault(labels[idx[n]], []).append(float(dist[n]))
    return min(votes, key=lambda f: (-len(votes[f]), sum(votes[f]) / len(votes[f]), f))


# ---------------------------------------------------------------- cascade


@dataclass
class CascadeResult:
    family: str
    resolved_by: str
    trace: list[tuple[str, tuple[str, ...]]]
    phase_times: dict[str, float]
    total_time: float
    phase1_empty: bool = False

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "family": self.family,
            "resolved_by": self.resolved_by,
            "trace": [[phase, list(fams)] for phase, fams in self.trace],
            "phase1_empty": self.phase1_empty,
        }
        if timing:
            d["phase_times_ms"] = {k: round(v, 3) for k, v in self.phase_times.items()}
            d["total_ms"] = round(self.total_time, 3)
        return d


@dataclass
class Classifier:
    """Holds one immutable warehouse/knowledge snapshot plus the network cache.

    ``calls`` counts invocations of each phase and of network training so the
    short-circuit behaviour can be checked.
    """

    warehouse: Warehouse
    kb: KnowledgeTable
    ranking: FeatureRanking | None = None
    config: CascadeConfig = field(default_factory=CascadeConfig)
    model_cache: dict = field(default_factory=dict)
    calls: Counter = field(default_factory=Counter)

    def __post_init__(self):
        if len(self.warehouse) == 0:
            raise EmptyWarehouse("warehouse is empty")
        if self.ranking is None:
            try:
                self.ranking = rank_features(self.warehouse)
            except InsufficientData:
                self.ranking = default_ranking()
        self._Z = standardize(self.warehouse.matrix, self.kb)

    def _phase1(self, f, pool):
        self.calls[PHASE1] += 1
        return phase1_fuzzy(f, self.kb, self.ranking, self.config, candidates=pool)

    def _phase2(self, f, pool):
        self.calls[PHASE2] += 1
        key = (tuple(sorted(pool)), self.kb.row_count)
        if key not in self.model_cache:
            self.calls["train_mlp"] += 1
            Z, labels = _candidate_rows(self.warehouse, self.kb, key[0], self._Z)
            self.model_cache[key] = train_mlp(Z, labels, self.config)
        return phase2_neural(f, self.warehouse, self.kb, pool, self.config, cache=self.model_cache)

    def _phase3(self, f, pool):
        self.calls[PHASE3] += 1
        return phase3_neighborhood(f, self.warehouse, self.kb, pool, self.config, Z=self._Z)

    def classify(self, seq: ProteinSequence) -> CascadeResult:
        if len(seq) < 2:
            raise SequenceTooShort("classification needs at least 2 residues")
        t_start = time.perf_counter()
        times: dict[str, float] = {}
        f = feature_vector(seq)
        times["features"] = (time.perf_counter() - t_start) * 1e3
        pool = frozenset(self.kb.families)
        trace: list[tuple[str, tuple[str, ...]]] = []
        phase1_empty = False
        result_family = resolved = None

        steps = [PHASE1, PHASE2] if self.config.order == FUZZY_FIRST else [PHASE2, PHASE1]
        for phase in steps:
            t0 = time.perf_counter()
            if phase == PHASE1:
                survivors = self._phase1(f, pool)
                times[PHASE1] = (time.perf_counter() - t0) * 1e3
                if survivors:
                    pool = survivors
                else:
                    # an empty screen leaves the previous pool for the later phases
                    phase1_empty = True
                trace.append((PHASE1, tuple(sorted(pool))))
                if len(survivors) == 1:
                    result_family, resolved = next(iter(survivors)), PHASE1
                    break
                if phase1_empty:
                    break
            else:
                if len(pool) < 2:
                    continue
                outcome = self._phase2(f, pool)
                times[PHASE2] = (time.perf_counter() - t0) * 1e3
                pool = outcome.candidates
                trace.append((PHASE2, tuple(sorted(pool))))
                if outcome.accepted is not None:
                    result_family, resolved = outcome.accepted, PHASE2
                    break

        if resolved is None:
            t0 = time.perf_counter()
            result_family = self._phase3(f, pool)
            times[PHASE3] = (time.perf_counter() - t0) * 1e3
            trace.append((PHASE3, (result_family,)))
            resolved = PHASE3

        total = (time.perf_counter() - t_start) * 1e3
        return CascadeResult(result_family, resolved, trace, times, total, phase1_empty)


def classify(
    seq: ProteinSequence,
    warehouse: Warehouse,
    kb: KnowledgeTable,
    ranking: FeatureRanking | None = None,
    config: CascadeConfig | None = None,
) -> CascadeResult:
    """One-shot classification; build a :class:`Classifier` to reuse trained networks."""
    return Classifier(warehouse, kb, ranking, config or CascadeConfig()).classify(seq)
