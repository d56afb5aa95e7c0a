"""Global physicochemical features, 2-gram statistics and the fixed-order vectors.

The 18-entry warehouse vector is laid out as::

    avg_mw, avg_pi,
    comp_phobic, comp_philic, comp_neutral,
    dist_1 .. dist_9          (ordered hydropathy pairs, phobic/philic/neutral major order)
    aa2_mean, aa2_std, ex2_mean, ex2_std

Nothing here rounds; values are kept at full float precision.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import SequenceTooShort
from .seq_core import (
    ALPHABET,
    AMINO_ACIDS,
    EXCHANGE_GROUPS,
    HYDROPATHY_CLASSES,
    ProteinSequence,
    to_exchange_groups,
)

N_FEATURES = 18

_CLASS_ABBR = {"Hydrophobic": "phobic", "Hydrophilic": "philic", "Neutral": "neutral"}

#: Ordered hydropathy class pairs backing the nine distribution entries.
DISTRIBUTION_PAIRS = tuple(product(HYDROPATHY_CLASSES, repeat=2))

FEATURE_NAMES = (
    "avg_mw",
    "avg_pi",
    "comp_phobic",
    "comp_philic",
    "comp_neutral",
    *(f"dist_{_CLASS_ABBR[a.value]}_{_CLASS_ABBR[b.value]}" for a, b in DISTRIBUTION_PAIRS),
    "aa2_mean",
    "aa2_std",
    "ex2_mean",
    "ex2_std",
)
assert len(FEATURE_NAMES) == N_FEATURES

AA_PAIRS = tuple(a + b for a, b in product(ALPHABET, repeat=2))
EX_PAIRS = tuple(a.value + b.value for a, b in product(EXCHANGE_GROUPS, repeat=2))
PATTERN_SLOTS = AA_PAIRS + EX_PAIRS
PATTERN_DIM = len(PATTERN_SLOTS)
_SLOT_INDEX = {p: i for i, p in enumerate(PATTERN_SLOTS)}

_CLASS_INDEX = {c: i for i, c in enumerate(HYDROPATHY_CLASSES)}


@dataclass(frozen=True)
class GlobalFeatures:
    avg_molecular_weight: float
    avg_isoelectric_point: float
    composition: tuple[float, float, float]
    distribution: tuple[float, ...]


@dataclass(frozen=True)
class NGramStats:
    counts: dict[str, int]
    mean: float
    std: float
    n_distinct: int


def total_molecular_weight(seq: ProteinSequence) -> float:
    return math.fsum(AMINO_ACIDS[aa].molecular_weight for aa in seq.residues)


def total_isoelectric_point(seq: ProteinSequence) -> float:
    return math.fsum(AMINO_ACIDS[aa].isoelectric_point for aa in seq.residues)


def average_molecular_weight(seq: ProteinSequence) -> float:
    return total_molecular_weight(seq) / len(seq)


def average_isoelectric_point(seq: ProteinSequence) -> float:
    return total_isoelectric_point(seq) / len(seq)


def _class_indices(seq: ProteinSequence) -> list[int]:
    return [_CLASS_INDEX[AMINO_ACIDS[aa].hydropathy] for aa in seq.residues]


def hydropathy_composition_counts(seq: ProteinSequence) -> list[int]:
    counts = [0, 0, 0]
    for c in _class_indices(seq):
        counts[c] += 1
    return counts


def hydropathy_composition(seq: ProteinSequence) -> tuple[float, float, float]:
    """Fractions of hydrophobic, hydrophilic and neutral residues."""
    n = len(seq)
    a, b, c = hydropathy_composition_counts(seq)
    return (a / n, b / n, c / n)


def hydropathy_distribution_counts(seq: ProteinSequence) -> list[int]:
    idx = _class_indices(seq)
    counts = [0] * 9
    for a, b in zip(idx, idx[1:]):
        counts[3 * a + b] += 1
    return counts


def hydropathy_distribution(seq: ProteinSequence) -> tuple[float, ...]:
    """Fractions of the nine ordered adjacent class pairs; all zero for a single residue."""
    counts = hydropathy_distribution_counts(seq)
    if len(seq) < 2:
        return (0.0,) * 9
    denom = len(seq) - 1
    return tuple(c / denom for c in counts)


def global_features(seq: ProteinSequence) -> GlobalFeatures:
    return GlobalFeatures(
        average_molecular_weight(seq),
        average_isoelectric_point(seq),
        hydropathy_composition(seq),
        hydropathy_distribution(seq),
    )


def _require_pairs(seq: ProteinSequence):
    if len(seq) < 2:
        raise SequenceTooShort(f"2-gram features need at least 2 residues, got {len(seq)}")


def two_gram_counts(seq: ProteinSequence) -> dict[str, int]:
    """Occurrences of each overlapping residue pair, in order of first appearance."""
    _require_pairs(seq)
    s = seq.residues
    return dict(Counter(s[i : i + 2] for i in range(len(s) - 1)))


def exchange_two_gram_counts(seq: ProteinSequence) -> dict[str, int]:
    _require_pairs(seq)
    groups = [g.value for g in to_exchange_groups(seq)]
    return dict(Counter(a + b for a, b in zip(groups, groups[1:])))


def ngram_stats(counts: dict[str, int], seq_len: int) -> NGramStats:
    """Mean and sample standard deviation of ``x = c / (seq_len - 1)``.

    Both are taken over the N distinct observed patterns only; the std of a
    single pattern is defined as 0.
    """
    if not counts:
        raise ValueError("counts must be non-empty")
    if seq_len < 2:
        raise SequenceTooShort(f"seq_len must be >= 2, got {seq_len}")
    denom = seq_len - 1
    xs = [c / denom for c in counts.values()]
    n = len(xs)
    mean = math.fsum(xs) / n
    if n == 1:
        std = 0.0
    else:
        std = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (n - 1))
    return NGramStats(dict(counts), mean, std, n)


def feature_vector(seq: ProteinSequence) -> np.ndarray:
    """The 18 warehouse features in canonical order (see module docstring)."""
    _require_pairs(seq)
    g = global_features(seq)
    aa = ngram_stats(two_gram_counts(seq), len(seq))
    ex = ngram_stats(exchange_two_gram_counts(seq), len(seq))
    return np.array(
        [
            g.avg_molecular_weight,
            g.avg_isoelectric_point,
            *g.composition,
            *g.distribution,
            aa.mean,
            aa.std,
            ex.mean,
            ex.std,
        ],
        dtype=float,
    )


def pattern_vector(seq: ProteinSequence) -> np.ndarray:
    """436 normalized 2-gram values: 400 residue pairs then 36 exchange-group pairs."""
    out = np.zeros(PATTERN_DIM)
    denom = len(seq) - 1
    for counts in (two_gram_counts(seq), exchange_two_gram_counts(seq)):
        for pattern, c in counts.items():
            out[_SLOT_INDEX[pattern]] = c / denom
    return out


def pattern_slot(pattern: str) -> int:
    """Index of a 2-gram (``"AR"`` or ``"e4e1"``) in the 436-slot pattern vector."""
    return _SLOT_INDEX[pattern]
