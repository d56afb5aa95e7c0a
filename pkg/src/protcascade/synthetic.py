"""Seeded synthetic protein families for benchmarking without real data.

Each family is a residue-frequency profile: a sparse Dirichlet draw over the
20 letters blended with a uniform floor so every residue stays possible.
Sequences are i.i.d. draws from the profile with lengths in ``[min_len, max_len]``.
"""

from __future__ import annotations

import numpy as np

from .cascade import component_rng
from .knowledge import Warehouse
from .features import feature_vector
from .seq_core import ALPHABET, ProteinSequence

_LETTERS = np.array(list(ALPHABET))


def family_names(n_families: int) -> list[str]:
    return [f"SF{i + 1:02d}" for i in range(n_families)]


def family_profiles(n_families: int, seed: int, concentration: float = 0.15, floor: float = 0.2) -> np.ndarray:
    """``(n_families, 20)`` residue probabilities, rows summing to 1."""
    rng = component_rng(seed, "profiles")
    sparse = rng.dirichlet(np.full(len(ALPHABET), concentration), size=n_families)
    return (1.0 - floor) * sparse + floor / len(ALPHABET)


def draw_sequence(profile, rng: np.random.Generator, min_len: int = 100, max_len: int = 400) -> ProteinSequence:
    n = int(rng.integers(min_len, max_len + 1))
    return ProteinSequence("".join(rng.choice(_LETTERS, size=n, p=profile)))


def synthetic_corpus(n_families: int, per_family: int, seed: int, stream: str = "train", **profile_kw):
    """``per_family`` labelled sequences for each family, grouped by family.

    ``profile_kw`` (``concentration``, ``floor``) is passed to :func:`family_profiles`.
    """
    profiles = family_profiles(n_families, seed, **profile_kw)
    out = []
    for name, profile in zip(family_names(n_families), profiles):
        rng = component_rng(seed, stream, name)
        out.extend((name, draw_sequence(profile, rng)) for _ in range(per_family))
    return out


def synthetic_draws(n_families: int, n: int, seed: int, stream: str = "test", **profile_kw):
    """``n`` held-out labelled sequences with families chosen uniformly at random.

    ``seed`` fixes the family profiles; ``stream`` selects an independent set of draws.
    """
    profiles = family_profiles(n_families, seed, **profile_kw)
    names = family_names(n_families)
    rng = component_rng(seed, stream)
    picks = rng.integers(0, n_families, size=n)
    return [(names[i], draw_sequence(profiles[i], rng)) for i in picks]


def synthetic_warehouse(n_families: int = 5, per_family: int = 500, seed: int = 0, **profile_kw) -> Warehouse:
    wh = Warehouse()
    for family, seq in synthetic_corpus(n_families, per_family, seed, **profile_kw):
        wh.append(family, feature_vector(seq))
    return wh
