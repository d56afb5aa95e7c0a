"""Protein family classification by a fuzzy / neural / nearest-neighbour cascade."""

from .cascade import CascadeConfig, CascadeResult, Classifier, classify, rank_features
from .errors import CascadeError, NoiseError
from .features import FEATURE_NAMES, feature_vector, pattern_vector
from .knowledge import (
    KnowledgeTable,
    Warehouse,
    build_knowledge,
    ensure_knowledge,
    insert_row,
    load_knowledge,
    load_warehouse,
    save_knowledge,
    save_warehouse,
)
from .seq_core import ProteinSequence, parse_fasta, parse_sequence

__version__ = "0.1.0"
