#!/usr/bin/env python
# Feature extraction on the eight-residue sequence MARETFAR.

import numpy as np

from protcascade.features import (
    FEATURE_NAMES,
    average_isoelectric_point,
    average_molecular_weight,
    exchange_two_gram_counts,
    feature_vector,
    hydropathy_composition,
    hydropathy_distribution,
    ngram_stats,
    pattern_vector,
    total_molecular_weight,
    two_gram_counts,
)
from protcascade.seq_core import parse_sequence, to_exchange_groups

seq = parse_sequence("MARETFAR")

print("total weight  ", round(total_molecular_weight(seq), 2))      # 1107.25
print("average weight", round(average_molecular_weight(seq), 2))    # 138.41
# 53.56 / 8 = 6.695 exactly; two-decimal rounding shows 6.70, truncation 6.69
print("average pI    ", average_isoelectric_point(seq))

print("composition   ", [f"{100 * x:.2f}%" for x in hydropathy_composition(seq)])
print("distribution  ", [f"{100 * x:.2f}%" for x in hydropathy_distribution(seq)])

aa = two_gram_counts(seq)
print("2-grams       ", aa)   # TF appears once; there is no TA pair in this sequence
print("exchange      ", "".join(g.value for g in to_exchange_groups(seq)))
ex = exchange_two_gram_counts(seq)
print("exchange pairs", ex)

s = ngram_stats(aa, len(seq))
# six distinct pairs -> mean 1/6; the sample std over {2/7, 1/7 x5} is sqrt(6)/42
print(f"mean {s.mean:.4f}  std {s.std:.4f}  (sqrt(6)/42 = {np.sqrt(6) / 42:.4f})")

for name, value in zip(FEATURE_NAMES, feature_vector(seq)):
    print(f"  {name:<22}{value:.6f}")

v = pattern_vector(seq)
print("pattern vector:", v.shape, "nonzero", np.count_nonzero(v[:400]), "+", np.count_nonzero(v[400:]))
