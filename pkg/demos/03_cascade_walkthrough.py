#!/usr/bin/env python
# Follow individual sequences through the three phases.
# Weak family profiles are used on purpose so that every phase gets work.

from collections import Counter

from protcascade.cascade import CascadeConfig, Classifier
from protcascade.knowledge import build_knowledge
from protcascade.seq_core import parse_sequence
from protcascade.synthetic import synthetic_draws, synthetic_warehouse

weak = dict(concentration=0.3, floor=0.5)
wh = synthetic_warehouse(n_families=5, per_family=200, seed=3, **weak)
kb = build_knowledge(wh)
clf = Classifier(wh, kb, config=CascadeConfig(seed=3))

print("top ranked features:", clf.ranking.order[:8])

tests = synthetic_draws(5, 200, seed=3, **weak)
results = [clf.classify(seq) for _, seq in tests]
print("resolved by:", Counter(r.resolved_by for r in results))
print("accuracy:", sum(r.family == fam for r, (fam, _) in zip(results, tests)) / len(tests))

# one example per phase
shown = set()
for (fam, _), res in zip(tests, results):
    if res.resolved_by in shown:
        continue
    shown.add(res.resolved_by)
    print(f"\ntrue {fam} -> {res.family} via {res.resolved_by}")
    for phase, fams in res.trace:
        print(f"   after {phase}: {list(fams)}")
    print("   times (ms):", {k: round(v, 3) for k, v in res.phase_times.items()})

res = clf.classify(parse_sequence("W" * 60))
print(f"\npoly-W outlier -> {res.family} via {res.resolved_by}, screen empty: {res.phase1_empty}")
print("\nphase calls:", dict(clf.calls))
