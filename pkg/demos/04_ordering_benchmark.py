#!/usr/bin/env python
# Fuzzy-first versus neural-first on a seeded synthetic corpus.
# Same as: protcascade bench --synthetic --families 5 --per-family 500 --n 500 --seed 1

from protcascade.bench import bench, format_table
from protcascade.cascade import CascadeConfig
from protcascade.synthetic import synthetic_draws, synthetic_warehouse

wh = synthetic_warehouse(n_families=5, per_family=500, seed=1)
tests = synthetic_draws(5, 500, seed=1)

report = bench(tests, wh, CascadeConfig(seed=1))
print(format_table(report))

fuzzy, neural = report
print(f"fuzzy-first resolved {fuzzy.resolved['phase1']}/{fuzzy.n} in the first phase")
print(f"mean time per sequence: {fuzzy.mean_ms:.3f} ms vs {neural.mean_ms:.3f} ms")
# neural-first must train on every family before it can answer anything;
# fuzzy-first only trains when the screen leaves more than one family.
