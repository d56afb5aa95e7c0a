#!/usr/bin/env python
# Warehouse -> knowledge table, and the countrow rule that decides when to rebuild.

import tempfile
from pathlib import Path

from protcascade.knowledge import (
    build_knowledge,
    ensure_knowledge,
    insert_row,
    load_knowledge,
    load_warehouse,
    save_knowledge,
    save_warehouse,
)
from protcascade.seq_core import parse_sequence
from protcascade.synthetic import synthetic_warehouse

tmp = Path(tempfile.mkdtemp())
save_warehouse(synthetic_warehouse(n_families=3, per_family=50, seed=0), tmp / "wh.tsv")

wh = load_warehouse(tmp / "wh.tsv")
kb = build_knowledge(wh)
save_knowledge(kb, tmp / "kb.tsv")
print(wh)
print("countrow:", kb.row_count, " ranges:", len(kb.ranges()))
print("first lines of the knowledge file:")
print("\n".join((tmp / "kb.tsv").read_text().splitlines()[:3]))

r = kb.range_of("SF01", 0)
print(f"SF01 average weight range: [{r.min:.2f}, {r.max:.2f}], mean {r.mean:.2f}")

# unchanged warehouse: the cached table is reused
kb, rebuilt = ensure_knowledge(wh, load_knowledge(tmp / "kb.tsv"))
print("rebuilt after reload:", rebuilt)

# one insert changes the size, so the next check rebuilds
insert_row(wh, "SF01", parse_sequence("MARETFAR"))
kb, rebuilt = ensure_knowledge(wh, kb)
print("rebuilt after insert:", rebuilt, " countrow:", kb.row_count)
