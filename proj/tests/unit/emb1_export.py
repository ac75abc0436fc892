#!/usr/bin/env python3
"""Writes a dataset and a 256-dimensional EMB1 export the way the encoder's
export step lays it out: one float32 vector per unique context and response id.

Usage: emb1_export.py OUT_DIR
"""
import os
import random
import struct
import sys

STATE_SIZE = 128
DIM = 2 * STATE_SIZE


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    rng = random.Random(0)
    rows = []
    for c in range(3):
        ctx = f"ctx{c}"
        for r in range(10):
            rows.append((ctx, f"question number {c}", f"{ctx}_resp{r}", f"answer {r}", int(r == c)))

    with open(os.path.join(out_dir, "dataset.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("context_id\tcontext_text\tresponse_id\tresponse_text\tlabel\n")
        for row in rows:
            f.write("\t".join(str(v) for v in row) + "\n")

    ids = []
    for ctx, _, resp, _, _ in rows:
        for i in (ctx, resp):
            if i not in ids:
                ids.append(i)

    with open(os.path.join(out_dir, "embeddings.emb"), "wb") as f:
        f.write(b"EMB1")
        f.write(struct.pack("<II", DIM, len(ids)))
        for i in ids:
            raw = i.encode("utf-8")
            f.write(struct.pack("<I", len(raw)))
            f.write(raw)
            f.write(struct.pack(f"<{DIM}f", *(rng.gauss(0.0, 1.0) for _ in range(DIM))))


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    main(sys.argv[1])
