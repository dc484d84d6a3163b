#!/usr/bin/env python3
"""Write a synthetic embedding JSONL file for a corpus manifest.

Each document gets standard normal noise plus `signal` times a random
direction shared by its class, so embeddings carry label information without
any model inference. Output is deterministic for a given seed.
"""

import argparse
import csv
import json
import random


def read_manifest(path):
    declared = None
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        lines = []
        for line in f:
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("classes:"):
                    declared = [c.strip() for c in body[len("classes:"):].split(",") if c.strip()]
                continue
            if line.strip():
                lines.append(line)
    reader = csv.DictReader(lines)
    for row in reader:
        rows.append((row["id"], row["label"]))
    classes = declared or list(dict.fromkeys(label for _, label in rows))
    return rows, classes


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--manifest", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--dim", type=int, default=768)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--signal", type=float, default=0.5)
    ap.add_argument("--model", default="synthetic-gaussian")
    args = ap.parse_args()

    rows, classes = read_manifest(args.manifest)
    rng = random.Random(args.seed)
    directions = {c: [rng.gauss(0.0, 1.0) for _ in range(args.dim)] for c in classes}

    with open(args.out, "w", encoding="utf-8") as out:
        out.write(json.dumps({"dim": args.dim, "granularity": "document", "model": args.model}) + "\n")
        for doc_id, label in rows:
            d = directions[label]
            v = [round(rng.gauss(0.0, 1.0) + args.signal * d[j], 6) for j in range(args.dim)]
            out.write(json.dumps({"id": doc_id, "v": v}) + "\n")


if __name__ == "__main__":
    main()
