#!/usr/bin/env python3
"""Count the rows of a ConceptNet assertions dump that `khop ingest` keeps.

Written separately from the C++ parser so the two can check each other.
Prints a JSON object with the same counters as the ingest report.
"""

import argparse
import gzip
import json
import sys


def concept(uri):
    """Returns (language, term) for /c/<lang>/<term>[/...], else None."""
    if not uri.startswith("/c/"):
        return None
    parts = uri[3:].split("/")
    if len(parts) < 2 or not parts[0] or not parts[1]:
        return None
    return parts[0], parts[1]


def normalize(term):
    return " ".join(term.replace("_", " ").split()).lower()


def classify(line, lang, min_weight, excluded):
    fields = line.split("\t")
    if len(fields) < 5:
        return "malformed"
    rel, start, end, meta = fields[1], concept(fields[2]), concept(fields[3]), fields[4]
    if not rel.startswith("/r/") or len(rel) == 3 or start is None or end is None:
        return "malformed"
    if lang and (start[0] != lang or end[0] != lang):
        return "language"
    try:
        weight = json.loads(meta)["weight"]
    except (ValueError, KeyError, TypeError):
        return "malformed"
    if isinstance(weight, bool) or not isinstance(weight, (int, float)) or not weight >= 0:
        return "malformed"
    if not normalize(start[1]) or not normalize(end[1]):
        return "malformed"
    if rel[3:] in excluded:
        return "relation"
    if weight < min_weight:
        return "weight"
    return "kept"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dump")
    ap.add_argument("--lang", default="en")
    ap.add_argument("--min-weight", type=float, default=1.0)
    ap.add_argument("--exclude-relation", action="append", default=[])
    args = ap.parse_args()

    counts = {"read": 0, "kept": 0, "language": 0, "weight": 0, "relation": 0, "malformed": 0}
    opener = gzip.open if args.dump.endswith(".gz") else open
    with opener(args.dump, "rt", encoding="utf-8", newline="\n") as f:
        for line in f:
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            counts["read"] += 1
            counts[classify(line, args.lang, args.min_weight, set(args.exclude_relation))] += 1
    json.dump(
        {
            "rows_read": counts["read"],
            "rows_kept": counts["kept"],
            "rows_skipped_language": counts["language"],
            "rows_skipped_weight": counts["weight"],
            "rows_skipped_relation": counts["relation"],
            "rows_malformed": counts["malformed"],
        },
        sys.stdout,
    )
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
