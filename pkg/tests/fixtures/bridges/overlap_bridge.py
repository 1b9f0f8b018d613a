#!/usr/bin/env python3
"""Well-behaved scorer bridge: token-overlap count between query and doc."""
import json
import sys


def overlap(query: str, doc: str) -> float:
    q = set(query.lower().split())
    d = set(doc.lower().split())
    return float(len(q & d))


def main():
    for line in sys.stdin:
        msg = json.loads(line)
        op = msg.get("op")
        if op == "hello":
            reply = {"op": "hello", "protocol": 1, "name": "overlap"}
        elif op == "score":
            reply = {
                "op": "scores",
                "batch": [
                    {"qid": row["qid"], "did": row["did"],
                     "score": overlap(row["query"], row["doc"])}
                    for row in msg["batch"]
                ],
            }
        elif op == "bye":
            return
        else:
            reply = {"op": "error", "message": f"unknown op {op!r}"}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
