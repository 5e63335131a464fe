"""Child-process entry point: run one benchmark repetition, print its record.

Reads `{"config": {...}, "rep": n}` as JSON on stdin and writes the record
as JSON on stdout. The parent supervises with a timeout, so a deadlocking
configuration simply gets this process killed.
"""

import dataclasses
import json
import sys

from .bench import BenchConfig, run_repetition


def main() -> int:
    payload = json.loads(sys.stdin.read())
    config = BenchConfig(**payload["config"])
    record, _ = run_repetition(config, rep=payload["rep"])
    json.dump(dataclasses.asdict(record), sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
