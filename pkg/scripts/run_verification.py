"""Run the full reproduction suite and write the JSON report."""

import argparse
import sys
from pathlib import Path

from spinlab.scan import verify_paper


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/verification.json"))
    args = ap.parse_args()
    report = verify_paper(args.seed, timing=True)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(report.to_json() + "\n")
    for c in report.claims:
        tag = "" if c.reading == "as-stated" else f" [{c.reading}]"
        print(f"{c.status.upper():4s} {c.id}{tag}")
    print(f"wrote {args.out} ({report.elapsed_ms:.0f} ms)")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
