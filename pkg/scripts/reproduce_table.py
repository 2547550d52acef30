"""Print the regime table for several (n, k) at gap 1e-6."""
import argparse

from calabi_kee.cli import main

PAIRS = [(2, 1), (2, 2), (3, 1), (3, 2)]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--format", default="text", choices=["text", "json", "csv"])
    args = ap.parse_args()
    for n, k in PAIRS:
        print(f"# n={n} k={k}")
        main(["table", "--n", str(n), "--k", str(k), "--format", args.format])
        print()
