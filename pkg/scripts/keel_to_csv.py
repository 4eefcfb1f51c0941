"""Convert KEEL ``.dat`` files (as shipped in the ``keel-ds`` wheel) into the
header-row CSV layout read by ``rfcbf.io.load_dataset``.

    pip download --no-deps keel-ds -d /tmp/keel
    python scripts/keel_to_csv.py /tmp/keel/keel_ds-*.whl data/ ionosphere sonar wdbc

The class is written as the last column, named ``class``.
"""

import argparse
import csv
import zipfile
from pathlib import Path


def read_keel(text):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@") or line.startswith("%"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("wheel", help="keel-ds wheel file")
    parser.add_argument("out_dir")
    parser.add_argument("names", nargs="+")
    parser.add_argument("--subset", default="balanced")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(args.wheel) as wheel:
        for name in args.names:
            text = wheel.read(f"keel_ds/data/{args.subset}/raw/{name}.dat").decode()
            rows = read_keel(text)
            width = len(rows[0])
            header = [f"a{i + 1}" for i in range(width - 1)] + ["class"]
            with open(out / f"{name}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(header)
                writer.writerows(rows)
            print(f"{name}: {len(rows)} rows, {width - 1} features")


if __name__ == "__main__":
    main()
