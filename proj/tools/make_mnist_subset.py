#!/usr/bin/env python3
"""Write a 5000-image MNIST subset as IDX files.

The subset is the one bundled with mlxtend (mlxtend/data/data/mnist_5k.csv.gz,
500 images per digit, one row per image: 784 pixel values then the label).
Pass either that CSV or an mlxtend wheel:

    pip download --no-deps mlxtend -d /tmp/mlx
    python3 tools/make_mnist_subset.py /tmp/mlx/mlxtend-*.whl data/mnist5k
"""

import argparse
import gzip
import io
import pathlib
import struct
import sys
import zipfile

CSV_IN_WHEEL = "mlxtend/data/data/mnist_5k.csv.gz"


def read_rows(source: pathlib.Path):
    if source.suffix == ".whl":
        with zipfile.ZipFile(source) as wheel:
            raw = wheel.read(CSV_IN_WHEEL)
    else:
        raw = source.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    for line in io.StringIO(raw.decode()):
        line = line.strip()
        if line:
            yield [int(float(v)) for v in line.split(",")]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("source", type=pathlib.Path, help="mnist_5k.csv(.gz) or an mlxtend wheel")
    parser.add_argument("out_dir", type=pathlib.Path)
    args = parser.parse_args()

    rows = list(read_rows(args.source))
    pixels = bytearray()
    labels = bytearray()
    for row in rows:
        if len(row) != 785:
            print(f"unexpected row length {len(row)}", file=sys.stderr)
            return 1
        pixels.extend(row[:784])
        labels.append(row[784])

    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "images-idx3-ubyte").write_bytes(struct.pack(">IIII", 0x803, len(rows), 28, 28) + pixels)
    (args.out_dir / "labels-idx1-ubyte").write_bytes(struct.pack(">II", 0x801, len(rows)) + labels)
    print(f"wrote {len(rows)} images to {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
