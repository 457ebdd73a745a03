#!/usr/bin/env python3
"""Build a class-balanced MNIST subset in IDX format.

The source is the 5000-image MNIST CSV that ships inside the mlxtend wheel
(mlxtend/data/data/mnist_5k.csv.gz, 784 pixel columns then the label).
Fetch the wheel with

    pip download mlxtend --no-deps -d /tmp/wheels

and pass it with --wheel, or pass an extracted CSV with --csv.

Images are interleaved by class (0,1,...,9,0,1,...), so every prefix of the
output stays balanced.
"""

import argparse
import gzip
import io
import pathlib
import struct
import sys
import zipfile

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def read_rows(args):
    if args.csv:
        raw = pathlib.Path(args.csv).read_bytes()
    else:
        with zipfile.ZipFile(args.wheel) as whl:
            raw = whl.read(MEMBER)
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    for line in io.StringIO(raw.decode("ascii")):
        line = line.strip()
        if not line:
            continue
        values = [int(float(v)) for v in line.split(",")]
        if len(values) != 785:
            sys.exit(f"unexpected row width {len(values)}")
        yield values[:784], values[784]


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--wheel", help="path to an mlxtend wheel")
    src.add_argument("--csv", help="path to mnist_5k.csv(.gz)")
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--out", default="data")
    args = p.parse_args()

    by_class = {k: [] for k in range(10)}
    for pixels, label in read_rows(args):
        if len(by_class[label]) < args.per_class:
            by_class[label].append(pixels)
    short = [k for k, v in by_class.items() if len(v) < args.per_class]
    if short:
        sys.exit(f"not enough images for classes {short}")

    images, labels = [], []
    for i in range(args.per_class):
        for k in range(10):
            images.append(by_class[k][i])
            labels.append(k)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = len(images)
    with open(out / "mnist-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, n, 28, 28))
        for pixels in images:
            f.write(bytes(pixels))
    with open(out / "mnist-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, n))
        f.write(bytes(labels))
    print(f"wrote {n} images to {out}")


if __name__ == "__main__":
    main()
