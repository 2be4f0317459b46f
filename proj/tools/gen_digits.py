#!/usr/bin/env python3
"""Generate a handwritten-digit-style dataset in IDX format.

Renders digits 0-9 with several fonts at high resolution, applies a random
affine jitter (rotation, shift, scale), downsamples to 28x28 greyscale, and
writes the four canonical IDX files (train/test images and labels). Output is
deterministic for a given seed. Existing files are left alone unless --force
is given.
"""

import argparse
import glob
import os
import struct
import sys

import numpy as np
from PIL import Image, ImageDraw, ImageFont


def find_fonts():
    import matplotlib

    ttf_dir = os.path.join(os.path.dirname(matplotlib.__file__), "mpl-data", "fonts", "ttf")
    wanted = [
        "DejaVuSans.ttf",
        "DejaVuSans-Bold.ttf",
        "DejaVuSans-Oblique.ttf",
        "DejaVuSerif.ttf",
        "DejaVuSerif-Bold.ttf",
        "DejaVuSansMono.ttf",
        "DejaVuSerif-Italic.ttf",
    ]
    paths = [os.path.join(ttf_dir, w) for w in wanted if os.path.exists(os.path.join(ttf_dir, w))]
    if not paths:
        paths = sorted(glob.glob(os.path.join(ttf_dir, "DejaVu*.ttf")))
    if not paths:
        sys.exit("no usable TrueType fonts found under " + ttf_dir)
    return paths


def render_digit(digit, font, rng, hi=112):
    """Render one digit on a hi x hi canvas with random jitter, return 28x28 uint8."""
    img = Image.new("L", (hi, hi), 0)
    draw = ImageDraw.Draw(img)
    text = str(digit)
    bbox = draw.textbbox((0, 0), text, font=font)
    w, h = bbox[2] - bbox[0], bbox[3] - bbox[1]
    # centre with a random shift of up to ~6% of the canvas; a random stroke
    # width keeps glyphs legible after heavy blur (thin strokes wash out)
    dx = (hi - w) / 2 - bbox[0] + rng.uniform(-0.06, 0.06) * hi
    dy = (hi - h) / 2 - bbox[1] + rng.uniform(-0.06, 0.06) * hi
    # stroke width capped at 2: wider strokes close up the counters of 6/8/9
    draw.text((dx, dy), text, fill=255, font=font, stroke_width=int(rng.integers(1, 3)),
              stroke_fill=255)
    img = img.rotate(rng.uniform(-9.0, 9.0), resample=Image.BILINEAR, fillcolor=0)
    out = img.resize((28, 28), resample=Image.LANCZOS)
    arr = np.asarray(out, dtype=np.float64)
    arr *= rng.uniform(0.85, 1.0)  # vary stroke intensity
    return np.clip(arr, 0, 255).astype(np.uint8)


def build_split(count, fonts, rng):
    images = np.zeros((count, 28, 28), dtype=np.uint8)
    labels = np.zeros(count, dtype=np.uint8)
    size_cache = {}
    for i in range(count):
        digit = i % 10
        path = fonts[rng.integers(len(fonts))]
        size = int(rng.integers(72, 101))  # glyph height varies ~64-90% of canvas
        key = (path, size)
        if key not in size_cache:
            size_cache[key] = ImageFont.truetype(path, size)
        images[i] = render_digit(digit, size_cache[key], rng)
        labels[i] = digit
    perm = rng.permutation(count)
    return images[perm], labels[perm]


def write_idx_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", 2051, images.shape[0], 28, 28))
        f.write(images.tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">ii", 2049, labels.shape[0]))
        f.write(labels.tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data", help="output directory")
    ap.add_argument("--train", type=int, default=10000)
    ap.add_argument("--test", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=20260826)
    ap.add_argument("--force", action="store_true", help="regenerate even if files exist")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    names = [
        "train-images-idx3-ubyte",
        "train-labels-idx1-ubyte",
        "t10k-images-idx3-ubyte",
        "t10k-labels-idx1-ubyte",
    ]
    paths = [os.path.join(args.out, n) for n in names]
    if not args.force and all(os.path.exists(p) for p in paths):
        print("dataset already present in", args.out)
        return

    fonts = find_fonts()
    rng = np.random.default_rng(args.seed)
    train_imgs, train_labels = build_split(args.train, fonts, rng)
    test_imgs, test_labels = build_split(args.test, fonts, rng)

    write_idx_images(paths[0], train_imgs)
    write_idx_labels(paths[1], train_labels)
    write_idx_images(paths[2], test_imgs)
    write_idx_labels(paths[3], test_labels)
    print(f"wrote {args.train} train / {args.test} test images to {args.out}")


if __name__ == "__main__":
    main()
