"""Command-line surface: track sequences, evaluate results, generate synthetic
sequences, and benchmark directories of sequences.

Sequences are directories of lexicographically ordered PNG/JPEG frames with a
ground-truth file of comma-separated "x,y,w,h" lines (first line initializes
the tracker). Exit codes: 0 ok, 2 input error, 3 decode error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path
from typing import Iterator

import numpy as np

from . import __version__
from . import rng as rng_streams
from .evaluation import (
    MetricReport,
    TrackResult,
    aggregate_csv,
    aggregate_rows,
    aggregate_table,
    report,
    sequence_csv,
)
from .imaging import BoundingBox, GrayFrame, load_frame
from .tracker import TrackerConfig, run

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
GT_FILENAME = "groundtruth_rect.txt"


class InputError(Exception):
    """Bad paths, malformed ground truth, mismatched files (exit code 2)."""


class DecodeError(Exception):
    """An image file failed to decode (exit code 3)."""


# ---------------------------------------------------------------------------
# sequence I/O


def find_frames(seq_dir: Path) -> list[Path]:
    if not seq_dir.is_dir():
        raise InputError(f"sequence directory not found: {seq_dir}")
    frames = sorted(p for p in seq_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not frames and (seq_dir / "img").is_dir():
        frames = sorted(
            p for p in (seq_dir / "img").iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
        )
    if not frames:
        raise InputError(f"no image frames in {seq_dir}")
    return frames


def parse_gt_line(line: str) -> BoundingBox | None:
    parts = line.replace(",", " ").split()
    if len(parts) != 4:
        return None
    try:
        x, y, w, h = (int(float(v)) for v in parts)
        return BoundingBox(x, y, w, h)
    except ValueError:
        return None


def read_gt(path: Path) -> list[BoundingBox | None]:
    if not path.is_file():
        raise InputError(f"ground-truth file not found: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"ground-truth file is empty: {path}")
    return [parse_gt_line(ln) for ln in lines]


def iter_frames(paths: list[Path]) -> Iterator[GrayFrame]:
    for i, p in enumerate(paths):
        try:
            yield load_frame(p)
        except (OSError, ValueError) as e:
            raise DecodeError(f"frame {i} ({p}): {e}") from e


# ---------------------------------------------------------------------------
# synthetic sequences


def synth_sequence(
    n_frames: int,
    *,
    width: int = 160,
    height: int = 120,
    target_w: int = 32,
    target_h: int = 32,
    walk_step: int = 5,
    noise_sigma: float = 5.0 / 255.0,
    seed: int = 0,
    cell: int = 6,
    contrast: float = 0.3,
) -> tuple[list[np.ndarray], list[BoundingBox]]:
    """Checkerboard square on a mid-gray background doing a bounded random walk.

    Returns 8-bit grayscale frames plus the true box per frame. Per-frame
    displacement never exceeds walk_step (Euclidean); Gaussian pixel noise of
    the given sigma (on the [0, 1] scale) is added independently per frame.
    """
    if n_frames < 1:
        raise ValueError("need at least one frame")
    if target_w > width or target_h > height:
        raise ValueError("target does not fit in the frame")
    rng = rng_streams.stream(seed, "synth")
    ys, xs = np.mgrid[0:target_h, 0:target_w]
    cy, cx = ys // cell, xs // cell
    light = (cx + cy) % 2 == 1
    # fixed per-cell amplitude jitter keeps the checkerboard aperiodic, so
    # the detector cannot lock onto a one-period-shifted alias
    jitter = rng.uniform(0.6, 1.4, size=(int(cy.max()) + 1, int(cx.max()) + 1))
    amp = contrast * jitter[cy, cx]
    texture = 0.5 + np.where(light, amp, -amp)

    steps = [
        (dx, dy)
        for dy in range(-walk_step, walk_step + 1)
        for dx in range(-walk_step, walk_step + 1)
        if dx * dx + dy * dy <= walk_step * walk_step
    ]
    x = (width - target_w) // 2
    y = (height - target_h) // 2
    frames: list[np.ndarray] = []
    boxes: list[BoundingBox] = []
    for _ in range(n_frames):
        img = np.full((height, width), 0.5)
        img[y : y + target_h, x : x + target_w] = texture
        if noise_sigma > 0:
            img += rng.normal(0.0, noise_sigma, size=img.shape)
        frames.append(np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8))
        boxes.append(BoundingBox(x, y, target_w, target_h))
        if walk_step > 0:
            dx, dy = steps[int(rng.integers(len(steps)))]
            x = int(np.clip(x + dx, 0, width - target_w))
            y = int(np.clip(y + dy, 0, height - target_h))
    return frames, boxes


def write_sequence(out_dir: Path, frames: list[np.ndarray], boxes: list[BoundingBox]) -> None:
    from PIL import Image

    out_dir.mkdir(parents=True, exist_ok=True)
    for i, img in enumerate(frames):
        Image.fromarray(img, mode="L").save(out_dir / f"{i:05d}.png")
    gt = "".join(f"{b.x},{b.y},{b.w},{b.h}\n" for b in boxes)
    (out_dir / GT_FILENAME).write_text(gt)


# ---------------------------------------------------------------------------
# config plumbing

_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(TrackerConfig)}

_FLAG_TO_FIELD = {
    "num_weak": "num_weak",
    "num_select": "num_select",
    "ensemble": "ensemble_size",
    "alpha_pos": "alpha_pos",
    "search_radius": "search_radius",
    "pos_radius": "pos_radius",
    "neg_outer": "neg_outer",
    "neg_count": "neg_count",
    "neg_train": "neg_train_count",
    "lr": "learning_rate",
    "seed": "seed",
}


def read_config_file(path: Path) -> dict:
    """Flat key=value file with TrackerConfig field names as keys."""
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    values: dict = {}
    for i, line in enumerate(path.read_text().splitlines()):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{i + 1}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _CONFIG_FIELDS:
            raise InputError(f"{path}:{i + 1}: unknown config key {key!r}")
        kind = _CONFIG_FIELDS[key]
        values[key] = int(raw) if "int" in str(kind) else float(raw)
    return values


def build_config(args: argparse.Namespace) -> TrackerConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config_file(Path(args.config)))
    for flag, fname in _FLAG_TO_FIELD.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[fname] = v
    try:
        return TrackerConfig(**values)
    except ValueError as e:
        raise InputError(str(e)) from e


def _add_override_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="global RNG seed")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--num-weak", dest="num_weak", type=int, default=None)
    p.add_argument("--num-select", dest="num_select", type=int, default=None)
    p.add_argument("--ensemble", dest="ensemble", type=int, default=None)
    p.add_argument("--alpha-pos", dest="alpha_pos", type=float, default=None)
    p.add_argument("--search-radius", dest="search_radius", type=float, default=None)
    p.add_argument("--pos-radius", dest="pos_radius", type=float, default=None)
    p.add_argument("--neg-outer", dest="neg_outer", type=float, default=None)
    p.add_argument("--neg-count", dest="neg_count", type=int, default=None)
    p.add_argument("--neg-train", dest="neg_train", type=int, default=None)
    p.add_argument("--lr", dest="lr", type=float, default=None)


# ---------------------------------------------------------------------------
# commands


def _track_one(
    seq_dir: Path, gt_path: Path, out_dir: Path, cfg: TrackerConfig, debug_significance: bool
) -> dict:
    frames = find_frames(seq_dir)
    gt = read_gt(gt_path)
    if gt[0] is None:
        raise InputError(f"first ground-truth line of {gt_path} is not a valid box")
    if len(gt) > len(frames):
        raise InputError(
            f"{len(gt)} ground-truth lines for {len(frames)} frames in {seq_dir}"
        )
    sig_log: list[tuple[int, int, float]] | None = [] if debug_significance else None

    start = time.perf_counter()
    boxes = run(iter_frames(frames), gt[0], cfg, significance_log=sig_log)
    elapsed = time.perf_counter() - start

    out_dir.mkdir(parents=True, exist_ok=True)
    box_lines = ["frame,x,y,w,h"]
    box_lines += [f"{i},{b.x},{b.y},{b.w},{b.h}" for i, b in enumerate(boxes)]
    (out_dir / "boxes.csv").write_text("\n".join(box_lines) + "\n")

    manifest = {
        "version": __version__,
        "sequence": str(seq_dir),
        "ground_truth": str(gt_path),
        "seed": cfg.seed,
        "config": dataclasses.asdict(cfg),
        "num_frames": len(boxes),
        "boxes": [[b.x, b.y, b.w, b.h] for b in boxes],
        "timing": {
            "total_seconds": round(elapsed, 3),
            "fps": round(len(boxes) / elapsed, 2) if elapsed > 0 else None,
        },
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    if sig_log is not None:
        rows = ["frame,instance,r"]
        rows += [f"{t},{j},{r:.9f}" for t, j, r in sig_log]
        (out_dir / "significance.csv").write_text("\n".join(rows) + "\n")
    return manifest


def cmd_track(args: argparse.Namespace) -> int:
    seq_dir = Path(args.seq)
    gt_path = Path(args.gt) if args.gt else seq_dir / GT_FILENAME
    cfg = build_config(args)
    manifest = _track_one(seq_dir, gt_path, Path(args.out), cfg, args.debug_significance)
    timing = manifest["timing"]
    print(
        f"tracked {manifest['num_frames']} frames in {timing['total_seconds']}s "
        f"({timing['fps']} fps) -> {args.out}"
    )
    return 0


def read_boxes_csv(path: Path) -> list[BoundingBox]:
    if not path.is_file():
        raise InputError(f"results file not found: {path}")
    boxes = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("frame,"):
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise InputError(f"{path}: bad results row {line!r}")
        _, x, y, w, h = parts
        boxes.append(BoundingBox(int(x), int(y), int(w), int(h)))
    if not boxes:
        raise InputError(f"results file holds no boxes: {path}")
    return boxes


def _evaluate(name: str, boxes: list[BoundingBox], gt: list[BoundingBox | None]) -> tuple[MetricReport, TrackResult, list[int]]:
    if len(gt) != len(boxes):
        raise InputError(f"row mismatch: {len(boxes)} result rows vs {len(gt)} ground-truth rows")
    skipped = [i for i, g in enumerate(gt) if g is None]
    pairs = [(b, g) for b, g in zip(boxes, gt) if g is not None]
    if not pairs:
        raise InputError("no valid ground-truth rows to evaluate")
    result = TrackResult(name, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
    return report(result), result, skipped


def cmd_eval(args: argparse.Namespace) -> int:
    boxes = read_boxes_csv(Path(args.results))
    gt = read_gt(Path(args.gt))
    results = Path(args.results)
    name = args.name or (results.parent.name if results.stem == "boxes" else results.stem)
    rep, result, skipped = _evaluate(name, boxes, gt)
    if skipped:
        print(f"skipped {len(skipped)} invalid ground-truth rows: {skipped}", file=sys.stderr)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metrics.csv").write_text(sequence_csv(result, rep))
    rows = aggregate_rows([(name, rep)])
    (out_dir / "table.txt").write_text(aggregate_table(rows))
    (out_dir / "table.csv").write_text(aggregate_csv(rows))
    print(aggregate_table(rows), end="")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        w, h = (int(v) for v in args.size.split("x"))
        tw, th = (int(v) for v in args.target.split("x"))
    except ValueError:
        raise InputError(f"sizes must look like 160x120, got {args.size!r} / {args.target!r}")
    frames, boxes = synth_sequence(
        args.frames,
        width=w,
        height=h,
        target_w=tw,
        target_h=th,
        walk_step=args.step,
        noise_sigma=args.noise,
        seed=args.seed,
        cell=args.cell,
        contrast=args.contrast,
    )
    out = Path(args.out)
    try:
        write_sequence(out, frames, boxes)
    except OSError as e:
        raise InputError(f"cannot write to {out}: {e}") from e
    print(f"wrote {len(frames)} frames + {GT_FILENAME} -> {out}")
    return 0


def discover_sequences(root: Path) -> list[tuple[str, Path, Path]]:
    """(name, frames dir, gt file) for every sequence subdirectory of root."""
    if not root.is_dir():
        raise InputError(f"benchmark root not found: {root}")
    found = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        gt = sub / GT_FILENAME
        if not gt.is_file():
            txts = sorted(sub.glob("*.txt"))
            if len(txts) != 1:
                continue
            gt = txts[0]
        found.append((sub.name, sub, gt))
    if not found:
        raise InputError(f"no sequences under {root}")
    return found


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    out_root = Path(args.out)
    results = []
    for name, seq_dir, gt_path in discover_sequences(Path(args.root)):
        manifest = _track_one(seq_dir, gt_path, out_root / name, cfg, args.debug_significance)
        boxes = [BoundingBox(*b) for b in manifest["boxes"]]
        gt = read_gt(gt_path)
        n = min(len(gt), len(boxes))  # gt may cover only a prefix of the frames
        rep, result, skipped = _evaluate(name, boxes[:n], gt[:n])
        if skipped:
            print(f"{name}: skipped {len(skipped)} invalid ground-truth rows", file=sys.stderr)
        (out_root / name / "metrics.csv").write_text(sequence_csv(result, rep))
        results.append((name, rep))
    rows = aggregate_rows(results)
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "bench_table.txt").write_text(aggregate_table(rows))
    (out_root / "bench_table.csv").write_text(aggregate_csv(rows))
    print(aggregate_table(rows), end="")
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigmil",
        description="Significance-guided multiple-instance boosting tracker",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("track", help="track one sequence")
    p.add_argument("--seq", required=True, help="directory of frame images")
    p.add_argument("--gt", default=None, help=f"ground-truth file (default <seq>/{GT_FILENAME})")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--debug-significance", action="store_true")
    _add_override_flags(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="evaluate a boxes.csv against ground truth")
    p.add_argument("--results", required=True, help="boxes.csv from track")
    p.add_argument("--gt", required=True, help="ground-truth file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--name", default=None, help="sequence name for the table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic test sequence")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--noise", type=float, default=5.0 / 255.0, help="pixel noise sigma on [0,1]")
    p.add_argument("--step", type=int, default=5, help="max per-frame displacement")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", default="160x120", help="frame size WxH")
    p.add_argument("--target", default="32x32", help="target size WxH")
    p.add_argument("--cell", type=int, default=6, help="checkerboard cell size")
    p.add_argument("--contrast", type=float, default=0.3)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="track + eval every sequence under a directory")
    p.add_argument("--root", required=True, help="directory of sequence directories")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--debug-significance", action="store_true")
    _add_override_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DecodeError as e:
        print(f"decode error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
