"""On-disk dataset format: ``manifest.json`` plus one headerless CSV per frame set."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import N_FAST, Dataset, FrameSet, StateLabel, ValidationError

MANIFEST = "manifest.json"


class DatasetFormatError(ValidationError):
    """A dataset directory does not conform to the documented layout."""


def format_row(row):
    # repr() is the shortest string that parses back to the same double, so
    # values with <= 9 significant digits stay short and nothing is lost.
    return ",".join(map(repr, row.tolist()))


def write_dataset(dataset: Dataset, path) -> None:
    path = Path(path)
    if not isinstance(dataset, Dataset):
        raise ValidationError(f"expected Dataset, got {type(dataset).__name__}")
    try:
        path.mkdir(parents=True, exist_ok=True)
        entries = []
        for fs in dataset.frame_sets:
            if fs.processed:
                raise ValidationError(f"frame set {fs.id!r} holds processed (non-measured) data")
            fname = f"{fs.id}.csv"
            with open(path / fname, "w", encoding="ascii", newline="\n") as fh:
                for row in fs.frames:
                    fh.write(format_row(row))
                    fh.write("\n")
            entries.append({"id": fs.id, "file": fname, "label": fs.label.value, "fps": fs.fps})
        manifest = {"participant": dataset.participant, "seed": dataset.seed, "frame_sets": entries}
        with open(path / MANIFEST, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write dataset to {path}: {exc.strerror or exc}") from exc


def read_frame_csv(file: Path):
    try:
        text = file.read_text(encoding="ascii")
    except FileNotFoundError:
        raise DatasetFormatError(f"{file}: frame-set file missing") from None
    except UnicodeDecodeError as exc:
        raise DatasetFormatError(f"{file}: not ASCII text ({exc})") from None
    rows = []
    for i, line in enumerate(text.splitlines()):
        parts = line.split(",")
        if len(parts) != N_FAST:
            raise DatasetFormatError(f"{file}: row {i} has {len(parts)} columns, expected {N_FAST}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise DatasetFormatError(f"{file}: row {i} contains a non-numeric value") from None
        if not all(map(math.isfinite, values)):
            col = next(j for j, v in enumerate(values) if not math.isfinite(v))
            raise DatasetFormatError(f"{file}: row {i}, column {col} is not finite")
        rows.append(values)
    if not rows:
        raise DatasetFormatError(f"{file}: no frames")
    return np.array(rows, dtype=float)


def read_dataset(path) -> Dataset:
    path = Path(path)
    mpath = path / MANIFEST
    if not path.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {path}")
    if not mpath.is_file():
        raise DatasetFormatError(f"{mpath}: manifest missing")
    try:
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"{mpath}: invalid JSON ({exc})") from None
    if not isinstance(manifest, dict) or not isinstance(manifest.get("frame_sets"), list):
        raise DatasetFormatError(f"{mpath}: expected an object with a 'frame_sets' array")

    sets = []
    for k, entry in enumerate(manifest["frame_sets"]):
        try:
            fid, fname, label, fps = entry["id"], entry["file"], entry["label"], entry["fps"]
        except (KeyError, TypeError):
            raise DatasetFormatError(f"{mpath}: entry {k} lacks id/file/label/fps") from None
        try:
            state = StateLabel.parse(label)
        except ValidationError as exc:
            raise DatasetFormatError(f"{mpath}: entry {k} ({fid!r}): {exc}") from None
        frames = read_frame_csv(path / fname)
        try:
            sets.append(FrameSet(frames, fps=fps, label=state, id=fid))
        except ValidationError as exc:
            raise DatasetFormatError(f"{path / fname}: {exc}") from None
    seed = manifest.get("seed")
    try:
        return Dataset(tuple(sets), participant=str(manifest.get("participant", "")), seed=seed)
    except ValidationError as exc:
        raise DatasetFormatError(f"{mpath}: {exc}") from None
