"""Dataset CSV loading and the per-run manifest written next to outputs."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import DatasetError
from .model import Dataset, FeatureSchema, atomic_write_text, dump_json

__all__ = ["load_csv", "RunManifest", "manifest_path_for"]

LABEL_COLUMN = "label"


def load_csv(path: str | os.PathLike) -> Dataset:
    """Load a numeric CSV with a header row; a trailing "label" column (if
    present) becomes class indices in first-appearance order."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: missing header row") from None
        has_label = bool(header) and header[-1] == LABEL_COLUMN
        names = header[:-1] if has_label else header
        if not names:
            raise DatasetError(f"{path}: no feature columns")
        features = FeatureSchema.numeric(names)
        rows: list[list[float]] = []
        raw_labels: list[str] = []
        for rno, rec in enumerate(reader, start=1):
            if len(rec) != len(header):
                raise DatasetError(
                    f"{path}: row {rno} has {len(rec)} cells, expected {len(header)}"
                )
            parsed = []
            for c, cell in enumerate(rec[: len(names)]):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {rno}, column {names[c]!r}: cannot parse {cell!r}"
                    ) from None
            rows.append(parsed)
            if has_label:
                raw_labels.append(rec[-1])
    data = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(names))
    if not has_label:
        return Dataset(features=features, rows=data)
    vocab: dict[str, int] = {}
    for lab in raw_labels:
        if lab not in vocab:
            vocab[lab] = len(vocab)
    labels = np.asarray([vocab[lab] for lab in raw_labels], dtype=np.int64)
    return Dataset(
        features=features,
        rows=data,
        labels=labels,
        label_names=tuple(vocab) if vocab else None,
    )


def save_csv(d: Dataset, path: str | os.PathLike) -> None:
    """Inverse of load_csv (used for fixtures and report exports)."""
    lines = []
    header = list(d.features.names)
    if d.labels is not None:
        header.append(LABEL_COLUMN)
    lines.append(",".join(header))
    for i in range(len(d)):
        cells = [repr(float(v)) for v in d.rows[i]]
        if d.labels is not None:
            name = (
                d.label_names[d.labels[i]]
                if d.label_names is not None
                else str(int(d.labels[i]))
            )
            cells.append(name)
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """What ran, on which inputs, with which config, producing which outputs.

    The digest hashes input content hashes plus the config, so identical
    inputs and settings always produce the identical digest regardless of
    paths or timing.
    """

    command: str
    inputs: dict[str, dict] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    tool_version: str = __version__
    wall_time_s: float = 0.0

    @classmethod
    def start(cls, command: str, inputs: dict[str, str], config: dict) -> "RunManifest":
        m = cls(command=command, config=dict(config))
        m._t0 = time.perf_counter()
        for name, path in inputs.items():
            m.inputs[name] = {"path": os.fspath(path), "sha256": _sha256_file(path)}
        return m

    @property
    def config_digest(self) -> str:
        basis = {
            "command": self.command,
            "config": self.config,
            "inputs": {k: v["sha256"] for k, v in self.inputs.items()},
        }
        canon = json.dumps(basis, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def finish(self, outputs: list[str | os.PathLike]) -> None:
        self.outputs = [os.fspath(p) for p in outputs]
        self.wall_time_s = time.perf_counter() - getattr(self, "_t0", time.perf_counter())

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "tool_version": self.tool_version,
            "inputs": self.inputs,
            "config": self.config,
            "config_digest": self.config_digest,
            "outputs": self.outputs,
            "wall_time_s": self.wall_time_s,
        }

    def write(self, out_path: str | os.PathLike) -> str:
        path = manifest_path_for(out_path)
        atomic_write_text(path, dump_json(self.to_json()))
        return path


def manifest_path_for(out_path: str | os.PathLike) -> str:
    base, _ = os.path.splitext(os.fspath(out_path))
    return base + ".manifest.json"
