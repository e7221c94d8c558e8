"""Line-oriented dataset files.

    # rae-dataset v1
    # observable: XX
    # theta: -6.0575
    # noise: lambda=0.08 prep_half_layer=true coherent_epsilon=0.0
    # backend: simulator
    # seed: 0
    L shot_index outcome
    0 0 1
    0 1 -1
    ...
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..inference import OutcomeDataset
from ..noise import NoiseModel

MAGIC = "# rae-dataset v1"
COLUMNS = "L shot_index outcome"


@dataclass(frozen=True)
class DatasetFile:
    observable: str
    theta: float
    noise: NoiseModel
    backend: str
    seed: int
    data: OutcomeDataset

    def to_text(self) -> str:
        nm = self.noise
        lines = [
            MAGIC,
            f"# observable: {self.observable}",
            f"# theta: {self.theta!r}",
            f"# noise: lambda={nm.lam!r} prep_half_layer={str(nm.prep_half_layer).lower()} "
            f"coherent_epsilon={nm.coherent_epsilon!r}",
            f"# backend: {self.backend}",
            f"# seed: {self.seed}",
            COLUMNS,
        ]
        for l in self.data.layers:
            lines.extend(f"{l} {i} {int(o)}" for i, o in enumerate(self.data[l]))
        return "\n".join(lines) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> DatasetFile:
        lines = text.splitlines()
        if not lines or lines[0] != MAGIC:
            raise ValueError("not a dataset file (missing header)")
        meta = {}
        i = 1
        while i < len(lines) and lines[i].startswith("# "):
            key, _, value = lines[i][2:].partition(": ")
            meta[key] = value
            i += 1
        if i >= len(lines) or lines[i] != COLUMNS:
            raise ValueError(f"expected column header {COLUMNS!r}")
        missing = {"observable", "theta", "noise", "backend", "seed"} - set(meta)
        if missing:
            raise ValueError(f"dataset header lacks {sorted(missing)}")
        noise = dict(kv.split("=", 1) for kv in meta["noise"].split())
        model = NoiseModel(
            float(noise["lambda"]), noise["prep_half_layer"] == "true", float(noise["coherent_epsilon"])
        )
        body = lines[i + 1 :]
        rows = np.loadtxt(body, dtype=np.int64, ndmin=2) if body else np.zeros((0, 3), dtype=np.int64)
        grouped = {}
        for l in np.unique(rows[:, 0]):
            sel = rows[rows[:, 0] == l]
            if not np.array_equal(sel[:, 1], np.arange(len(sel))):
                raise ValueError(f"shot indices for L={l} are not 0..{len(sel) - 1} in order")
            grouped[int(l)] = sel[:, 2]
        return cls(meta["observable"], float(meta["theta"]), model, meta["backend"], int(meta["seed"]),
                   OutcomeDataset(grouped))

    @classmethod
    def read(cls, path: str) -> DatasetFile:
        with open(path) as fh:
            return cls.from_text(fh.read())
