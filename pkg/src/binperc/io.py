"""Text formats for instances and solutions.

Instance file: a header ``model m n kappa`` (kappa as the shortest round-trip
decimal), then m lines of n ``+``/``-`` characters, each ending in ``\\n``.
A solution file is a single such line.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvalidInput
from .model import Instance, ModelKind, spin_string, spins


def format_instance(instance: Instance) -> str:
    lines = [f"{instance.model.value} {instance.m} {instance.n} {instance.kappa!r}"]
    lut = np.array([ord("-"), 0, ord("+")], dtype=np.uint8)
    for row in instance.entries:
        lines.append(lut[row.astype(np.int64) + 1].tobytes().decode("ascii"))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    if not text.endswith("\n"):
        raise InvalidInput("instance file must end with a newline")
    lines = text[:-1].split("\n")
    head = lines[0].split(" ")
    if len(head) != 4:
        raise InvalidInput("header must be 'model m n kappa'")
    try:
        model = ModelKind.parse(head[0])
        m, n = int(head[1]), int(head[2])
        kappa = float(head[3])
    except ValueError as exc:
        raise InvalidInput(f"bad header: {exc}") from None
    rows = lines[1:]
    if len(rows) != m:
        raise DimensionMismatch(f"header says m = {m}, found {len(rows)} rows")
    G = np.empty((m, n), dtype=np.int8)
    for r, line in enumerate(rows):
        if len(line) != n:
            raise DimensionMismatch(f"row {r} has {len(line)} characters, expected {n}")
        try:
            G[r] = spins(line)
        except ValueError as exc:
            raise InvalidInput(f"row {r}: {exc}") from None
    return Instance(model, kappa, G, seed=0)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(format_instance(instance), encoding="ascii", newline="\n")


def load_instance(path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="ascii"))


def save_solution(x, path) -> None:
    Path(path).write_text(spin_string(x) + "\n", encoding="ascii", newline="\n")


def load_solution(path) -> np.ndarray:
    text = Path(path).read_text(encoding="ascii")
    line = text[:-1] if text.endswith("\n") else text
    if "\n" in line:
        raise InvalidInput("solution file must hold a single line")
    try:
        return spins(line)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
