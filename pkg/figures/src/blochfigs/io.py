"""Readers for the dynamics CLI's file dialect.

Every number in a figure comes from a CSV or JSON file written by the
``blochdyn`` command line; nothing in this package recomputes dynamics.
Readers validate eagerly and name the offending file, so a batch of
figure jobs fails loudly instead of drawing from garbage.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np


class FigureInputError(Exception):
    """Missing, malformed, or structurally wrong input file."""


@dataclass(frozen=True)
class Table:
    """A parsed CSV: header plus rows of strings, column access by name."""

    path: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[str]:
        try:
            k = self.header.index(name)
        except ValueError:
            raise FigureInputError(
                f"{self.path}: no column {name!r} (have {list(self.header)})"
            ) from None
        return [row[k] for row in self.rows]

    def floats(self, name: str) -> np.ndarray:
        raw = self.column(name)
        try:
            return np.array([float(cell) for cell in raw])
        except ValueError as exc:
            raise FigureInputError(f"{self.path}: column {name!r} is not numeric: {exc}") from None


def load_table(path: str) -> Table:
    if not os.path.isfile(path):
        raise FigureInputError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureInputError(f"{path}: empty file") from None
        rows = [tuple(row) for row in reader]
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FigureInputError(f"{path}: row {i + 2} has {len(row)} fields, header has {width}")
    return Table(path=path, header=tuple(header), rows=tuple(rows))


def load_json(path: str) -> dict:
    if not os.path.isfile(path):
        raise FigureInputError(f"input file not found: {path}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FigureInputError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FigureInputError(f"{path}: expected a JSON object at top level")
    return doc


def model_block(doc: dict, path: str) -> tuple[str, dict]:
    """Pull (kind, params) out of a validate report or a run's metadata."""
    if "kind" in doc and "params" in doc:
        return str(doc["kind"]), dict(doc["params"])
    model = doc.get("config", {}).get("model")
    if isinstance(model, dict) and "kind" in model:
        return str(model["kind"]), dict(model.get("params", {}))
    raise FigureInputError(f"{path}: no model kind/params found")
