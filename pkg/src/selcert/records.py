"""Prediction records, dataset files, temporal splits and synthetic scores.

A dataset is an ordered collection of (id, score, label) rows, optionally
dated and grouped, read from CSV or JSON. Loading is all-or-nothing: one bad
row rejects the whole file with an error naming the row and column.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import (
    DatasetIOError,
    DomainError,
    DuplicateIdError,
    MissingDateError,
    SchemaError,
)

_BASE_COLUMNS = ("id", "score", "label")
_OPTIONAL_COLUMNS = ("date", "group")


@dataclass(frozen=True)
class PredictionRecord:
    """One scored example: classifier score for class 1 plus the true label."""

    id: str
    score: float
    label: int
    date: date | None = None
    group: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise SchemaError(f"record id must be a nonempty string, got {self.id!r}")
        if isinstance(self.score, bool) or not isinstance(self.score, (int, float)):
            raise SchemaError(f"score must be a number, got {self.score!r}")
        object.__setattr__(self, "score", float(self.score))
        if not (0.0 <= self.score <= 1.0):
            raise SchemaError(f"score must be within [0, 1], got {self.score!r}")
        if isinstance(self.label, bool) or not isinstance(self.label, int):
            raise SchemaError(f"label must be an integer, got {self.label!r}")
        if self.label not in (0, 1):
            raise SchemaError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class Dataset:
    """Ordered records plus a provenance note. Ids are unique."""

    records: tuple[PredictionRecord, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[str] = set()
        for rec in self.records:
            if rec.id in seen:
                raise DuplicateIdError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PredictionRecord]:
        return iter(self.records)

    def ids(self) -> list[str]:
        return [rec.id for rec in self.records]

    def scores(self) -> np.ndarray:
        return np.array([rec.score for rec in self.records], dtype=float)

    def labels(self) -> np.ndarray:
        return np.array([rec.label for rec in self.records], dtype=int)

    def by_id(self) -> dict[str, PredictionRecord]:
        return {rec.id: rec for rec in self.records}


@dataclass(frozen=True)
class SplitSpec:
    """Date boundary for a temporal split: train strictly before, test on or after."""

    split_date: date


@dataclass(frozen=True)
class SyntheticScorerSpec:
    """Parameters of the synthetic binary scorer.

    Labels are i.i.d. Bernoulli(prevalence); scores are Beta(pos_shape) for
    positives and Beta(neg_shape) for negatives. Output is a pure function of
    this spec, including the seed.
    """

    n: int
    prevalence: float
    pos_shape: tuple[float, float]
    neg_shape: tuple[float, float]
    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not (0.0 < self.prevalence < 1.0):
            raise DomainError(f"prevalence must be in (0, 1), got {self.prevalence!r}")
        for name in ("pos_shape", "neg_shape"):
            pair = tuple(getattr(self, name))
            if len(pair) != 2 or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in pair
            ):
                raise DomainError(f"{name} must be a pair of positive numbers, got {pair!r}")
            object.__setattr__(self, name, (float(pair[0]), float(pair[1])))
        if not isinstance(self.seed, int):
            raise DomainError(f"seed must be an integer, got {self.seed!r}")


def _infer_format(path: str | Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise DomainError(f"format must be 'csv' or 'json', got {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".json":
        return "json"
    raise DomainError(f"cannot infer format of {path!r}; pass format='csv' or 'json'")


def _parse_date(text: str, date_format: str | None, row: int) -> date:
    try:
        if date_format is None:
            return date.fromisoformat(text)
        return datetime.strptime(text, date_format).date()
    except ValueError as exc:
        raise SchemaError(f"bad date {text!r}: {exc}", row=row, column="date") from None


def _parse_score(value: str, row: int) -> float:
    try:
        score = float(value)
    except ValueError:
        raise SchemaError(f"score is not a number: {value!r}", row=row, column="score") from None
    if not (0.0 <= score <= 1.0):
        raise SchemaError(f"score out of range [0, 1]: {value!r}", row=row, column="score")
    return score


def _parse_label(value: str, row: int) -> int:
    if value not in ("0", "1"):
        raise SchemaError(f"label must be 0 or 1: {value!r}", row=row, column="label")
    return int(value)


def load_dataset(
    path: str | Path,
    fmt: str | None = None,
    date_format: str | None = None,
) -> Dataset:
    """Load a dataset from CSV or JSON, rejecting the whole file on any bad row.

    CSV needs the exact header id,score,label with optional trailing date
    and/or group columns. JSON is an array of objects sharing one key set.
    `date_format` is a strptime pattern; default is ISO-8601.
    """
    fmt = _infer_format(path, fmt)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetIOError(f"cannot read {path}: {exc}") from exc
    if fmt == "csv":
        records = _records_from_csv(text, date_format)
    else:
        records = _records_from_json(text, date_format)
    return Dataset(records=tuple(records), provenance=str(path))


def _records_from_csv(text: str, date_format: str | None) -> list[PredictionRecord]:
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise SchemaError("empty file: missing header")
    header = rows[0]
    allowed = [
        list(_BASE_COLUMNS),
        list(_BASE_COLUMNS) + ["date"],
        list(_BASE_COLUMNS) + ["group"],
        list(_BASE_COLUMNS) + ["date", "group"],
    ]
    if header not in allowed:
        raise SchemaError(
            "header must be id,score,label with optional date and/or group columns, "
            f"got {','.join(header)!r}"
        )
    records: list[PredictionRecord] = []
    seen: set[str] = set()
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise SchemaError(
                f"expected {len(header)} fields, got {len(row)}", row=i, column=None
            )
        cell = dict(zip(header, row))
        rec_id = cell["id"]
        if not rec_id:
            raise SchemaError("id must be nonempty", row=i, column="id")
        if rec_id in seen:
            raise DuplicateIdError(f"duplicate record id {rec_id!r} at row {i}")
        seen.add(rec_id)
        score = _parse_score(cell["score"], i)
        label = _parse_label(cell["label"], i)
        rec_date = None
        if "date" in cell and cell["date"] != "":
            rec_date = _parse_date(cell["date"], date_format, i)
        group = cell.get("group") or None
        records.append(PredictionRecord(rec_id, score, label, rec_date, group))
    return records


def _records_from_json(text: str, date_format: str | None) -> list[PredictionRecord]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise SchemaError("top level must be an array of record objects")
    records: list[PredictionRecord] = []
    seen: set[str] = set()
    key_set: set[str] | None = None
    for i, obj in enumerate(data, start=1):
        if not isinstance(obj, dict):
            raise SchemaError("record must be an object", row=i)
        keys = set(obj)
        if not keys >= set(_BASE_COLUMNS):
            missing = sorted(set(_BASE_COLUMNS) - keys)
            raise SchemaError(f"missing required key(s) {missing}", row=i)
        extra = keys - set(_BASE_COLUMNS) - set(_OPTIONAL_COLUMNS)
        if extra:
            raise SchemaError(f"unknown key(s) {sorted(extra)}", row=i)
        if key_set is None:
            key_set = keys
        elif keys != key_set:
            raise SchemaError(
                f"records must share one key set; expected {sorted(key_set)}", row=i
            )
        rec_id = obj["id"]
        if not isinstance(rec_id, str) or not rec_id:
            raise SchemaError(f"id must be a nonempty string: {rec_id!r}", row=i, column="id")
        if rec_id in seen:
            raise DuplicateIdError(f"duplicate record id {rec_id!r} at row {i}")
        seen.add(rec_id)
        score = obj["score"]
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise SchemaError(f"score must be a number: {score!r}", row=i, column="score")
        if not (0.0 <= float(score) <= 1.0):
            raise SchemaError(f"score out of range [0, 1]: {score!r}", row=i, column="score")
        label = obj["label"]
        if isinstance(label, bool) or not isinstance(label, int) or label not in (0, 1):
            raise SchemaError(f"label must be 0 or 1: {label!r}", row=i, column="label")
        rec_date = None
        raw_date = obj.get("date")
        if raw_date is not None:
            if not isinstance(raw_date, str):
                raise SchemaError(f"date must be a string: {raw_date!r}", row=i, column="date")
            rec_date = _parse_date(raw_date, date_format, i)
        group = obj.get("group")
        if group is not None and not isinstance(group, str):
            raise SchemaError(f"group must be a string: {group!r}", row=i, column="group")
        records.append(PredictionRecord(rec_id, float(score), label, rec_date, group or None))
    return records


def write_dataset(data: Dataset, path: str | Path, fmt: str | None = None) -> None:
    """Write a dataset so that loading it back reproduces every record exactly.

    Scores are written in shortest exact form (repr), dates in ISO-8601.
    Optional columns appear only when some record carries them.
    """
    fmt = _infer_format(path, fmt)
    has_date = any(rec.date is not None for rec in data)
    has_group = any(rec.group is not None for rec in data)
    columns = list(_BASE_COLUMNS)
    if has_date:
        columns.append("date")
    if has_group:
        columns.append("group")
    try:
        if fmt == "csv":
            _write_csv(data, path, columns)
        else:
            _write_json(data, path, columns)
    except OSError as exc:
        raise DatasetIOError(f"cannot write {path}: {exc}") from exc


def _write_csv(data: Dataset, path: str | Path, columns: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for rec in data:
            row: list[str] = [rec.id, repr(rec.score), str(rec.label)]
            if "date" in columns:
                row.append(rec.date.isoformat() if rec.date is not None else "")
            if "group" in columns:
                row.append(rec.group if rec.group is not None else "")
            writer.writerow(row)


def _write_json(data: Dataset, path: str | Path, columns: list[str]) -> None:
    objs = []
    for rec in data:
        obj: dict[str, object] = {"id": rec.id, "score": rec.score, "label": rec.label}
        if "date" in columns:
            obj["date"] = rec.date.isoformat() if rec.date is not None else None
        if "group" in columns:
            obj["group"] = rec.group
        objs.append(obj)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(objs, handle, indent=2)
        handle.write("\n")


def temporal_split(data: Dataset, split: SplitSpec) -> tuple[Dataset, Dataset]:
    """Split by record date: strictly before the boundary is train, the rest test."""
    undated = [rec.id for rec in data if rec.date is None]
    if undated:
        raise MissingDateError(undated)
    train = tuple(rec for rec in data if rec.date < split.split_date)
    test = tuple(rec for rec in data if rec.date >= split.split_date)
    boundary = split.split_date.isoformat()
    return (
        Dataset(train, provenance=f"{data.provenance} [before {boundary}]"),
        Dataset(test, provenance=f"{data.provenance} [on or after {boundary}]"),
    )


def generate_synthetic(spec: SyntheticScorerSpec) -> Dataset:
    """Draw a synthetic dataset; a pure function of the spec including its seed."""
    rng = np.random.default_rng(spec.seed & ((1 << 64) - 1))
    labels = (rng.random(spec.n) < spec.prevalence).astype(int)
    scores = np.empty(spec.n, dtype=float)
    n_pos = int(labels.sum())
    scores[labels == 1] = rng.beta(spec.pos_shape[0], spec.pos_shape[1], n_pos)
    scores[labels == 0] = rng.beta(spec.neg_shape[0], spec.neg_shape[1], spec.n - n_pos)
    records = tuple(
        PredictionRecord(id=f"syn-{i}", score=float(scores[i]), label=int(labels[i]))
        for i in range(spec.n)
    )
    return Dataset(records, provenance=f"synthetic(seed={spec.seed})")
