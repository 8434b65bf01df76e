"""Two-stage row filter over a dataset.

Stage 1 is column visibility grouped by datum type: pure presentation
state carried on the spec, it never changes which rows survive. Stage 2
is value predicates on columns. A record survives when its datum type
is included AND every predicate whose column exists in the record's
schema matches; predicates on columns a record's schema lacks are
vacuously true, so a cross-type predicate never silently drops a whole
datum type the user kept visible. Predicates combine with AND across
entries, oneOf is OR within its operand list.

Matching is on the canonical string form of each cell. equals/oneOf are
exact and case-sensitive (package names are case-significant ids);
contains is a case-insensitive substring for human search.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import _kernels
from .errors import BadValueError, UnknownColumnError
from .model import COL_DATUM_TYPE, LogDataset, record_value

MATCH_KINDS = ("equals", "oneOf", "contains")


@dataclass(frozen=True)
class Predicate:
    column: str
    match_kind: str  # equals | oneOf | contains
    operands: tuple[str, ...]

    def __post_init__(self):
        if self.match_kind not in MATCH_KINDS:
            raise ValueError(f"unknown matchKind {self.match_kind!r}")
        if not self.operands:
            raise ValueError("predicate needs at least one operand")

    def matches(self, value: str) -> bool:
        if self.match_kind == "equals":
            return value == self.operands[0]
        if self.match_kind == "oneOf":
            return value in self.operands
        return self.operands[0].lower() in value.lower()


@dataclass(frozen=True)
class FilterSpec:
    included_datum_types: frozenset[str]
    visible_columns: Mapping[str, frozenset[str]] = field(default_factory=dict)
    value_predicates: tuple[Predicate, ...] = ()

    def __post_init__(self):
        extra = set(self.visible_columns) - set(self.included_datum_types)
        if extra:
            raise ValueError(f"visibleColumns for excluded datum types: {sorted(extra)}")

    def to_json_obj(self) -> dict:
        return {
            "includedDatumTypes": sorted(self.included_datum_types),
            "visibleColumns": {
                dt: sorted(cols) for dt, cols in sorted(self.visible_columns.items())
            },
            "valuePredicates": [
                {"column": p.column, "matchKind": p.match_kind, "operands": list(p.operands)}
                for p in self.value_predicates
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj) -> "FilterSpec":
        if not isinstance(obj, dict):
            raise BadValueError("filter", "filter spec must be a JSON object")
        try:
            included = frozenset(obj["includedDatumTypes"])
        except (KeyError, TypeError):
            raise BadValueError("includedDatumTypes", "missing or not a list") from None
        visible = {
            dt: frozenset(cols) for dt, cols in (obj.get("visibleColumns") or {}).items()
        }
        preds = []
        for raw in obj.get("valuePredicates") or ():
            if not isinstance(raw, dict):
                raise BadValueError("valuePredicates", "entry is not an object")
            operands = raw.get("operands", raw.get("operand"))
            if isinstance(operands, str):
                operands = (operands,)
            try:
                preds.append(
                    Predicate(raw["column"], raw.get("matchKind", "equals"), tuple(operands or ()))
                )
            except (KeyError, TypeError, ValueError) as e:
                raise BadValueError("valuePredicates", str(e)) from None
        try:
            return cls(included, visible, tuple(preds))
        except ValueError as e:
            raise BadValueError("filter", str(e)) from None

    @classmethod
    def from_json(cls, text: str) -> "FilterSpec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise BadValueError("filter", f"not valid JSON: {e}") from None
        return cls.from_json_obj(obj)


@dataclass
class FilteredView:
    """Surviving row ids, in dataset order, plus the spec that made them."""

    row_ids: array  # array('q'), an ordered duplicate-free subset of 0..N-1
    spec: FilterSpec
    dataset_digest: str

    def __len__(self) -> int:
        return len(self.row_ids)

    def __iter__(self):
        return iter(self.row_ids)


def _included_schema_columns(dataset: LogDataset, included: Iterable[str]) -> set[str]:
    cols: set[str] = set()
    for dt in included:
        cols.update(c.name for c in dataset.schema_for(dt))
    return cols


def _cell(dataset: LogDataset, rec, column: str) -> str | None:
    """Schema-aware cell lookup: None means the predicate does not apply.

    An opaque-type record whose tag has the column observed elsewhere
    still carries the column (empty), matching how rows render.
    """
    v = record_value(rec, column)
    if v is None and column in dataset.observed_extras(rec.datum_type):
        return ""
    return v


def apply_filter(dataset: LogDataset, spec: FilterSpec) -> FilteredView:
    """Evaluate a spec; original record order is preserved.

    Predicates on columns carried in the columnar index run as code
    masks (a table lookup per row); anything else falls back to per-row
    evaluation on the rows still alive.
    """
    known = _included_schema_columns(dataset, spec.included_datum_types)
    for pred in spec.value_predicates:
        if pred.column not in known:
            raise UnknownColumnError(pred.column)

    dt_col = dataset.columns[COL_DATUM_TYPE]
    table = bytes(
        1 if tag in spec.included_datum_types else 0 for tag in dt_col.values
    )
    mask = _kernels.mask_from_codes(dt_col.codes, table, 0)

    slow_preds = []
    for pred in spec.value_predicates:
        col = dataset.columns.get(pred.column)
        if col is None:
            slow_preds.append(pred)
            continue
        # evaluate once per distinct value, then it is a table lookup
        pred_table = bytes(1 if pred.matches(v) else 0 for v in col.values)
        _kernels.and_mask(mask, _kernels.mask_from_codes(col.codes, pred_table, 1))

    if slow_preds:
        records = dataset.records
        for i, alive in enumerate(mask):
            if not alive:
                continue
            rec = records[i]
            for pred in slow_preds:
                v = _cell(dataset, rec, pred.column)
                if v is not None and not pred.matches(v):
                    mask[i] = 0
                    break

    return FilteredView(_kernels.selected_ids(mask), spec, dataset.source_digest)


def distinct_values(dataset: LogDataset, column: str, within: Iterable[str]) -> list[str]:
    """Sorted distinct stringified values of one column, restricted to
    the given datum types. Feeds the value-filter dropdown."""
    within = frozenset(within)
    if column not in _included_schema_columns(dataset, within):
        raise UnknownColumnError(column)

    dt_col = dataset.columns[COL_DATUM_TYPE]
    col = dataset.columns.get(column)
    if col is not None:
        gate_table = bytes(1 if tag in within else 0 for tag in dt_col.values)
        gate = _kernels.mask_from_codes(dt_col.codes, gate_table, 0)
        seen = _kernels.seen_codes(col.codes, gate, len(col.values))
        return sorted(v for v, s in zip(col.values, seen) if s)

    values = set()
    for rec in dataset.records:
        if rec.datum_type in within:
            v = _cell(dataset, rec, column)
            if v is not None:
                values.add(v)
    return sorted(values)
