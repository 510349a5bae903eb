"""Classification value validation against a form descriptor.

The validation contract, spelled out so an independent implementation can
reproduce it exactly:

* ``values`` maps category element id -> list of raw values; a non-list
  entry is one E_BAD_TYPE violation for that category and its values are
  not inspected further.
* Keys that are not fields of the form: E_ELEMENT_INACTIVE when the id is
  in ``inactive``, else E_NOT_FOUND.
* Per value, in order: type check first (E_BAD_TYPE; bool is not an int,
  dates are ISO ``YYYY-MM-DD`` strings). Typed values are then checked
  against max_length, pattern (full match), and range (inclusive), each an
  E_CONSTRAINT naming the rule. Select values must equal one of the
  field's options (E_CONSTRAINT, rule "choice"); only values that pass
  the choice test are checked against the dependency subset: the allowed
  set is the union of the wiring map over the parent's chosen values
  (absent parent choices contribute nothing), E_DEP_VIOLATION otherwise.
* Per field afterwards: value count above a non-zero multiplicity is one
  E_MULTIPLICITY; a mandatory field with no values is one
  E_MANDATORY_MISSING, only when ``mark_complete``.

Violation order: the shape/key violations in input order, then fields in
form pre-order with per-value violations before the per-field ones.
"""

from __future__ import annotations

import datetime
import re

from ..install.forms import FormDescriptor, FormField
from .errors import (
    E_BAD_TYPE,
    E_CONSTRAINT,
    E_DEP_VIOLATION,
    E_ELEMENT_INACTIVE,
    E_MANDATORY_MISSING,
    E_MULTIPLICITY,
    E_NOT_FOUND,
)


def _v(element: str | None, code: str, rule: str, message: str) -> dict:
    return {"element": element, "code": code, "rule": rule, "message": message}


def _check_simple(field: FormField, value, out: list[dict]):
    vt = field.constraints["value_type"]
    name = field.name
    if vt == "text":
        if not isinstance(value, str):
            out.append(_v(field.element, E_BAD_TYPE, "type", f"{name}: expected text"))
            return
        max_length = field.constraints.get("max_length")
        if max_length is not None and len(value) > max_length:
            out.append(
                _v(
                    field.element,
                    E_CONSTRAINT,
                    "max_length",
                    f"{name}: at most {max_length} characters",
                )
            )
        pattern = field.constraints.get("pattern")
        if pattern is not None:
            if re.fullmatch(pattern, value) is None:
                out.append(
                    _v(field.element, E_CONSTRAINT, "pattern", f"{name}: pattern mismatch")
                )
    elif vt == "bool":
        if not isinstance(value, bool):
            out.append(_v(field.element, E_BAD_TYPE, "type", f"{name}: expected boolean"))
    elif vt == "date":
        ok = isinstance(value, str)
        if ok:
            try:
                datetime.date.fromisoformat(value)
            except ValueError:
                ok = False
        if not ok:
            out.append(
                _v(field.element, E_BAD_TYPE, "type", f"{name}: expected ISO date")
            )
    else:  # int | real
        if vt == "int":
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if not ok:
            out.append(_v(field.element, E_BAD_TYPE, "type", f"{name}: expected {vt}"))
            return
        rng = field.constraints.get("range")
        if rng is not None and not rng[0] <= value <= rng[1]:
            out.append(
                _v(
                    field.element,
                    E_CONSTRAINT,
                    "range",
                    f"{name}: must lie in [{rng[0]}, {rng[1]}]",
                )
            )


def _check_choice(field: FormField, value, values: dict, out: list[dict]):
    name = field.name
    if not isinstance(value, str):
        out.append(_v(field.element, E_BAD_TYPE, "type", f"{name}: expected a choice"))
        return
    allowed = {opt["value"] for opt in field.options or []}
    if value not in allowed:
        out.append(
            _v(field.element, E_CONSTRAINT, "choice", f"{name}: {value!r} is not an option")
        )
        return
    if field.depends_on is not None:
        parent_vals = values.get(field.depends_on["parent"], [])
        if not isinstance(parent_vals, list):
            parent_vals = []
        mapping = field.depends_on["mapping"]
        reachable: set[str] = set()
        for pv in parent_vals:
            if isinstance(pv, str):
                reachable.update(mapping.get(pv, []))
        if value not in reachable:
            out.append(
                _v(
                    field.element,
                    E_DEP_VIOLATION,
                    "dependency",
                    f"{name}: {value!r} not allowed for the chosen parent value",
                )
            )


def validate_values(
    form: FormDescriptor,
    values: dict,
    mark_complete: bool,
    inactive: frozenset[str] | set[str] = frozenset(),
) -> list[dict]:
    out: list[dict] = []
    if not isinstance(values, dict):
        return [_v(None, E_BAD_TYPE, "shape", "values must map category ids to lists")]
    fields = form.by_element()
    for key in values:
        if key in fields:
            continue
        if key in inactive:
            out.append(
                _v(key, E_ELEMENT_INACTIVE, "inactive", f"{key} is deactivated")
            )
        else:
            out.append(_v(key, E_NOT_FOUND, "unknown", f"{key} is not a category"))
    for field in form.walk():
        vals = values.get(field.element, [])
        if not isinstance(vals, list):
            out.append(
                _v(field.element, E_BAD_TYPE, "shape", f"{field.name}: expected a list")
            )
            continue
        for value in vals:
            if field.options is not None:
                _check_choice(field, value, values, out)
            else:
                _check_simple(field, value, out)
        if field.multiplicity != 0 and len(vals) > field.multiplicity:
            out.append(
                _v(
                    field.element,
                    E_MULTIPLICITY,
                    "multiplicity",
                    f"{field.name}: at most {field.multiplicity} values",
                )
            )
        if mark_complete and field.mandatory and not vals:
            out.append(
                _v(
                    field.element,
                    E_MANDATORY_MISSING,
                    "mandatory",
                    f"{field.name}: a value is required",
                )
            )
    return out


def value_refs(form: FormDescriptor, values: dict) -> list[str]:
    """Element ids a stored classification references: every category with
    at least one value, plus the choice elements behind select values."""
    refs: list[str] = []
    for field in form.walk():
        vals = values.get(field.element)
        if not isinstance(vals, list) or not vals:
            continue
        refs.append(field.element)
        if field.options is not None:
            by_value = {opt["value"]: opt["id"] for opt in field.options}
            for v in vals:
                if isinstance(v, str) and v in by_value:
                    refs.append(by_value[v])
    return refs
