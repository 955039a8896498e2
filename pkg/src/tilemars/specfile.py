"""JSON problem files.

Schema::

    {
      "name": "sw",
      "dim": 2,
      "iterators": ["i", "j"],                 # optional
      "dependences": [[1, 0], [0, 1], [1, 1]],
      "hyperplanes": [{"normal": [1, 1], "tile_size": 4}, ...],
      "domain": "infinite" | {"lower": [0, 0], "upper": [100, 100]}
    }
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import SpecError, SpecParseError
from .model import DomainBox, Hyperplane, ProblemSpec


def _int_list(value: Any, field: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SpecParseError(field, f"expected a list of integers, got {value!r}")
    return value


def _require(data: dict, key: str) -> Any:
    if key not in data:
        raise SpecParseError(key, "missing field")
    return data[key]


def parse_spec(data: Any) -> ProblemSpec:
    if not isinstance(data, dict):
        raise SpecParseError("<root>", "expected a JSON object")
    name = _require(data, "name")
    if not isinstance(name, str):
        raise SpecParseError("name", "expected a string")
    dim = _require(data, "dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecParseError("dim", f"expected a positive integer, got {dim!r}")

    deps_raw = _require(data, "dependences")
    if not isinstance(deps_raw, list) or not deps_raw:
        raise SpecParseError("dependences", "expected a non-empty list of vectors")
    deps = []
    for j, b in enumerate(deps_raw):
        field = f"dependences[{j}]"
        b = _int_list(b, field)
        if len(b) != dim:
            raise SpecParseError(field, f"expected length {dim}, got {len(b)}")
        if not any(b):
            raise SpecParseError(field, "dependence vector must be non-zero")
        deps.append(tuple(b))

    hyps_raw = _require(data, "hyperplanes")
    if not isinstance(hyps_raw, list) or not hyps_raw:
        raise SpecParseError("hyperplanes", "expected a non-empty list")
    hyps = []
    for k, h in enumerate(hyps_raw):
        field = f"hyperplanes[{k}]"
        if not isinstance(h, dict):
            raise SpecParseError(field, "expected an object with 'normal' and 'tile_size'")
        if "normal" not in h:
            raise SpecParseError(field + ".normal", "missing field")
        if "tile_size" not in h:
            raise SpecParseError(field + ".tile_size", "missing field")
        normal = _int_list(h["normal"], field + ".normal")
        if len(normal) != dim:
            raise SpecParseError(field + ".normal", f"expected length {dim}, got {len(normal)}")
        size = h["tile_size"]
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise SpecParseError(field + ".tile_size", f"expected a positive integer, got {size!r}")
        try:
            hyps.append(Hyperplane(tuple(normal), size))
        except SpecError as exc:
            raise SpecParseError(field, str(exc)) from None

    dom_raw = data.get("domain", "infinite")
    domain = None
    if dom_raw != "infinite":
        if not isinstance(dom_raw, dict):
            raise SpecParseError("domain", "expected \"infinite\" or an object with lower/upper")
        lower = _int_list(_require_sub(dom_raw, "domain", "lower"), "domain.lower")
        upper = _int_list(_require_sub(dom_raw, "domain", "upper"), "domain.upper")
        if len(lower) != dim or len(upper) != dim:
            raise SpecParseError("domain", f"bounds must have length {dim}")
        try:
            domain = DomainBox(tuple(lower), tuple(upper))
        except SpecError as exc:
            raise SpecParseError("domain", str(exc)) from None

    iterators = data.get("iterators")
    if iterators is not None:
        if not isinstance(iterators, list) or not all(isinstance(v, str) for v in iterators):
            raise SpecParseError("iterators", "expected a list of names")
        if len(iterators) != dim or len(set(iterators)) != dim:
            raise SpecParseError("iterators", f"expected {dim} distinct names")
        iterators = tuple(iterators)

    return ProblemSpec(name, dim, tuple(deps), tuple(hyps), domain, iterators)


def _require_sub(obj: dict, parent: str, key: str):
    if key not in obj:
        raise SpecParseError(f"{parent}.{key}", "missing field")
    return obj[key]


def spec_to_dict(spec: ProblemSpec) -> dict:
    data: dict[str, Any] = {"name": spec.name, "dim": spec.dim}
    if spec.iterators is not None:
        data["iterators"] = list(spec.iterators)
    data["dependences"] = [list(b) for b in spec.dependences]
    data["hyperplanes"] = [{"normal": list(h.normal), "tile_size": h.tile_size} for h in spec.hyperplanes]
    if spec.domain is None:
        data["domain"] = "infinite"
    else:
        data["domain"] = {"lower": list(spec.domain.lower), "upper": list(spec.domain.upper)}
    return data


def dumps_spec(spec: ProblemSpec) -> str:
    """Serialise with one vector per line."""
    d = spec_to_dict(spec)
    lines = ["{", f'  "name": {json.dumps(d["name"])},', f'  "dim": {d["dim"]},']
    if "iterators" in d:
        lines.append(f'  "iterators": {json.dumps(d["iterators"])},')
    deps = ", ".join(json.dumps(b) for b in d["dependences"])
    lines.append(f'  "dependences": [{deps}],')
    lines.append('  "hyperplanes": [')
    hyps = [f"    {json.dumps(h)}" for h in d["hyperplanes"]]
    lines.append(",\n".join(hyps))
    lines.append("  ],")
    lines.append(f'  "domain": {json.dumps(d["domain"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_spec(text: str) -> ProblemSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError("<json>", str(exc)) from None
    return parse_spec(data)


def load_spec(path: str | Path) -> ProblemSpec:
    return loads_spec(Path(path).read_text())
