"""Reading and writing the JSON algebra file format.

    {"size": 2,
     "elements": ["bot", "top"],          # optional, metadata only
     "ops": [{"name": "meet", "arity": 2, "table": [0, 0, 0, 1]}]}

``table`` is flat and row-major with the first argument most significant.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .algebra import FiniteAlgebra, Signature
from .errors import AlgebraError


class AlgebraFormatError(AlgebraError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


def algebra_from_dict(data: Any, source: str | None = None) -> FiniteAlgebra:
    if not isinstance(data, dict):
        raise AlgebraFormatError("top level must be an object", source=source)
    for key in ("size", "ops"):
        if key not in data:
            raise AlgebraFormatError(f"missing field {key!r}", source=source)
    size = data["size"]
    if not isinstance(size, int) or isinstance(size, bool) or size < 1:
        raise AlgebraFormatError(f"'size' must be a positive integer, got {size!r}", source=source)
    ops = data["ops"]
    if not isinstance(ops, list) or not ops:
        raise AlgebraFormatError("'ops' must be a nonempty list", source=source)
    symbols, tables = [], []
    for i, op in enumerate(ops):
        if not isinstance(op, dict) or not {"name", "arity", "table"} <= op.keys():
            raise AlgebraFormatError(f"ops[{i}] needs 'name', 'arity' and 'table'", source=source)
        table = op["table"]
        if not isinstance(table, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in table):
            raise AlgebraFormatError(f"ops[{i}].table must be a list of integers", source=source)
        symbols.append((op["name"], op["arity"]))
        tables.append(table)
    try:
        return FiniteAlgebra(size, Signature.of(*symbols), tables)
    except AlgebraFormatError:
        raise
    except AlgebraError as exc:
        raise AlgebraFormatError(str(exc), source=source) from exc


def algebra_to_dict(algebra: FiniteAlgebra, elements: list[str] | None = None) -> dict:
    out: dict[str, Any] = {"size": algebra.size}
    if elements is not None:
        out["elements"] = list(elements)
    out["ops"] = [
        {"name": name, "arity": arity, "table": table.tolist()}
        for (name, arity), table in zip(algebra.signature.symbols, algebra.tables)
    ]
    return out


def dumps_algebra(algebra: FiniteAlgebra, elements: list[str] | None = None) -> str:
    """Serialize deterministically: one op per line, tables on a single line."""
    d = algebra_to_dict(algebra, elements)
    lines = ["{", f'  "size": {d["size"]},']
    if "elements" in d:
        lines.append(f'  "elements": {json.dumps(d["elements"])},')
    lines.append('  "ops": [')
    for i, op in enumerate(d["ops"]):
        comma = "," if i + 1 < len(d["ops"]) else ""
        lines.append(
            f'    {{"name": {json.dumps(op["name"])}, "arity": {op["arity"]}, '
            f'"table": {json.dumps(op["table"])}}}{comma}'
        )
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def loads_algebra(text: str, source: str | None = None) -> FiniteAlgebra:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFormatError(exc.msg, line=exc.lineno, source=source) from exc
    return algebra_from_dict(data, source=source)


def load_algebra(path: str | Path) -> FiniteAlgebra:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise AlgebraFormatError(f"cannot read file: {exc.strerror}", source=str(path)) from exc
    return loads_algebra(text, source=str(path))


def save_algebra(algebra: FiniteAlgebra, path: str | Path, elements: list[str] | None = None) -> None:
    Path(path).write_text(dumps_algebra(algebra, elements))
