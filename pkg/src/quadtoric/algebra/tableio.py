"""Plain-text serialization of multiplication tables.

Format (``#`` starts a comment, blank lines ignored)::

    name: Q2
    n: 2
    lambda0: 6.283185307179586
    deg_T: 4
    kind: quadric
    basis:
      1 0
      h 2
      ...
    unit: 1
    constants:
      h h -> p : 2,0 @ 0/1
      h h -> 1 : 2,0 @ 1/1
    c1 h : 2,0 @ 0/1

Every ordered pair with a nonzero product is listed; scalars use the
``re,im @ num/den`` term syntax of :mod:`quadtoric.scalars`.
"""

from __future__ import annotations

import dataclasses
import warnings
from pathlib import Path

from ..scalars import ZERO, scalar_from_text, scalar_to_text
from .table import AlgebraTable, GradedBasis, validate_table


class TableParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class TableValidationWarning(UserWarning):
    pass


def table_to_text(t: AlgebraTable) -> str:
    b = t.basis
    lines = [
        f"name: {t.name}",
        f"n: {t.n}",
        f"lambda0: {t.lam0!r}",
        f"deg_T: {t.deg_T}",
        f"kind: {t.kind}",
        "basis:",
    ]
    lines += [f"  {lab} {deg}" for lab, deg in zip(b.labels, b.degrees)]
    lines.append(f"unit: {b.unit_label}")
    lines.append("constants:")
    for (i, j) in sorted(t.constants):
        for k, c in enumerate(t.constants[(i, j)]):
            if not c.is_zero():
                lines.append(f"  {b.labels[i]} {b.labels[j]} -> {b.labels[k]} : {scalar_to_text(c)}")
    for k, c in enumerate(t.c1):
        if not c.is_zero():
            lines.append(f"c1 {b.labels[k]} : {scalar_to_text(c)}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> AlgebraTable:
    header: dict[str, str] = {}
    header_line: dict[str, int] = {}
    labels: list[str] = []
    degrees: list[int] = []
    unit = None
    raw_consts: list[tuple[int, str, str, str, str]] = []
    raw_c1: list[tuple[int, str, str]] = []
    section = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("basis:", "constants:"):
            section = line[:-1]
            continue
        if line.startswith("c1 "):
            body = line[3:]
            if ":" not in body:
                raise TableParseError(lineno, "c1 line needs 'label : scalar'")
            lab, sc = body.split(":", 1)
            raw_c1.append((lineno, lab.strip(), sc))
            section = None
            continue
        if "->" in line:
            if section != "constants":
                raise TableParseError(lineno, "structure constant outside a constants block")
            try:
                lhs, rest = line.split("->", 1)
                tgt, sc = rest.split(":", 1)
                x, y = lhs.split()
            except ValueError:
                raise TableParseError(lineno, "expected 'i j -> k : scalar'") from None
            raw_consts.append((lineno, x, y, tgt.strip(), sc))
            continue
        if ":" in line:
            key, val = (s.strip() for s in line.split(":", 1))
            if key == "unit":
                unit = val
            elif key in ("name", "n", "lambda0", "deg_T", "kind"):
                header[key] = val
                header_line[key] = lineno
            else:
                raise TableParseError(lineno, f"unknown header key {key!r}")
            section = None
            continue
        if section == "basis":
            parts = line.split()
            if len(parts) != 2:
                raise TableParseError(lineno, "basis lines are 'label degree'")
            try:
                degrees.append(int(parts[1]))
            except ValueError:
                raise TableParseError(lineno, f"degree {parts[1]!r} is not an integer") from None
            labels.append(parts[0])
            continue
        raise TableParseError(lineno, f"cannot interpret {line!r}")

    for key in ("name", "n", "deg_T"):
        if key not in header:
            raise TableParseError(0, f"missing header {key!r}")
    if not labels:
        raise TableParseError(0, "empty basis")
    if unit is None:
        raise TableParseError(0, "missing unit")
    basis = GradedBasis(tuple(labels), tuple(degrees), unit)
    d = len(labels)

    def idx(lineno: int, lab: str) -> int:
        try:
            return labels.index(lab)
        except ValueError:
            raise TableParseError(lineno, f"unknown basis label {lab!r}") from None

    def scalar(lineno: int, s: str):
        try:
            return scalar_from_text(s)
        except ValueError as exc:
            raise TableParseError(lineno, str(exc)) from None

    consts: dict[tuple[int, int], list] = {}
    for lineno, x, y, k, sc in raw_consts:
        key = (idx(lineno, x), idx(lineno, y))
        vec = consts.setdefault(key, [ZERO] * d)
        kk = idx(lineno, k)
        vec[kk] = vec[kk] + scalar(lineno, sc)
    c1 = [ZERO] * d
    for lineno, lab, sc in raw_c1:
        k = idx(lineno, lab)
        c1[k] = c1[k] + scalar(lineno, sc)

    values = {}
    for key, conv in (("n", int), ("deg_T", int), ("lambda0", float)):
        if key in header:
            try:
                values[key] = conv(header[key])
            except ValueError:
                raise TableParseError(header_line[key], f"bad {key} value {header[key]!r}") from None
    n, deg_T = values["n"], values["deg_T"]
    lam0 = values.get("lambda0", 6.283185307179586)
    return AlgebraTable(
        name=header["name"],
        basis=basis,
        constants={k: tuple(v) for k, v in consts.items()},
        c1=tuple(c1),
        n=n,
        lam0=lam0,
        deg_T=deg_T,
        kind=header.get("kind", "generic"),
    )


def ingest_table(source) -> AlgebraTable:
    """Parse a table from a path or text and attach its validation report.

    Invariant failures do not abort ingestion; they are attached and issued
    as :class:`TableValidationWarning`.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source
    t = parse_table(text)
    rep = validate_table(t)
    for f in rep.failures:
        warnings.warn(
            f"table {t.name!r}: {f.invariant} fails at {f.witness} {f.detail}".rstrip(),
            TableValidationWarning,
            stacklevel=2,
        )
    return dataclasses.replace(t, validation=rep)


def write_table(t: AlgebraTable, path) -> None:
    Path(path).write_text(table_to_text(t))
