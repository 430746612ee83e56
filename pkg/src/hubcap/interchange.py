"""Deterministic LP interchange writers (MPS and LP text).

The MPS writer emits fixed-format sections with 8-character names; by
default rows and columns get generated ids (``R0000001``, ``C0000001``)
so arbitrary model names cannot overflow the format, and the real names
are carried in comment lines.  ``verbatim_names=True`` writes model names
instead and raises :class:`NameLengthError` when one exceeds 8
characters.  The LP-text writer always uses the full model names.

Output is byte-stable: the same problem always serializes to
identical text, so exports can be diffed and cached.
"""

from __future__ import annotations

import math

import numpy as np

from .lp import LpProblem


class NameLengthError(ValueError):
    """A row/column name does not fit the fixed-format field."""


def _num(x: float) -> str:
    return np.format_float_scientific(x, precision=12, trim="-", exp_digits=2)


def export_interchange(lp: LpProblem, format: str, **kwargs) -> str:
    if format == "mps":
        return to_mps(lp, **kwargs)
    if format in ("lp", "lp_text"):
        return to_lp_text(lp)
    raise ValueError(f"unknown interchange format {format!r}; use 'mps' or 'lp_text'")


def to_mps(lp: LpProblem, name: str = "HUBCAP", verbatim_names: bool = False) -> str:
    """Fixed-format MPS text of the problem (minimization)."""
    if verbatim_names:
        rnames = list(lp.row_names)
        cnames = list(lp.col_names)
        for kind, names in (("row", rnames), ("column", cnames)):
            for n in names:
                if len(n) > 8:
                    raise NameLengthError(
                        f"{kind} name {n!r} exceeds 8 characters; use generated names")
    else:
        rnames = [f"R{i + 1:07d}" for i in range(lp.num_rows)]
        cnames = [f"C{j + 1:07d}" for j in range(lp.num_cols)]

    out: list[str] = []
    w = out.append
    w(f"NAME          {name}")
    if not verbatim_names:
        w("* generated name map: Rxxxxxxx/Cxxxxxxx -> model row/column names")
        for i, rn in enumerate(lp.row_names):
            w(f"* ROW {rnames[i]} {rn}")
        for j, cn in enumerate(lp.col_names):
            w(f"* COL {cnames[j]} {cn}")
    w("OBJSENSE")
    w("    MIN")
    w("ROWS")
    w(" N  COST")
    for i in range(lp.num_rows):
        kind = "E" if lp.sense[i] == "=" else "L"
        w(f" {kind}  {rnames[i]}")

    mat = lp.matrix().tocsc()
    w("COLUMNS")
    for j in range(lp.num_cols):
        entries: list[tuple[str, float]] = []
        if lp.c[j] != 0.0:
            entries.append(("COST", lp.c[j]))
        start, end = mat.indptr[j], mat.indptr[j + 1]
        order = np.argsort(mat.indices[start:end], kind="stable")
        for k in order:
            entries.append((rnames[mat.indices[start + k]], mat.data[start + k]))
        for rname, val in entries:
            w(f"    {cnames[j]:<8}  {rname:<8}  {_num(val)}")

    w("RHS")
    for i in range(lp.num_rows):
        if lp.rhs[i] != 0.0:
            w(f"    RHS       {rnames[i]:<8}  {_num(lp.rhs[i])}")

    w("BOUNDS")
    for j in range(lp.num_cols):
        lo, up = lp.lower[j], lp.upper[j]
        if lo == 0.0 and math.isinf(up):
            continue
        if lo == up:
            w(f" FX BND       {cnames[j]:<8}  {_num(lo)}")
            continue
        if math.isinf(lo) and math.isinf(up):
            w(f" FR BND       {cnames[j]:<8}")
            continue
        if math.isinf(lo):
            w(f" MI BND       {cnames[j]:<8}")
        elif lo != 0.0:
            w(f" LO BND       {cnames[j]:<8}  {_num(lo)}")
        if not math.isinf(up):
            w(f" UP BND       {cnames[j]:<8}  {_num(up)}")
    w("ENDATA")
    w("")
    return "\n".join(out)


def to_lp_text(lp: LpProblem) -> str:
    """CPLEX-style LP text with full model names."""
    out: list[str] = []
    w = out.append
    w("\\ hubcap LP export")
    w("Minimize")
    terms = [f"{_sign(c)} {_num(abs(c))} {n}"
             for c, n in zip(lp.c, lp.col_names) if c != 0.0]
    w(" obj: " + (" ".join(terms) if terms else "0 " + lp.col_names[0]))
    w("Subject To")
    mat = lp.matrix()
    for i in range(lp.num_rows):
        start, end = mat.indptr[i], mat.indptr[i + 1]
        cols = mat.indices[start:end]
        vals = mat.data[start:end]
        order = np.argsort(cols, kind="stable")
        body = " ".join(f"{_sign(vals[k])} {_num(abs(vals[k]))} {lp.col_names[cols[k]]}"
                        for k in order)
        op = "=" if lp.sense[i] == "=" else "<="
        w(f" {lp.row_names[i]}: {body} {op} {_num(lp.rhs[i])}")
    w("Bounds")
    for j in range(lp.num_cols):
        lo, up = lp.lower[j], lp.upper[j]
        name = lp.col_names[j]
        if lo == 0.0 and math.isinf(up):
            continue
        if lo == up:
            w(f" {name} = {_num(lo)}")
        elif math.isinf(lo) and math.isinf(up):
            w(f" {name} free")
        elif math.isinf(up):
            w(f" {name} >= {_num(lo)}")
        elif math.isinf(lo):
            w(f" {name} <= {_num(up)}")
        else:
            w(f" {_num(lo)} <= {name} <= {_num(up)}")
    w("End")
    w("")
    return "\n".join(out)


def _sign(x: float) -> str:
    return "-" if x < 0 else "+"
