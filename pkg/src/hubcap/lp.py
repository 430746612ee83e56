"""Sparse LP container with row/column provenance.

Problems are minimizations over bounded variables:

    min c'x   s.t.  A x (sense) b,   lower <= x <= upper

with row senses ``=`` and ``<``.  Duplicate matrix entries are summed when
the builder assembles the problem; the assembled :class:`LpProblem` is
immutable by convention and safe to share across threads.

Column and row names follow the stable scheme
``<entity>.<role>[.<commodity>][.<t>]`` (e.g. ``meth_dz.q_hydrogen_dz.42``,
``elec_be.balance.7``, ``solar_be.cap``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class VarKey:
    """Identity of one LP column: entity, role, and optional commodity/step.

    Roles: ``cap`` (new conversion capacity), ``stock_cap``/``flow_cap``
    (storage sizing), ``flow`` (conversion port flow), ``charge``/
    ``discharge`` (storage main flows), ``aux`` (storage side flows),
    ``stock`` (inventory), ``ens`` (unserved demand slack).
    """

    entity: str
    role: str
    commodity: str | None = None
    t: int | None = None

    def name(self) -> str:
        parts = [self.entity]
        if self.role in ("flow", "aux"):
            parts.append(f"q_{self.commodity}")
        else:
            parts.append(self.role)
        if self.t is not None:
            parts.append(str(self.t))
        return ".".join(parts)


class VariableMap:
    """Total bijection between LP columns and model entities."""

    def __init__(self) -> None:
        self.keys: list[VarKey] = []
        self._index: dict[VarKey, int] = {}

    def add(self, key: VarKey) -> int:
        if key in self._index:
            raise ValueError(f"duplicate variable {key}")
        j = len(self.keys)
        self.keys.append(key)
        self._index[key] = j
        return j

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self) -> Iterator[VarKey]:
        return iter(self.keys)

    def index(self, key: VarKey) -> int:
        return self._index[key]

    def key(self, j: int) -> VarKey:
        return self.keys[j]

    def capacity(self, node: str) -> int:
        return self._index[VarKey(node, "cap")]

    def stock_capacity(self, node: str) -> int:
        return self._index[VarKey(node, "stock_cap")]

    def flow_capacity(self, node: str) -> int:
        return self._index[VarKey(node, "flow_cap")]

    def flow(self, node: str, commodity: str, t: int) -> int:
        return self._index[VarKey(node, "flow", commodity, t)]

    def flows(self, node: str, commodity: str, steps: int) -> np.ndarray:
        return np.array([self.flow(node, commodity, t) for t in range(steps)])

    def charge(self, node: str, commodity: str, t: int) -> int:
        return self._index[VarKey(node, "charge", commodity, t)]

    def discharge(self, node: str, commodity: str, t: int) -> int:
        return self._index[VarKey(node, "discharge", commodity, t)]

    def aux(self, node: str, commodity: str, t: int) -> int:
        return self._index[VarKey(node, "aux", commodity, t)]

    def stock(self, node: str, t: int) -> int:
        return self._index[VarKey(node, "stock", None, t)]

    def stocks(self, node: str, steps: int) -> np.ndarray:
        return np.array([self.stock(node, t) for t in range(steps)])

    def ens(self, edge: str, t: int) -> int:
        return self._index[VarKey(edge, "ens", None, t)]

    def ens_series(self, edge: str, steps: int) -> np.ndarray:
        return np.array([self.ens(edge, t) for t in range(steps)])

    def has(self, key: VarKey) -> bool:
        return key in self._index


@dataclass
class LpProblem:
    """Assembled sparse LP in bounded standard form (immutable by convention)."""

    c: np.ndarray
    a_rows: np.ndarray
    a_cols: np.ndarray
    a_vals: np.ndarray
    sense: np.ndarray            # '=' or '<' per row
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    col_names: list[str]
    row_names: list[str]
    co2_cap_row: int | None = None

    @property
    def num_cols(self) -> int:
        return self.c.shape[0]

    @property
    def num_rows(self) -> int:
        return self.rhs.shape[0]

    def matrix(self) -> sp.csr_matrix:
        m = sp.coo_matrix(
            (self.a_vals, (self.a_rows, self.a_cols)),
            shape=(self.num_rows, self.num_cols),
        )
        return m.tocsr()

    def with_cost(self, c: np.ndarray) -> "LpProblem":
        return replace(self, c=np.asarray(c, dtype=float))


class LpBuilder:
    """Accumulates columns, rows and triplets, then assembles an LpProblem."""

    def __init__(self) -> None:
        self.cost: list[float] = []
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.col_names: list[str] = []
        self.sense: list[str] = []
        self.rhs: list[float] = []
        self.row_names: list[str] = []
        self._rows: list[int] = []
        self._cols: list[int] = []
        self._vals: list[float] = []

    def add_col(self, name: str, lower: float = 0.0, upper: float = math.inf,
                cost: float = 0.0) -> int:
        self.col_names.append(name)
        self.lower.append(lower)
        self.upper.append(upper)
        self.cost.append(cost)
        return len(self.col_names) - 1

    def add_row(self, name: str, sense: str, rhs: float) -> int:
        if sense not in ("=", "<"):
            raise ValueError(f"unsupported sense {sense!r}")
        if not np.isfinite(rhs):
            raise ValueError(f"non-finite rhs for row {name!r}")
        self.row_names.append(name)
        self.sense.append(sense)
        self.rhs.append(rhs)
        return len(self.row_names) - 1

    def add_term(self, row: int, col: int, val: float) -> None:
        if not np.isfinite(val):
            raise ValueError(f"non-finite coefficient in row {self.row_names[row]!r}")
        if val != 0.0:
            self._rows.append(row)
            self._cols.append(col)
            self._vals.append(val)

    def build(self, co2_cap_row: int | None = None) -> LpProblem:
        nrows, ncols = len(self.rhs), len(self.cost)
        coo = sp.coo_matrix(
            (np.array(self._vals, dtype=float),
             (np.array(self._rows, dtype=np.int64), np.array(self._cols, dtype=np.int64))),
            shape=(nrows, ncols),
        )
        coo.sum_duplicates()
        csr = coo.tocsr()
        csr.eliminate_zeros()
        coo = csr.tocoo()
        row_counts = np.diff(csr.indptr)
        empty = np.flatnonzero(row_counts == 0)
        if empty.size:
            names = ", ".join(self.row_names[i] for i in empty[:5])
            raise ValueError(f"{empty.size} empty row(s), e.g. {names}")
        return LpProblem(
            c=np.array(self.cost, dtype=float),
            a_rows=coo.row.astype(np.int64),
            a_cols=coo.col.astype(np.int64),
            a_vals=coo.data.astype(float),
            sense=np.array(self.sense, dtype="<U1"),
            rhs=np.array(self.rhs, dtype=float),
            lower=np.array(self.lower, dtype=float),
            upper=np.array(self.upper, dtype=float),
            col_names=list(self.col_names),
            row_names=list(self.row_names),
            co2_cap_row=co2_cap_row,
        )
