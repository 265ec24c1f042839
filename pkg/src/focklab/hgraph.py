"""Directed H-Toeplitz graphs W_n⟨x; y⟩.

Two constructions are provided:

* :func:`from_symbol` puts an arc (i, j) wherever entry (i-1, j-1) of the
  S_φ block is non-zero.  This is the authoritative one.
* :func:`from_params` applies the literal arc rule j = (2i-1) + x_k or
  i = (j+1)/2 + y_l (j odd) to offset lists.

For purely anti-analytic symbols the two agree away from the boundary.
With an analytic part the Hankel columns are anti-diagonal, so the literal
rule does not reproduce the operator pattern; :func:`compare` shows where.

Vertices are 1-based; vertex v corresponds to basis index v-1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DimensionMismatch
from .fock_core import WeightLike, as_weight
from .operators import build, htoeplitz_entry
from .symbols import HarmonicSymbol

__all__ = [
    "HGraph",
    "DegreeReport",
    "GraphParams",
    "from_symbol",
    "from_params",
    "symbol_to_params",
    "degree_report",
    "compare",
    "indicator_matrix",
    "to_dot",
    "to_csv",
    "from_csv",
]

DEFAULT_EPS = 1e-12


@dataclass(frozen=True)
class HGraph:
    n: int
    arcs: frozenset = frozenset()
    origin: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        arcs = frozenset((int(i), int(j)) for i, j in self.arcs)
        for i, j in arcs:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"arc ({i}, {j}) outside vertices 1..{self.n}")
        object.__setattr__(self, "arcs", arcs)

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def successors(self, i: int) -> list[int]:
        return sorted(j for a, j in self.arcs if a == i)

    def predecessors(self, j: int) -> list[int]:
        return sorted(i for i, b in self.arcs if b == j)


class GraphParams(NamedTuple):
    xs: list[int]
    ys: list[int]
    zero_offset: bool  # a_0 != 0 put offset 0 into xs


@dataclass
class DegreeReport:
    indegree: list[int]
    outdegree: list[int]
    loops: list[int]
    clipped: list[int]

    @property
    def arc_count(self) -> int:
        return sum(self.outdegree)

    def to_json(self) -> dict:
        return {
            "indegree": self.indegree,
            "outdegree": self.outdegree,
            "loops": self.loops,
            "loop_count": len(self.loops),
            "clipped": self.clipped,
            "arc_count": self.arc_count,
        }


def from_symbol(phi: HarmonicSymbol, n: int, eps: float = DEFAULT_EPS, w: WeightLike = 1.0) -> HGraph:
    """Graph whose adjacency matrix is the indicator of the n×n S_φ block."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    w = as_weight(w)
    thr = eps * phi.max_abs_coeff()
    arcs = frozenset()
    if not phi.is_zero:
        S = build("htoeplitz", phi, n, n, w).entries
        rows, cols = np.nonzero(np.abs(S) > thr)
        arcs = frozenset(zip((rows + 1).tolist(), (cols + 1).tolist()))
    return HGraph(n, arcs, {"type": "symbol", "symbol": phi, "eps": eps, "alpha": w.alpha})


def _check_offsets(name: str, offs: Iterable[int], n: int) -> list[int]:
    offs = list(offs)
    for k, x in enumerate(offs):
        if int(x) != x:
            raise ValueError(f"{name} offsets must be integers, got {x!r}")
        if not 0 < x < n:
            raise ValueError(f"{name} offset {x} outside 0 < offset < {n}")
        if k and offs[k - 1] >= x:
            raise ValueError(f"{name} offsets must be strictly increasing")
    return [int(x) for x in offs]


def from_params(n: int, xs: Iterable[int] = (), ys: Iterable[int] = ()) -> HGraph:
    """W_n⟨xs; ys⟩ from the literal arc rule; arcs leaving 1..n are dropped."""
    if n < 1:
        raise ValueError("a graph needs at least one vertex")
    xs = _check_offsets("upper", xs, n)
    ys = _check_offsets("lower", ys, n)
    arcs = set()
    for i in range(1, n + 1):
        for x in xs:
            j = 2 * i - 1 + x
            if j <= n:
                arcs.add((i, j))
    for j in range(1, n + 1, 2):
        for y in ys:
            i = (j + 1) // 2 + y
            if i <= n:
                arcs.add((i, j))
    return HGraph(n, frozenset(arcs), {"type": "params", "xs": xs, "ys": ys})


def symbol_to_params(phi: HarmonicSymbol) -> GraphParams:
    """Offsets read off the symbol's support.

    Upper offsets: 2i-1 for each a_i (i >= 1) and 2j for each b_j.  Lower
    offsets: i for each a_i (i >= 1).  A constant term yields offset 0,
    which the W_n⟨x; y⟩ notation does not allow, so it is flagged.
    """
    xs = {2 * i - 1 for i in phi.analytic if i >= 1} | {2 * j for j in phi.anti}
    zero = phi.a(0) != 0
    if zero:
        xs.add(0)
    ys = {i for i in phi.analytic if i >= 1}
    return GraphParams(sorted(xs), sorted(ys), zero)


def _clipped(g: HGraph) -> list[int]:
    kind = g.origin.get("type")
    out = []
    if kind == "symbol":
        phi = g.origin["symbol"]
        if phi.is_zero:
            return []
        thr = g.origin["eps"] * phi.max_abs_coeff()
        w = g.origin["alpha"]
        da, db = max(phi.d_a, 0), max(phi.d_b, 0)
        for i in range(1, g.n + 1):
            # row i-1 has no non-zero column beyond 2(i-1+d_a+d_b)+2
            hi = 2 * (i - 1 + da + db) + 3
            if any(abs(htoeplitz_entry(phi, i - 1, j, w)) > thr for j in range(g.n, hi)):
                out.append(i)
    elif kind == "params":
        xs = g.origin["xs"]
        out = [i for i in range(1, g.n + 1) if any(2 * i - 1 + x > g.n for x in xs)]
    return out


def degree_report(g: HGraph) -> DegreeReport:
    indeg = [0] * g.n
    outdeg = [0] * g.n
    for i, j in g.arcs:
        outdeg[i - 1] += 1
        indeg[j - 1] += 1
    loops = sorted(i for i, j in g.arcs if i == j)
    return DegreeReport(indeg, outdeg, loops, _clipped(g))


def compare(g1: HGraph, g2: HGraph) -> dict:
    if g1.n != g2.n:
        raise DimensionMismatch(f"vertex counts differ: {g1.n} vs {g2.n}")
    return {
        "n": g1.n,
        "only_first": sorted(g1.arcs - g2.arcs),
        "only_second": sorted(g2.arcs - g1.arcs),
        "shared": sorted(g1.arcs & g2.arcs),
        "identical": g1.arcs == g2.arcs,
    }


def indicator_matrix(g: HGraph) -> np.ndarray:
    A = np.zeros((g.n, g.n), dtype=int)
    for i, j in g.arcs:
        A[i - 1, j - 1] = 1
    return A


def to_dot(g: HGraph) -> str:
    lines = ["digraph W {"]
    lines += [f"  {v};" for v in range(1, g.n + 1)]
    lines += [f"  {i} -> {j};" for i, j in g.sorted_arcs()]
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_csv(g: HGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["i", "j"])
    writer.writerows(g.sorted_arcs())
    return buf.getvalue()


def from_csv(text: str, n: int | None = None) -> HGraph:
    """Inverse of :func:`to_csv`; n defaults to the largest vertex seen."""
    rows = list(csv.reader(io.StringIO(text)))
    if rows and rows[0] == ["i", "j"]:
        rows = rows[1:]
    arcs = [(int(i), int(j)) for i, j in (r for r in rows if r)]
    if n is None:
        n = max((max(a) for a in arcs), default=1)
    return HGraph(n, frozenset(arcs), {"type": "csv"})
