"""Truncated Toeplitz, Hankel and H-Toeplitz matrices and the basis maps K, K*, J.

Index conventions: row m is the output basis index, column n the input
basis index, both 0-based.  An entry of a :class:`TruncatedOperator` is
always the exact entry of the infinite matrix; truncation only selects.

Basis maps act on finite expansions:

* K  (dilation):  e_{2n} -> e_n,  e_{2n+1} -> conj(e_{n+1})
* K* (adjoint):   e_n -> e_{2n},  conj(e_{n+1}) -> e_{2n+1}; the part of a
  mixed vector orthogonal to span{e_n} ∪ {conj(e_{n+1})} is annihilated,
  so K K* is the orthogonal projection onto that span (not the identity
  of L²).
* J  (flip):      e_n -> conj(e_{n+1})

H-Toeplitz: S_φ = P M_φ K.  Its even columns are the columns of T_φ and its
odd columns those of H_φ = P M_φ J.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatch, KindError, SizeLimitError, StabilityError
from .fock_core import (
    FockVector,
    FockWeight,
    MixedVector,
    WeightLike,
    as_weight,
    basis_norm_coeff,
    log_basis_norm_coeff,
    project_mixed_vector,
)
from .symbols import HarmonicSymbol, conjugate, symbol_from_json, symbol_to_json

__all__ = [
    "MAX_SIZE",
    "KINDS",
    "TruncatedOperator",
    "BasisMap",
    "toeplitz_entry",
    "hankel_entry",
    "htoeplitz_entry",
    "build",
    "dilation_apply",
    "dilation_adjoint_apply",
    "flip_apply",
    "apply_toeplitz_exact",
    "apply_hankel_exact",
    "apply_htoeplitz_exact",
    "adjoint",
    "compose",
    "commutator",
    "extract_even_columns",
    "extract_odd_columns",
    "stable_truncation_size",
    "adjoint_symbol_check",
    "operator_to_json",
    "operator_from_json",
    "operator_to_csv",
    "operator_from_csv",
    "is_close_vector",
]

MAX_SIZE = 4096
KINDS = ("toeplitz", "hankel", "htoeplitz")


# -- entry formulas ----------------------------------------------------------

def _ratio_factor(hi, lo, log_alpha: float):
    """sqrt(α^{lo-hi} hi!/lo!) for hi >= lo, elementwise."""
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    return np.exp(0.5 * ((lo - hi) * log_alpha + gammaln(hi + 1.0) - gammaln(lo + 1.0)))


def _hankel_factor(m, n, log_alpha: float):
    """(m+n+1)!/sqrt(α^{m+n+1} m! (n+1)!), elementwise."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    k = m + n + 1.0
    return np.exp(gammaln(k + 1.0) - 0.5 * (k * log_alpha + gammaln(m + 1.0) + gammaln(n + 2.0)))


def _check_mn(m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise ValueError("matrix indices must be non-negative")


def toeplitz_entry(phi: HarmonicSymbol, m: int, n: int, w: WeightLike) -> complex:
    """⟨T_φ e_n, e_m⟩."""
    _check_mn(m, n)
    la = as_weight(w).log_alpha
    if m >= n:
        c = phi.a(m - n)
        return c * float(_ratio_factor(m, n, la)) if c else 0j
    c = phi.b(n - m)
    return c * float(_ratio_factor(n, m, la)) if c else 0j


def hankel_entry(phi: HarmonicSymbol, m: int, n: int, w: WeightLike) -> complex:
    """⟨H_φ e_n, e_m⟩; only a_{m+n+1} contributes."""
    _check_mn(m, n)
    c = phi.a(m + n + 1)
    if not c:
        return 0j
    return c * float(_hankel_factor(m, n, as_weight(w).log_alpha))


def htoeplitz_entry(phi: HarmonicSymbol, m: int, j: int, w: WeightLike) -> complex:
    """⟨S_φ e_j, e_m⟩: Toeplitz entry for even j, Hankel entry for odd j."""
    _check_mn(m, j)
    if j % 2 == 0:
        return toeplitz_entry(phi, m, j // 2, w)
    return hankel_entry(phi, m, (j - 1) // 2, w)


# -- blocks ------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedOperator:
    """Dense R×C block of an infinite operator matrix (read-only)."""

    entries: np.ndarray
    kind: str = "generic"
    weight: FockWeight = field(default_factory=FockWeight)
    symbol: HarmonicSymbol | None = None

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2:
            raise ValueError("entries must be a 2-d array")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def alpha(self) -> float:
        return self.weight.alpha

    def __getitem__(self, idx):
        return self.entries[idx]

    def column(self, j: int) -> FockVector:
        return FockVector.from_array(self.entries[:, j], self.weight)

    def block(self, rows: int, cols: int | None = None) -> "TruncatedOperator":
        cols = rows if cols is None else cols
        return TruncatedOperator(self.entries[:rows, :cols], self.kind, self.weight, self.symbol)

    def apply(self, f: FockVector) -> FockVector:
        """Matrix-vector product; f must live in the first ``cols`` indices."""
        if f.max_index >= self.cols:
            raise DimensionMismatch(f"vector index {f.max_index} outside {self.cols} columns")
        return FockVector.from_array(self.entries @ f.to_array(self.cols), self.weight)


def _check_size(R: int, C: int) -> None:
    if R < 1 or C < 1:
        raise ValueError("block dimensions must be >= 1")
    if R > MAX_SIZE or C > MAX_SIZE:
        raise SizeLimitError(f"block {R}x{C} exceeds the limit {MAX_SIZE}x{MAX_SIZE}")


def _toeplitz_block(phi: HarmonicSymbol, R: int, C: int, la: float) -> np.ndarray:
    out = np.zeros((R, C), dtype=complex)
    for i, c in phi.analytic.items():
        n = np.arange(max(0, min(C, R - i)))
        if n.size:
            out[n + i, n] = c * _ratio_factor(n + i, n, la)
    for j, c in phi.anti.items():
        m = np.arange(max(0, min(R, C - j)))
        if m.size:
            out[m, m + j] = c * _ratio_factor(m + j, m, la)
    return out


def _hankel_block(phi: HarmonicSymbol, R: int, C: int, la: float) -> np.ndarray:
    out = np.zeros((R, C), dtype=complex)
    for k, c in phi.analytic.items():
        if k == 0:
            continue
        m = np.arange(k)
        n = k - 1 - m
        keep = (m < R) & (n < C)
        m, n = m[keep], n[keep]
        if m.size:
            out[m, n] = c * _hankel_factor(m, n, la)
    return out


def build(kind: str, phi: HarmonicSymbol, R: int, C: int | None = None, w: WeightLike = 1.0) -> TruncatedOperator:
    """Top-left R×C block of T_φ, H_φ or S_φ."""
    C = R if C is None else C
    if kind not in KINDS:
        raise KindError(f"unknown kind {kind!r}; expected one of {KINDS}")
    _check_size(R, C)
    w = as_weight(w)
    la = w.log_alpha
    if kind == "toeplitz":
        a = _toeplitz_block(phi, R, C, la)
    elif kind == "hankel":
        a = _hankel_block(phi, R, C, la)
    else:
        a = np.zeros((R, C), dtype=complex)
        a[:, 0::2] = _toeplitz_block(phi, R, (C + 1) // 2, la)
        if C > 1:
            a[:, 1::2] = _hankel_block(phi, R, C // 2, la)
    return TruncatedOperator(a, kind, w, phi)


# -- basis maps --------------------------------------------------------------

def dilation_apply(f: FockVector) -> MixedVector:
    """K f as a mixed polynomial."""
    w = f.weight
    terms: dict = {}
    for j, c in f:
        if j % 2 == 0:
            n = j // 2
            terms[(n, 0)] = c * basis_norm_coeff(n, w)
        else:
            n = (j + 1) // 2
            terms[(0, n)] = c * basis_norm_coeff(n, w)
    return MixedVector(terms, w)


def dilation_adjoint_apply(v: MixedVector) -> FockVector:
    """K* v.

    z^p z̄^q with p >= q has component ⟨z^p z̄^q, e_{p-q}⟩ along e_{p-q};
    with q > p its component lies along conj(e_{q-p}).  Those components
    are sent to e_{2(p-q)} and e_{2(q-p)-1}; everything else is dropped.
    """
    w = v.weight
    out: dict[int, complex] = {}
    for (p, q), c in v:
        k = abs(p - q)
        if min(p, q) == 0:
            # ⟨zᵏ, zᵏ⟩ sqrt(αᵏ/k!) = 1/sqrt(αᵏ/k!); dividing undoes K exactly
            comp = c / basis_norm_coeff(k, w)
        else:
            m = max(p, q)
            comp = c * math.exp(log_basis_norm_coeff(k, w) - 2 * log_basis_norm_coeff(m, w))
        j = 2 * k if p >= q else 2 * k - 1
        out[j] = out.get(j, 0j) + comp
    return FockVector(out, w)


def flip_apply(f: FockVector) -> MixedVector:
    """J f with J e_n = conj(e_{n+1})."""
    w = f.weight
    return MixedVector({(0, n + 1): c * basis_norm_coeff(n + 1, w) for n, c in f}, w)


class BasisMap(Enum):
    K = "K"
    K_star = "K_star"
    J = "J"

    def __call__(self, x):
        if self is BasisMap.K:
            return dilation_apply(x)
        if self is BasisMap.K_star:
            return dilation_adjoint_apply(x)
        return flip_apply(x)


def _symbol_times(phi: HarmonicSymbol, v: MixedVector) -> MixedVector:
    return phi.to_mixed(v.weight) * v


def apply_toeplitz_exact(phi: HarmonicSymbol, f: FockVector) -> FockVector:
    return project_mixed_vector(_symbol_times(phi, f.to_mixed()))


def apply_hankel_exact(phi: HarmonicSymbol, f: FockVector) -> FockVector:
    return project_mixed_vector(_symbol_times(phi, flip_apply(f)))


def apply_htoeplitz_exact(phi: HarmonicSymbol, f: FockVector) -> FockVector:
    """S_φ f = P(φ · K f), computed on mixed polynomials with no truncation."""
    return project_mixed_vector(_symbol_times(phi, dilation_apply(f)))


# -- block algebra -----------------------------------------------------------

def adjoint(A: TruncatedOperator) -> TruncatedOperator:
    """Conjugate transpose of the block."""
    return TruncatedOperator(A.entries.conj().T, "generic", A.weight)


def compose(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot compose {A.shape} with {B.shape}")
    return TruncatedOperator(A.entries @ B.entries, "generic", A.weight)


def commutator(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    if A.shape != B.shape or A.rows != A.cols:
        raise DimensionMismatch(f"commutator needs equal square blocks, got {A.shape} and {B.shape}")
    return TruncatedOperator(A.entries @ B.entries - B.entries @ A.entries, "generic", A.weight)


def _require_htoeplitz(S: TruncatedOperator) -> None:
    if S.kind != "htoeplitz":
        raise KindError(f"expected an htoeplitz block, got {S.kind!r}")


def extract_even_columns(S: TruncatedOperator) -> TruncatedOperator:
    """Columns 0, 2, 4, ... of an S_φ block, i.e. a T_φ block."""
    _require_htoeplitz(S)
    return TruncatedOperator(S.entries[:, 0::2], "toeplitz", S.weight, S.symbol)


def extract_odd_columns(S: TruncatedOperator) -> TruncatedOperator:
    """Columns 1, 3, 5, ... of an S_φ block, i.e. an H_φ block."""
    _require_htoeplitz(S)
    return TruncatedOperator(S.entries[:, 1::2], "hankel", S.weight, S.symbol)


def _degrees(symbols: Iterable[HarmonicSymbol]) -> tuple[int, int]:
    symbols = list(symbols)
    d_a = max((max(s.d_a, 0) for s in symbols), default=0)
    d_b = max((max(s.d_b, 0) for s in symbols), default=0)
    return d_a, d_b


def _product_blocks(symbols: Sequence[HarmonicSymbol], N: int, n0: int, w: FockWeight):
    mats = [build("htoeplitz", s, N, N, w).entries for s in symbols]
    for A in mats:
        for B in mats:
            yield (A @ B)[:n0, :n0]
            yield (A.conj().T @ B)[:n0, :n0]
            yield (A @ B.conj().T)[:n0, :n0]


def stable_truncation_size(
    phi: HarmonicSymbol | Sequence[HarmonicSymbol],
    n0: int,
    w: WeightLike = 1.0,
    verify: bool = True,
    tol: float = 1e-12,
) -> int:
    """Size N whose S_φ truncations give entry-exact products on the n0 block.

    N = 2 (n0 + d_a + d_b + 1) with negative degrees clamped to 0; with
    several symbols the largest degrees are used.  When ``verify`` is set
    all pairwise products (and products with adjoints) are recomputed at
    2N and compared on the n0×n0 corner.
    """
    if n0 < 1:
        raise ValueError("target block must be >= 1")
    symbols = [phi] if isinstance(phi, HarmonicSymbol) else list(phi)
    d_a, d_b = _degrees(symbols)
    N = 2 * (n0 + d_a + d_b + 1)
    _check_size(2 * N if verify else N, 2 * N if verify else N)
    if verify:
        w = as_weight(w)
        for small, big in zip(_product_blocks(symbols, N, n0, w), _product_blocks(symbols, 2 * N, n0, w)):
            diff = np.abs(small - big)
            scale = max(1.0, float(np.abs(big).max(initial=0.0)))
            if diff.max(initial=0.0) > tol * scale:
                pos = tuple(int(x) for x in np.unravel_index(np.argmax(diff), diff.shape))
                raise StabilityError(
                    f"truncation N={N} diverges from 2N at entry {pos} by {diff[pos]:.3e}",
                    position=pos,
                    values=(complex(small[pos]), complex(big[pos])),
                )
    return N


def adjoint_symbol_check(kind: str, phi: HarmonicSymbol, N: int, w: WeightLike = 1.0, tol: float = 1e-12) -> dict:
    """Compare adjoint(build(kind, φ)) with build(kind, conj φ) entrywise.

    Holds for Toeplitz blocks; for Hankel and H-Toeplitz blocks it generally
    does not, and the result is reported rather than asserted.
    """
    lhs = adjoint(build(kind, phi, N, N, w)).entries
    rhs = build(kind, conjugate(phi), N, N, w).entries
    diff = np.abs(lhs - rhs)
    worst = tuple(int(x) for x in np.unravel_index(np.argmax(diff), diff.shape))
    return {
        "kind": kind,
        "size": N,
        "max_abs_difference": float(diff[worst]),
        "worst_entry": list(worst),
        "mismatched_entries": int(np.count_nonzero(diff > tol)),
        "agree": bool(diff[worst] <= tol),
    }


# -- export ------------------------------------------------------------------

def _pair(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def operator_to_json(A: TruncatedOperator) -> dict:
    out = {
        "rows": A.rows,
        "cols": A.cols,
        "kind": A.kind,
        "alpha": A.alpha,
        "entries": [[_pair(c) for c in row] for row in A.entries],
    }
    if A.symbol is not None:
        out["symbol"] = symbol_to_json(A.symbol)
    return out


def operator_from_json(data: dict | str) -> TruncatedOperator:
    if isinstance(data, str):
        data = json.loads(data)
    a = np.array([[complex(re, im) for re, im in row] for row in data["entries"]], dtype=complex)
    a = a.reshape(int(data["rows"]), int(data["cols"]))
    sym = symbol_from_json(data["symbol"]) if "symbol" in data else None
    return TruncatedOperator(a, data["kind"], FockWeight(data["alpha"]), sym)


def operator_to_csv(A: TruncatedOperator) -> str:
    """Row-major CSV; each cell is "re,im" with 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in A.entries:
        writer.writerow([f"{c.real:.17g},{c.imag:.17g}" for c in row])
    return buf.getvalue()


def operator_from_csv(text: str, kind: str = "generic", w: WeightLike = 1.0) -> TruncatedOperator:
    rows = []
    for row in csv.reader(io.StringIO(text)):
        if row:
            rows.append([complex(*map(float, cell.split(","))) for cell in row])
    return TruncatedOperator(np.array(rows, dtype=complex), kind, as_weight(w))


def is_close_vector(f: FockVector, g: FockVector, tol: float = 1e-12) -> bool:
    """Max-norm comparison relative to the larger vector's max coefficient."""
    idx = set(f.coeffs) | set(g.coeffs)
    if not idx:
        return True
    diff = max(abs(f[n] - g[n]) for n in idx)
    scale = max(1.0, max(abs(f[n]) for n in idx), max(abs(g[n]) for n in idx))
    return diff <= tol * scale

