"""Fock space fundamentals.

The Fock space F²_α is the space of entire functions square integrable
against dλ_α(z) = (α/π) e^{-α|z|²} dA(z).  Its orthonormal basis is
e_n(z) = sqrt(αⁿ/n!) zⁿ.  Elements of the ambient space L²(ℂ, dλ_α) that
show up in this package are finite sums of mixed monomials z^p z̄^q.

Every coefficient involving factorials is evaluated in log space with
``scipy.special.gammaln`` and exponentiated once, so nothing overflows
for indices up to a few thousand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np
from scipy.special import gammaln

__all__ = [
    "FockWeight",
    "MixedMonomial",
    "FockVector",
    "MixedVector",
    "as_weight",
    "basis_norm_coeff",
    "log_basis_norm_coeff",
    "monomial_inner",
    "mixed_inner",
    "project_mixed_monomial",
    "project_mixed_vector",
    "kernel_coeffs",
    "kernel_coeff_array",
    "RTOL_CLOSED_FORM",
    "RTOL_QUADRATURE",
]

RTOL_CLOSED_FORM = 1e-10
RTOL_QUADRATURE = 1e-8


@dataclass(frozen=True)
class FockWeight:
    """The Gaussian parameter α > 0."""

    alpha: float = 1.0

    def __post_init__(self):
        a = float(self.alpha)
        if not (a > 0 and math.isfinite(a)):
            raise ValueError(f"alpha must be a positive finite real, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def log_alpha(self) -> float:
        return math.log(self.alpha)


WeightLike = Union[FockWeight, float, int]


def as_weight(w: WeightLike) -> FockWeight:
    return w if isinstance(w, FockWeight) else FockWeight(float(w))


def _check_index(*indices: int) -> None:
    for k in indices:
        if int(k) != k or k < 0:
            raise ValueError(f"indices must be non-negative integers, got {k!r}")


def log_basis_norm_coeff(n, w: WeightLike):
    """Natural log of sqrt(αⁿ/n!); accepts scalars or integer arrays."""
    w = as_weight(w)
    n = np.asarray(n, dtype=float)
    return 0.5 * (n * w.log_alpha - gammaln(n + 1.0))


def basis_norm_coeff(n: int, w: WeightLike) -> float:
    """Return sqrt(αⁿ/n!), the factor that normalises zⁿ into e_n.

    >>> basis_norm_coeff(0, 7.3)
    1.0
    """
    _check_index(n)
    return float(np.exp(log_basis_norm_coeff(n, w)))


def monomial_inner(s: int, t: int, w: WeightLike) -> complex:
    """⟨zˢ, zᵗ⟩ in F²_α, i.e. δ_st s!/αˢ."""
    _check_index(s, t)
    if s != t:
        return 0j
    w = as_weight(w)
    return complex(math.exp(math.lgamma(s + 1) - s * w.log_alpha))


@dataclass(frozen=True)
class MixedMonomial:
    p: int
    q: int
    coeff: complex = 1.0

    def __post_init__(self):
        _check_index(self.p, self.q)
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "coeff", complex(self.coeff))


def _same_weight(u, v) -> None:
    if u.weight != v.weight:
        raise ValueError(f"vectors live in different spaces: alpha={u.weight.alpha} vs alpha={v.weight.alpha}")


def _clean(mapping: Mapping) -> dict:
    return {k: complex(v) for k, v in sorted(mapping.items()) if complex(v) != 0}


@dataclass(frozen=True)
class FockVector:
    """Finite expansion Σ c_n e_n over the orthonormal basis of F²_α.

    Exact zeros are dropped on construction; keys are kept sorted so that
    every reduction runs in increasing index order.
    """

    coeffs: Mapping[int, complex] = field(default_factory=dict)
    weight: FockWeight = field(default_factory=FockWeight)

    def __post_init__(self):
        for n in self.coeffs:
            _check_index(n)
        object.__setattr__(self, "coeffs", _clean({int(k): v for k, v in self.coeffs.items()}))
        object.__setattr__(self, "weight", as_weight(self.weight))

    @classmethod
    def basis(cls, n: int, w: WeightLike = 1.0, coeff: complex = 1.0) -> "FockVector":
        return cls({n: coeff}, as_weight(w))

    @classmethod
    def zero(cls, w: WeightLike = 1.0) -> "FockVector":
        return cls({}, as_weight(w))

    @classmethod
    def from_array(cls, values: Iterable[complex], w: WeightLike = 1.0) -> "FockVector":
        return cls({n: c for n, c in enumerate(values)}, as_weight(w))

    def __getitem__(self, n: int) -> complex:
        return self.coeffs.get(n, 0j)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs.items())

    @property
    def max_index(self) -> int:
        return max(self.coeffs, default=-1)

    def to_array(self, size: int | None = None) -> np.ndarray:
        size = self.max_index + 1 if size is None else size
        out = np.zeros(size, dtype=complex)
        for n, c in self.coeffs.items():
            if n < size:
                out[n] = c
        return out

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for _, c in self))

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def inner(self, other: "FockVector") -> complex:
        _same_weight(self, other)
        return sum((c * other[n].conjugate() for n, c in self), 0j)

    def scale(self, a: complex) -> "FockVector":
        return FockVector({n: a * c for n, c in self}, self.weight)

    def __add__(self, other: "FockVector") -> "FockVector":
        _same_weight(self, other)
        out = dict(self.coeffs)
        for n, c in other:
            out[n] = out.get(n, 0j) + c
        return FockVector(out, self.weight)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def to_mixed(self) -> "MixedVector":
        """Rewrite Σ c_n e_n as Σ c_n sqrt(αⁿ/n!) zⁿ."""
        return MixedVector(
            {(n, 0): c * basis_norm_coeff(n, self.weight) for n, c in self}, self.weight
        )


@dataclass(frozen=True)
class MixedVector:
    """Finite sum Σ c_pq z^p z̄^q in L²(ℂ, dλ_α), keyed by (p, q)."""

    terms: Mapping[tuple[int, int], complex] = field(default_factory=dict)
    weight: FockWeight = field(default_factory=FockWeight)

    def __post_init__(self):
        for p, q in self.terms:
            _check_index(p, q)
        object.__setattr__(
            self, "terms", _clean({(int(p), int(q)): c for (p, q), c in self.terms.items()})
        )
        object.__setattr__(self, "weight", as_weight(self.weight))

    @classmethod
    def from_monomials(cls, monomials: Iterable[MixedMonomial], w: WeightLike = 1.0):
        out: dict = {}
        for m in monomials:
            out[(m.p, m.q)] = out.get((m.p, m.q), 0j) + m.coeff
        return cls(out, as_weight(w))

    def monomials(self) -> list[MixedMonomial]:
        return [MixedMonomial(p, q, c) for (p, q), c in self.terms.items()]

    def __getitem__(self, key: tuple[int, int]) -> complex:
        return self.terms.get(key, 0j)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def scale(self, a: complex) -> "MixedVector":
        return MixedVector({k: a * c for k, c in self}, self.weight)

    def __add__(self, other: "MixedVector") -> "MixedVector":
        _same_weight(self, other)
        out = dict(self.terms)
        for k, c in other:
            out[k] = out.get(k, 0j) + c
        return MixedVector(out, self.weight)

    def __sub__(self, other: "MixedVector") -> "MixedVector":
        return self + other.scale(-1)

    def __mul__(self, other: "MixedVector") -> "MixedVector":
        _same_weight(self, other)
        out: dict = {}
        for (p, q), c in self:
            for (r, s), d in other:
                key = (p + r, q + s)
                out[key] = out.get(key, 0j) + c * d
        return MixedVector(out, self.weight)

    def conj(self) -> "MixedVector":
        return MixedVector({(q, p): c.conjugate() for (p, q), c in self}, self.weight)

    def is_analytic(self) -> bool:
        return all(q == 0 for p, q in self.terms)

    def evaluate(self, z):
        """Pointwise values at z (scalar or array)."""
        z = np.asarray(z, dtype=complex)
        zc = np.conj(z)
        out = np.zeros_like(z)
        for (p, q), c in self:
            out = out + c * z**p * zc**q
        return out

    def norm_sq(self) -> float:
        return float(mixed_inner(self, self).real)

    def norm(self) -> float:
        return math.sqrt(max(self.norm_sq(), 0.0))


def mixed_inner(u: MixedVector, v: MixedVector) -> complex:
    """⟨u, v⟩ in L²(ℂ, dλ_α) from the monomial moments.

    ⟨z^p z̄^q, z^r z̄^s⟩ = ∫ z^{p+s} z̄^{q+r} dλ_α, non-zero only when
    p+s = q+r.
    """
    _same_weight(u, v)
    w = u.weight
    total = 0j
    for (p, q), c in u:
        for (r, s), d in v:
            if p + s == q + r:
                total += c * d.conjugate() * monomial_inner(p + s, p + s, w)
    return total


def _log_projection_coeff(p: int, q: int, w: FockWeight) -> float:
    # log of (p!/α^p) sqrt(α^{p-q}/(p-q)!)
    return (
        math.lgamma(p + 1)
        - p * w.log_alpha
        + 0.5 * ((p - q) * w.log_alpha - math.lgamma(p - q + 1))
    )


def _project_term(p: int, q: int, c: complex, w: FockWeight) -> complex:
    if q == 0:
        # zᵖ = e_p / sqrt(αᵖ/p!); dividing by the same factor that built it
        # keeps P(f) == f exactly for analytic f
        return c / basis_norm_coeff(p, w)
    return c * math.exp(_log_projection_coeff(p, q, w))


def project_mixed_monomial(p: int, q: int, w: WeightLike, coeff: complex = 1.0) -> FockVector:
    """Orthogonal projection P(z^p z̄^q) onto F²_α.

    Zero when q > p; otherwise (p!/α^p) sqrt(α^{p-q}/(p-q)!) e_{p-q}.
    """
    _check_index(p, q)
    w = as_weight(w)
    if q > p or coeff == 0:
        return FockVector.zero(w)
    return FockVector({p - q: _project_term(p, q, coeff, w)}, w)


def project_mixed_vector(v: MixedVector) -> FockVector:
    """Linear extension of :func:`project_mixed_monomial`."""
    out: dict[int, complex] = {}
    for (p, q), c in v:
        if q > p:
            continue
        out[p - q] = out.get(p - q, 0j) + _project_term(p, q, c, v.weight)
    return FockVector(out, v.weight)


def kernel_coeff_array(z: complex, size: int, w: WeightLike) -> np.ndarray:
    """Coefficients of the normalised kernel k_z on e_0..e_{size-1}.

    c_n = e^{-α|z|²/2} sqrt(αⁿ/n!) z̄ⁿ, evaluated as one exponential per
    term to stay finite for large |z|.
    """
    if size < 1:
        raise ValueError("truncation size must be >= 1")
    w = as_weight(w)
    z = complex(z)
    out = np.zeros(size, dtype=complex)
    if z == 0:
        out[0] = 1.0
        return out
    n = np.arange(size)
    r2 = abs(z) ** 2
    log_mag = -0.5 * w.alpha * r2 + log_basis_norm_coeff(n, w) + n * math.log(abs(z))
    return np.exp(log_mag) * np.exp(-1j * n * np.angle(z))


def kernel_coeffs(z: complex, N: int, w: WeightLike) -> FockVector:
    return FockVector.from_array(kernel_coeff_array(z, N, w), as_weight(w))
