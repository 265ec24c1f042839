"""Quadrature ground truth for integrals against dλ_α.

In polar coordinates with u = αr² the Gaussian measure becomes

    ∫ F dλ_α = (1/2π) ∫₀^{2π} ∫₀^∞ F(sqrt(u/α) e^{iθ}) e^{-u} du dθ,

so a uniform angular grid (exact for e^{ikθ}, |k| < A) combined with a
Gauss–Laguerre rule in u integrates mixed polynomials exactly.  For
symbols with a radial jump (e.g. the indicator of a disk) the radial rule
is split at the jump into Gauss–Legendre panels plus a shifted Laguerre
tail.

Nothing here calls the closed-form engine; basis functions are evaluated
directly from their definition and moments use exact integer factorials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_laguerre, roots_legendre

from .errors import QuadratureDegreeError
from .fock_core import FockWeight, MixedVector, WeightLike, as_weight
from .operators import TruncatedOperator
from .symbols import HarmonicSymbol

__all__ = [
    "QuadratureRule",
    "SampledSymbol",
    "moment",
    "integrate",
    "quad_inner",
    "basis_values",
    "projection_coefficients",
    "build_operator_by_quadrature",
    "singular_value_decay",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Angular count A times a radial rule in u = αr² (weight e^{-u} folded in).

    ``radial_degree`` is the polynomial degree in u integrated exactly, or
    None for composite rules that are only convergent.
    """

    angular: int
    nodes: np.ndarray
    weights: np.ndarray
    radial_degree: int | None = None

    @classmethod
    def gauss_laguerre(cls, angular: int, radial: int) -> "QuadratureRule":
        x, wts = roots_laguerre(radial)
        return cls(int(angular), np.asarray(x), np.asarray(wts), 2 * radial - 1)

    @classmethod
    def for_degree(cls, maxdeg: int) -> "QuadratureRule":
        """Exact for z^p z̄^q with p + q <= 2·maxdeg."""
        maxdeg = max(int(maxdeg), 1)
        return cls.gauss_laguerre(2 * maxdeg + 1, maxdeg // 2 + 1)

    @classmethod
    def with_breaks(
        cls, u_breaks: Sequence[float], angular: int = 128, panel: int = 48, tail: int = 64
    ) -> "QuadratureRule":
        edges = [0.0, *sorted(float(b) for b in u_breaks if b > 0)]
        xs, ws = [], []
        g, gw = roots_legendre(panel)
        for lo, hi in zip(edges[:-1], edges[1:]):
            u = 0.5 * (hi - lo) * g + 0.5 * (hi + lo)
            xs.append(u)
            ws.append(0.5 * (hi - lo) * gw * np.exp(-u))
        t, tw = roots_laguerre(tail)
        xs.append(t + edges[-1])
        ws.append(tw * math.exp(-edges[-1]))
        return cls(int(angular), np.concatenate(xs), np.concatenate(ws), None)

    def refined(self) -> "QuadratureRule":
        """Twice the angular and radial node counts (Laguerre rules only)."""
        if self.radial_degree is None:
            raise ValueError("refinement is defined for pure Gauss-Laguerre rules")
        return QuadratureRule.gauss_laguerre(2 * self.angular, 2 * len(self.nodes))

    def grid(self, w: WeightLike) -> tuple[np.ndarray, np.ndarray]:
        """Points z (A×D) and matching weights summing to 1."""
        w = as_weight(w)
        theta = 2 * np.pi * np.arange(self.angular) / self.angular
        r = np.sqrt(self.nodes / w.alpha)
        z = r[None, :] * np.exp(1j * theta)[:, None]
        wts = np.broadcast_to(self.weights[None, :] / self.angular, z.shape)
        return z, wts

    def check_monomial(self, p: int, q: int) -> None:
        if p != q and abs(p - q) >= self.angular:
            raise QuadratureDegreeError(f"angular frequency {p - q} needs more than {self.angular} angles")
        if p == q and self.radial_degree is not None and p > self.radial_degree:
            raise QuadratureDegreeError(f"radial degree {p} exceeds rule exactness {self.radial_degree}")


@dataclass(frozen=True)
class SampledSymbol:
    """A symbol known only through pointwise evaluation.

    ``radial_breaks`` lists radii where the symbol jumps; quadrature rules
    built for it put panel edges there.
    """

    func: Callable[[np.ndarray], np.ndarray]
    sup_bound: float | None = None
    radial_breaks: tuple[float, ...] = ()
    name: str = "sampled"

    def __call__(self, z):
        return np.asarray(self.func(np.asarray(z, dtype=complex)), dtype=complex)

    @classmethod
    def from_harmonic(cls, phi: HarmonicSymbol) -> "SampledSymbol":
        bound = abs(phi.a(0)) if phi.is_constant else None
        return cls(phi.evaluate, bound, (), f"harmonic:{phi}")

    @classmethod
    def disk_indicator(cls, radius: float = 1.0) -> "SampledSymbol":
        return cls(lambda z: (np.abs(z) <= radius).astype(complex), 1.0, (float(radius),), f"1_{{|z|<={radius}}}")

    def rule(self, w: WeightLike, angular: int = 128) -> QuadratureRule:
        a = as_weight(w).alpha
        return QuadratureRule.with_breaks([a * r * r for r in self.radial_breaks], angular=angular)


def moment(p: int, q: int, w: WeightLike) -> complex:
    """∫ z^p z̄^q dλ_α = δ_pq p!/α^p, from exact integer factorials."""
    if p < 0 or q < 0:
        raise ValueError("exponents must be non-negative")
    if p != q:
        return 0j
    return complex(math.factorial(p) / as_weight(w).alpha ** p)


def integrate(F: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule, w: WeightLike) -> complex:
    """Numeric ∫ F dλ_α for a vectorised callable F."""
    z, wts = rule.grid(w)
    return complex(np.sum(np.asarray(F(z)) * wts))


def _check_product(f: MixedVector, g: MixedVector, rule: QuadratureRule) -> None:
    for (p, q) in f.terms:
        for (r, s) in g.terms:
            rule.check_monomial(p + s, q + r)


def quad_inner(f, g, rule: QuadratureRule, w: WeightLike | None = None) -> complex:
    """⟨f, g⟩ = ∫ f ḡ dλ_α by quadrature.

    f and g are MixedVectors (degree checked against the rule) or
    vectorised callables such as :class:`SampledSymbol`.
    """
    if w is None:
        w = next((x.weight for x in (f, g) if isinstance(x, MixedVector)), FockWeight())
    if isinstance(f, MixedVector) and isinstance(g, MixedVector):
        _check_product(f, g, rule)
    fe = f.evaluate if isinstance(f, MixedVector) else f
    ge = g.evaluate if isinstance(g, MixedVector) else g
    return integrate(lambda z: fe(z) * np.conj(ge(z)), rule, w)


def basis_values(n: int, z: np.ndarray, w: WeightLike, conjugate: bool = False) -> np.ndarray:
    """e_n(z) = sqrt(αⁿ/n!) zⁿ on a grid of non-zero points (or its conjugate)."""
    a = as_weight(w).alpha
    r = np.abs(z)
    with np.errstate(divide="ignore"):
        log_mag = 0.5 * (n * math.log(a) - math.lgamma(n + 1)) + n * np.log(r)
    mag = np.where(r == 0, 1.0 if n == 0 else 0.0, np.exp(log_mag))
    phase = np.exp((-1j if conjugate else 1j) * n * np.angle(z))
    return mag * phase


def _image_values(image: str, n: int, z: np.ndarray, w: WeightLike) -> np.ndarray:
    if image == "identity":
        return basis_values(n, z, w)
    if image == "flip":
        return basis_values(n + 1, z, w, conjugate=True)
    if image == "dilation":
        if n % 2 == 0:
            return basis_values(n // 2, z, w)
        return basis_values((n + 1) // 2, z, w, conjugate=True)
    raise ValueError(f"unknown basis image {image!r}")


def projection_coefficients(v: MixedVector, size: int, rule: QuadratureRule) -> np.ndarray:
    """⟨v, e_m⟩ for m < size by quadrature: the coefficients of P v."""
    z, wts = rule.grid(v.weight)
    vals = v.evaluate(z)
    return np.array([np.sum(vals * basis_values(m, z, v.weight, conjugate=True) * wts) for m in range(size)])


def build_operator_by_quadrature(
    phi,
    N: int,
    rule: QuadratureRule | None = None,
    w: WeightLike = 1.0,
    cols: int | None = None,
    image: str = "identity",
) -> TruncatedOperator:
    """Block with entries ⟨φ · image(e_n), e_m⟩ computed by quadrature.

    ``image`` selects the basis image: "identity" gives T_φ, "flip" gives
    H_φ (J e_n = conj(e_{n+1})) and "dilation" gives S_φ (K e_n).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    w = as_weight(w)
    cols = N if cols is None else cols
    if isinstance(phi, HarmonicSymbol):
        if rule is None:
            deg = max(phi.d_a, phi.d_b, 0) + N + cols + 2
            rule = QuadratureRule.for_degree(deg)
        phi = SampledSymbol.from_harmonic(phi)
    elif rule is None:
        rule = phi.rule(w)
    z, wts = rule.grid(w)
    weighted = phi(z) * wts
    rows_conj = np.stack([basis_values(m, z, w, conjugate=True) for m in range(N)])
    imgs = np.stack([_image_values(image, n, z, w) for n in range(cols)])
    entries = np.einsum("mab,nab->mn", rows_conj, imgs * weighted[None])
    return TruncatedOperator(entries, "generic", w)


def singular_value_decay(A: TruncatedOperator, k: int) -> list[float]:
    """Top-k singular values, non-increasing."""
    if A.rows != A.cols:
        raise ValueError("singular_value_decay expects a square block")
    if not 0 <= k <= A.rows:
        raise ValueError(f"k must lie in [0, {A.rows}]")
    s = np.linalg.svd(A.entries, compute_uv=False)
    return [float(x) for x in s[:k]]
