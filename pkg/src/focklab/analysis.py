"""Numerical studies on top of the operator engine.

Commutators of H-Toeplitz blocks, Hilbert–Schmidt partial sums, the
compactness defect ‖(S_φ* − K* P M_φ̄) e_n‖, the dilated kernel
I(z, w) = K(k_z)(w) and the Berezin transform z ↦ ⟨S_φ k_z, k_z⟩.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import UnboundedSymbolError
from .fock_core import (
    FockVector,
    WeightLike,
    as_weight,
    kernel_coeff_array,
    project_mixed_vector,
)
from .operators import (
    MAX_SIZE,
    adjoint,
    apply_htoeplitz_exact,
    build,
    commutator,
    compose,
    dilation_adjoint_apply,
    stable_truncation_size,
)
from .oracle import QuadratureRule, SampledSymbol, integrate
from .symbols import HarmonicSymbol, conjugate, parse

__all__ = [
    "CommutatorReport",
    "DefectSequence",
    "commutator_report",
    "converse_search",
    "noncommuting_example",
    "hs_partial_sum",
    "compactness_defect",
    "defect_sequence",
    "dilated_kernel",
    "berezin_truncation",
    "berezin",
    "berezin_integral",
    "berezin_bound_check",
    "berezin_decay_table",
    "decay_table_csv",
]


def _pair(c: complex) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


# -- commutators -------------------------------------------------------------

@dataclass
class CommutatorReport:
    block: int
    truncation: int
    frobenius: float
    max_entry: float
    max_position: tuple[int, int]
    tolerance: float
    verdict: str
    dependence_ratio: complex | None = None
    dependence_residual: float | None = None

    def to_json(self) -> dict:
        d = asdict(self)
        d["max_position"] = list(self.max_position)
        d["dependence_ratio"] = None if self.dependence_ratio is None else _pair(self.dependence_ratio)
        return d


def _fit_ratio(phi: HarmonicSymbol, psi: HarmonicSymbol) -> tuple[complex | None, float | None]:
    """Least-squares λ with ψ ≈ λφ over the coefficient vectors."""
    keys = sorted({("a", i) for i in (*phi.analytic, *psi.analytic)} | {("b", j) for j in (*phi.anti, *psi.anti)})
    get = lambda s, k: s.a(k[1]) if k[0] == "a" else s.b(k[1])  # noqa: E731
    u = np.array([get(phi, k) for k in keys], dtype=complex)
    v = np.array([get(psi, k) for k in keys], dtype=complex)
    uu = np.vdot(u, u).real
    if uu == 0:
        return None, None
    lam = np.vdot(u, v) / uu
    vv = np.linalg.norm(v)
    resid = float(np.linalg.norm(v - lam * u) / vv) if vv else 0.0
    return complex(lam), resid


def commutator_report(
    phi: HarmonicSymbol, psi: HarmonicSymbol, n0: int, w: WeightLike = 1.0, tol: float = 1e-10
) -> CommutatorReport:
    """[S_φ, S_ψ] restricted to the n0×n0 corner of stable truncations."""
    if n0 < 2:
        raise ValueError("block size must be >= 2")
    w = as_weight(w)
    N = stable_truncation_size([phi, psi], n0, w)
    C = commutator(build("htoeplitz", phi, N, N, w), build("htoeplitz", psi, N, N, w)).entries[:n0, :n0]
    mag = np.abs(C)
    pos = tuple(int(x) for x in np.unravel_index(np.argmax(mag), mag.shape))
    lam, resid = _fit_ratio(phi, psi)
    return CommutatorReport(
        block=n0,
        truncation=N,
        frobenius=float(np.linalg.norm(C)),
        max_entry=float(mag[pos]),
        max_position=pos,
        tolerance=tol,
        verdict="commuting" if mag[pos] <= tol else "non-commuting",
        dependence_ratio=lam,
        dependence_residual=resid,
    )


def converse_search(
    trials: int = 20, max_degree: int = 3, n0: int = 8, seed: int = 0, w: WeightLike = 1.0, tol: float = 1e-10
) -> dict:
    """Look for commuting pairs among random independent analytic symbols.

    Symbols have φ(0) = ψ(0) = 0 and every coefficient of degree 1..d
    non-zero.  Finding none is evidence, not proof.
    """
    rng = np.random.default_rng(seed)
    found = []
    for t in range(trials):
        d = int(rng.integers(1, max_degree + 1))
        mk = lambda: HarmonicSymbol(  # noqa: E731
            {i: complex(*rng.uniform(0.5, 1.5, 2) * rng.choice([-1, 1], 2)) for i in range(1, d + 1)}
        )
        phi, psi = mk(), mk()
        rep = commutator_report(phi, psi, n0, w, tol)
        if rep.verdict == "commuting" and (rep.dependence_residual or 0) > 1e-8:
            found.append({"trial": t, "phi": str(phi), "psi": str(psi), "report": rep.to_json()})
    return {"trials": trials, "counterexamples": found, "counterexample_found": bool(found)}


def noncommuting_example(alpha: float = 1.0) -> dict:
    """S_{z²} and S_{z̄} applied to e_2 in both orders.

    Step 4 (S_{z̄} S_{z²} e_2) is computed from the definitions: K e_3 =
    conj(e_2), and P(z̄ · z̄²) = 0, so the result is 0.  The value
    sqrt(3/α²) e_1 that is sometimes quoted for it is reported alongside
    and flagged.
    """
    w = as_weight(alpha)
    a = w.alpha
    phi, psi = parse("z^2"), parse("conj(z)")
    e2 = FockVector.basis(2, w)

    step1 = apply_htoeplitz_exact(phi, e2)
    step2 = apply_htoeplitz_exact(psi, e2)
    step3 = apply_htoeplitz_exact(phi, step2)
    step4 = apply_htoeplitz_exact(psi, step1)

    N = stable_truncation_size([phi, psi], 4, w)
    Sphi, Spsi = build("htoeplitz", phi, N, N, w), build("htoeplitz", psi, N, N, w)
    step3_block = compose(Sphi, Spsi).column(2)
    step4_block = compose(Spsi, Sphi).column(2)

    expected = {
        "step1": FockVector({3: math.sqrt(a) * math.sqrt(6 / a**3)}, w),  # sqrt(α) z³
        "step2": FockVector({0: 1 / math.sqrt(a)}, w),
        "step3": FockVector({2: math.sqrt(2 / a**3)}, w),
    }
    quoted_step4 = FockVector({1: math.sqrt(3 / a**2)}, w)

    def vec(f: FockVector) -> dict:
        return {str(n): _pair(c) for n, c in f}

    def err(f: FockVector, g: FockVector) -> float:
        idx = set(f.coeffs) | set(g.coeffs)
        return max((abs(f[n] - g[n]) for n in idx), default=0.0)

    return {
        "alpha": a,
        "step1": vec(step1),
        "step2": vec(step2),
        "step3": vec(step3),
        "step3_block": vec(step3_block),
        "step4": vec(step4),
        "step4_block": vec(step4_block),
        "errors": {
            "step1": err(step1, expected["step1"]),
            "step2": err(step2, expected["step2"]),
            "step3": err(step3, expected["step3"]),
            "step3_block": err(step3_block, expected["step3"]),
            "step4_block_vs_exact": err(step4_block, step4),
        },
        "step4_quoted": vec(quoted_step4),
        "step4_discrepancy": err(step4, quoted_step4) > 1e-12,
        "orders_differ": err(step3, step4) > 1e-12,
        "truncation": N,
    }


# -- Hilbert–Schmidt and compactness -----------------------------------------

def hs_partial_sum(phi: HarmonicSymbol, ncols: int, w: WeightLike = 1.0) -> float:
    """Σ_{n<ncols} ‖S_φ e_n‖², every column norm computed exactly."""
    if ncols < 1:
        raise ValueError("ncols must be >= 1")
    w = as_weight(w)
    return float(sum(apply_htoeplitz_exact(phi, FockVector.basis(n, w)).norm_sq() for n in range(ncols)))


@dataclass
class DefectSequence:
    """Defects d_n with the scale ‖S_φ* e_n‖ each was measured against.

    d_n counts as zero when d_n <= tolerance · max(1, scale_n): both routes
    carry rounding of order eps times the entry magnitudes.
    """

    values: list[float]
    scales: list[float]
    truncation: int
    tolerance: float = 1e-12
    vanishes_from: int | None = field(default=None)

    def __post_init__(self):
        if self.vanishes_from is None:
            k = len(self.values)
            while k > 0 and self.is_zero(k - 1):
                k -= 1
            self.vanishes_from = k if k < len(self.values) else None

    def is_zero(self, n: int) -> bool:
        return self.values[n] <= self.tolerance * max(1.0, self.scales[n])

    def to_json(self) -> dict:
        return asdict(self)


def _defect(phi_bar: HarmonicSymbol, Sstar, n: int, w) -> tuple[float, float]:
    lhs = FockVector.from_array(Sstar[:, n], w)
    e_n = FockVector.basis(n, w)
    rhs = dilation_adjoint_apply(project_mixed_vector(phi_bar.to_mixed(w) * e_n.to_mixed()).to_mixed())
    return (lhs - rhs).norm(), lhs.norm()


def compactness_defect(phi: HarmonicSymbol, n: int, w: WeightLike = 1.0) -> float:
    """‖S_φ* e_n − K* P(φ̄ e_n)‖.

    S_φ* e_n is read from the conjugate transpose of a stabilised
    truncation; the second term is computed on mixed polynomials.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    return defect_sequence(phi, n + 1, w).values[n]


def defect_sequence(phi: HarmonicSymbol, count: int, w: WeightLike = 1.0, tol: float = 1e-12) -> DefectSequence:
    """Defects d_0..d_{count-1} from a single stabilised truncation."""
    w = as_weight(w)
    N = stable_truncation_size(phi, count, w)
    Sstar = adjoint(build("htoeplitz", phi, N, N, w)).entries
    phi_bar = conjugate(phi)
    pairs = [_defect(phi_bar, Sstar, n, w) for n in range(count)]
    return DefectSequence([d for d, _ in pairs], [s for _, s in pairs], N, tol)


# -- kernels and the Berezin transform ---------------------------------------

def dilated_kernel(z: complex, w, N: int, weight: WeightLike = 1.0):
    """Partial sum (terms n < N) of I(z, w) = K(k_z)(w).

    I(z,w) = e^{-α|z|²/2} [Σ sqrt(α^{3n}/((2n)! n!)) z̄^{2n} wⁿ
                         + Σ sqrt(α^{3n+2}/((2n+1)! (n+1)!)) z̄^{2n+1} w̄^{n+1}]

    ``w`` may be an array; each term is formed as a single exponential.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    la = as_weight(weight).log_alpha
    alpha = math.exp(la)
    z = complex(z)
    w = np.asarray(w, dtype=complex)
    if z == 0:
        return np.ones_like(w) if w.ndim else complex(1.0)
    n = np.arange(N, dtype=float).reshape((N,) + (1,) * w.ndim)
    lz, tz = math.log(abs(z)), -np.angle(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        lw = np.log(np.abs(w))
        tw = np.angle(w)
        pre = -0.5 * alpha * abs(z) ** 2
        even_log = pre + 0.5 * (3 * n * la - gammaln(2 * n + 1) - gammaln(n + 1)) + 2 * n * lz + np.where(n == 0, 0.0, n * lw)
        odd_log = pre + 0.5 * ((3 * n + 2) * la - gammaln(2 * n + 2) - gammaln(n + 2)) + (2 * n + 1) * lz + (n + 1) * lw
    even = np.exp(even_log + 1j * (2 * n * tz + n * tw))
    odd = np.exp(odd_log + 1j * ((2 * n + 1) * tz - (n + 1) * tw))
    total = np.sum(even, axis=0) + np.sum(odd, axis=0)
    return complex(total) if w.ndim == 0 else total


def berezin_truncation(z: complex, w: WeightLike = 1.0, tail: float = 1e-24) -> int:
    """Smallest N with Σ_{n>=N} |c_n(z)|² <= tail (a Poisson tail in α|z|²)."""
    x = as_weight(w).alpha * abs(complex(z)) ** 2
    if x == 0:
        return 1
    N = max(1, int(x))
    while gammainc(N, x) > tail:
        N += 1
        if N > MAX_SIZE:
            raise ValueError(f"|z| = {abs(z)} needs more than {MAX_SIZE} kernel terms")
    return N


def berezin(phi: HarmonicSymbol, z: complex, w: WeightLike = 1.0, N: int | None = None) -> complex:
    """⟨S_φ k_z, k_z⟩ = c(z)* M c(z) with M the N×N H-Toeplitz block."""
    w = as_weight(w)
    N = berezin_truncation(z, w) if N is None else N
    c = kernel_coeff_array(z, N, w)
    M = build("htoeplitz", phi, N, N, w).entries
    return complex(np.vdot(c, M @ c))


def berezin_integral(
    phi, z: complex, w: WeightLike = 1.0, rule: QuadratureRule | None = None, n_terms: int | None = None
) -> complex:
    """Berezin transform through its integral representation.

    ∫ φ(u) I(z, u) conj(k_z(u)) dλ_α(u), with conj(k_z(u)) =
    e^{-α|z|²/2} e^{α z ū}, evaluated by quadrature.
    """
    w = as_weight(w)
    z = complex(z)
    if isinstance(phi, HarmonicSymbol):
        phi = SampledSymbol.from_harmonic(phi)
    if n_terms is None:
        n_terms = berezin_truncation(z, w) // 2 + 8
    if rule is None:
        rule = phi.rule(w, angular=256) if phi.radial_breaks else QuadratureRule.gauss_laguerre(256, 128)
    a = w.alpha
    pre = -0.5 * a * abs(z) ** 2

    def integrand(u):
        return phi(u) * dilated_kernel(z, u, n_terms, w) * np.exp(pre + a * z * np.conj(u))

    return integrate(integrand, rule, w)


def berezin_bound_check(symbol, samples, w: WeightLike = 1.0, tol: float = 1e-8) -> dict:
    """Check max |S̃_ψ(z)| over samples against ‖ψ‖_∞.

    Constants use the series route; a :class:`SampledSymbol` with a declared
    sup bound uses the integral representation.  Non-constant polynomial
    symbols are rejected since they are unbounded on ℂ.
    """
    w = as_weight(w)
    samples = [complex(s) for s in samples]
    if isinstance(symbol, HarmonicSymbol):
        if not symbol.is_constant:
            raise UnboundedSymbolError(
                f"{symbol} is a non-constant polynomial and therefore unbounded on C; "
                "pass a constant or a SampledSymbol with a sup bound"
            )
        bound = abs(symbol.a(0))
        values = [berezin(symbol, s, w) for s in samples]
        route = "series"
    else:
        if symbol.sup_bound is None:
            raise UnboundedSymbolError(f"sampled symbol {symbol.name!r} declares no sup bound")
        bound = float(symbol.sup_bound)
        values = [berezin_integral(symbol, s, w) for s in samples]
        route = "quadrature"
    mags = [abs(v) for v in values]
    sup = max(mags, default=0.0)
    return {
        "route": route,
        "bound": bound,
        "sup_sampled": sup,
        "tolerance": tol,
        "passed": sup <= bound + tol,
        "samples": [_pair(s) for s in samples],
        "values": [_pair(v) for v in values],
    }


def berezin_decay_table(phi: HarmonicSymbol, radii, w: WeightLike = 1.0, angle: float = 0.0) -> list[tuple[float, complex]]:
    rot = complex(math.cos(angle), math.sin(angle))
    return [(float(r), berezin(phi, r * rot, w)) for r in radii]


def decay_table_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["radius", "re", "im", "abs"])
    for r, v in rows:
        writer.writerow([f"{r:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}", f"{abs(v):.17g}"])
    return buf.getvalue()
