"""Harmonic polynomial symbols φ(z) = Σ a_i zⁱ + Σ b_j z̄ʲ.

Only polynomial symbols are represented here.  Note that a non-constant
harmonic polynomial is unbounded on ℂ, so statements that need
φ ∈ L^∞ (operator norm bounds, the Berezin bound) only apply to constants;
general bounded symbols go through :class:`focklab.oracle.SampledSymbol`.
Truncated matrices of polynomial symbols are always well defined.

Text grammar (whitespace ignored)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := coeff ['*' factor] | factor
    factor := 'z' ['^' int] | 'conj(z)' ['^' int]
    coeff  := real | real 'i' | 'i' | '(' real ('+'|'-') real 'i' ')'

``conj(z)^0`` is rejected; write the constant instead.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .fock_core import MixedVector, as_weight

__all__ = [
    "HarmonicSymbol",
    "SymbolSyntaxError",
    "parse",
    "render",
    "conjugate",
    "scale_add",
    "symbol_to_json",
    "symbol_from_json",
]


class SymbolSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.text = text


def _clean(mapping: Mapping[int, complex]) -> dict[int, complex]:
    return {int(k): complex(v) for k, v in sorted(mapping.items()) if complex(v) != 0}


@dataclass(frozen=True)
class HarmonicSymbol:
    """Coefficient maps for the analytic part (i ≥ 0) and anti-analytic part (j ≥ 1)."""

    analytic: Mapping[int, complex] = field(default_factory=dict)
    anti: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if any(int(i) != i or i < 0 for i in self.analytic):
            raise ValueError("analytic exponents must be non-negative integers")
        if any(int(j) != j or j < 1 for j in self.anti):
            raise ValueError("anti-analytic exponents must be integers >= 1")
        object.__setattr__(self, "analytic", _clean(self.analytic))
        object.__setattr__(self, "anti", _clean(self.anti))

    @classmethod
    def constant(cls, c: complex) -> "HarmonicSymbol":
        return cls({0: c})

    @property
    def d_a(self) -> int:
        return max(self.analytic, default=-1)

    @property
    def d_b(self) -> int:
        return max(self.anti, default=-1)

    @property
    def is_zero(self) -> bool:
        return not self.analytic and not self.anti

    @property
    def is_constant(self) -> bool:
        return not self.anti and all(i == 0 for i in self.analytic)

    def a(self, i: int) -> complex:
        return self.analytic.get(i, 0j)

    def b(self, j: int) -> complex:
        return self.anti.get(j, 0j)

    def max_abs_coeff(self) -> float:
        vals = [abs(c) for c in (*self.analytic.values(), *self.anti.values())]
        return max(vals, default=0.0)

    def to_mixed(self, w=1.0) -> MixedVector:
        terms = {(i, 0): c for i, c in self.analytic.items()}
        terms.update({(0, j): c for j, c in self.anti.items()})
        return MixedVector(terms, as_weight(w))

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for i, c in self.analytic.items():
            out = out + c * z**i
        zc = np.conj(z)
        for j, c in self.anti.items():
            out = out + c * zc**j
        return out

    def __str__(self):
        return render(self)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<conj>conj\s*\(\s*z\s*\))
  | (?P<z>z)
  | (?P<imag>[ij])
  | (?P<op>[-+*^()])
  | (?P<ws>\s+)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SymbolSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message: str):
        raise SymbolSyntaxError(message, self.tok[2], self.text)

    def accept(self, kind: str, value: str | None = None) -> str | None:
        k, v, _ = self.tok
        if k == kind and (value is None or v == value):
            self.i += 1
            return v
        return None

    def expect(self, kind: str, value: str | None = None, what: str = "") -> str:
        v = self.accept(kind, value)
        if v is None:
            self.error(f"expected {what or value or kind}")
        return v

    def parse(self) -> HarmonicSymbol:
        analytic: dict[int, complex] = {}
        anti: dict[int, complex] = {}
        sign = -1 if self.accept("op", "-") else 1
        if sign == 1:
            self.accept("op", "+")
        while True:
            coeff, kind, k = self.term()
            coeff *= sign
            if kind == "anti":
                anti[k] = anti.get(k, 0j) + coeff
            else:
                analytic[k] = analytic.get(k, 0j) + coeff
            if self.accept("op", "+"):
                sign = 1
            elif self.accept("op", "-"):
                sign = -1
            elif self.tok[0] == "end":
                break
            else:
                self.error(f"unexpected {self.tok[1]!r}")
        return HarmonicSymbol(analytic, anti)

    def term(self) -> tuple[complex, str, int]:
        coeff = self.coeff()
        if coeff is None:
            return (1.0 + 0j, *self.factor())
        if self.accept("op", "*"):
            return (coeff, *self.factor())
        if self.tok[0] in ("z", "conj"):
            self.error("expected '*' between coefficient and variable")
        return coeff, "analytic", 0

    def real(self) -> float | None:
        v = self.accept("num")
        return None if v is None else float(v)

    def coeff(self) -> complex | None:
        if self.accept("imag"):
            return 1j
        if self.tok[0] == "op" and self.tok[1] == "(":
            self.i += 1
            return self.paren_complex()
        x = self.real()
        if x is None:
            return None
        if self.accept("imag"):
            return complex(0, x)
        return complex(x)

    def paren_complex(self) -> complex:
        neg = -1 if self.accept("op", "-") else 1
        if neg == 1:
            self.accept("op", "+")
        x = self.real()
        if x is None:
            if self.accept("imag"):
                self.expect("op", ")")
                return complex(0, neg)
            self.error("expected number")
        x *= neg
        if self.accept("imag"):
            self.expect("op", ")")
            return complex(0, x)
        total = complex(x)
        if self.tok[0] == "op" and self.tok[1] in "+-":
            s = 1 if self.tok[1] == "+" else -1
            self.i += 1
            y = self.real()
            y = 1.0 if y is None else y
            self.expect("imag", what="imaginary unit 'i'")
            total += complex(0, s * y)
        self.expect("op", ")")
        return total

    def exponent(self) -> int:
        if not self.accept("op", "^"):
            return 1
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.error("negative exponent")
        pos = self.tok[2]
        v = self.expect("num", what="integer exponent")
        if not v.isdigit():
            raise SymbolSyntaxError("exponent must be a non-negative integer", pos, self.text)
        return int(v)

    def factor(self) -> tuple[str, int]:
        if self.accept("z"):
            return "analytic", self.exponent()
        if self.tok[0] == "conj":
            pos = self.tok[2]
            self.i += 1
            k = self.exponent()
            if k == 0:
                raise SymbolSyntaxError("conj(z)^0 is not allowed; fold it into the constant", pos, self.text)
            return "anti", k
        self.error("expected 'z' or 'conj(z)'")


def parse(text: str) -> HarmonicSymbol:
    """Parse a symbol expression such as ``"5*z+9*z^2+conj(z)^3"``."""
    return _Parser(text).parse()


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    return f"({c.real!r}{'+' if c.imag >= 0 else '-'}{abs(c.imag)!r}i)"


def render(phi: HarmonicSymbol) -> str:
    """Canonical text: constant, analytic terms, then anti-analytic, by increasing degree."""
    parts = []
    for i, c in phi.analytic.items():
        parts.append((c, "" if i == 0 else f"z^{i}"))
    for j, c in phi.anti.items():
        parts.append((c, f"conj(z)^{j}"))
    if not parts:
        return "0"
    out = []
    for k, (c, var) in enumerate(parts):
        neg = c.imag == 0 and c.real < 0
        body = _fmt_coeff(-c if neg else c) + (f"*{var}" if var else "")
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# -- algebra -----------------------------------------------------------------

def conjugate(phi: HarmonicSymbol) -> HarmonicSymbol:
    """The symbol of z ↦ conj(φ(z)); analytic and anti-analytic parts swap."""
    analytic = {j: c.conjugate() for j, c in phi.anti.items()}
    anti = {}
    for i, c in phi.analytic.items():
        if i == 0:
            analytic[0] = c.conjugate()
        else:
            anti[i] = c.conjugate()
    return HarmonicSymbol(analytic, anti)


def scale_add(phi: HarmonicSymbol, psi: HarmonicSymbol, a: complex = 1, b: complex = 1) -> HarmonicSymbol:
    """Coefficient-wise a·φ + b·ψ."""
    analytic = {i: a * phi.a(i) + b * psi.a(i) for i in set(phi.analytic) | set(psi.analytic)}
    anti = {j: a * phi.b(j) + b * psi.b(j) for j in set(phi.anti) | set(psi.anti)}
    return HarmonicSymbol(analytic, anti)


# -- JSON --------------------------------------------------------------------

def symbol_to_json(phi: HarmonicSymbol) -> dict:
    return {
        "analytic": [[i, c.real, c.imag] for i, c in phi.analytic.items()],
        "anti": [[j, c.real, c.imag] for j, c in phi.anti.items()],
    }


def symbol_from_json(data: dict | str) -> HarmonicSymbol:
    if isinstance(data, str):
        data = json.loads(data)
    return HarmonicSymbol(
        {int(i): complex(re, im) for i, re, im in data.get("analytic", [])},
        {int(j): complex(re, im) for j, re, im in data.get("anti", [])},
    )
