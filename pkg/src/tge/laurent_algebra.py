"""Vertex-localized Laurent polynomials over exact Gaussian rationals.

Each polynomial lives on a single named vertex circle and is a finite sum
c_n z^n with Gaussian-rational coefficients (pairs of Fractions).  The
three structural maps are:

  adjoint            z^n -> conj(c) z^{-n}
  substitute_power   z^n -> z^{m n}          (precompose with z -> z^m)
  transfer           z^n -> p z^{n/p} or 0   (sum over the p preimages
                                              of z -> z^p)

transfer(substitute_power(f, p) * g, p) == f * transfer(g, p) holds
exactly, which is the conditional-expectation identity the bimodule layer
relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex rational re + im*i."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, re, im=0) -> "GaussianRational":
        return cls(_as_fraction(re), _as_fraction(im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def scale(self, c) -> "GaussianRational":
        c = _as_fraction(c)
        return GaussianRational(self.re * c, self.im * c)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{mag}i"
        return f"({self.re}{sign}{imag})"


GR_ZERO = GaussianRational()
GR_ONE = GaussianRational(Fraction(1))


def _coerce_coeff(c) -> GaussianRational:
    if isinstance(c, GaussianRational):
        return c
    return GaussianRational(_as_fraction(c))


@dataclass(frozen=True)
class LaurentPoly:
    """Finite Laurent polynomial attached to one vertex circle.

    terms are (exponent, coefficient) pairs, strictly increasing in
    exponent, with no zero coefficients.  Mixing vertices in add/mul is an
    error: functions on different circles have no common domain.
    """

    vertex: str
    terms: tuple[tuple[int, GaussianRational], ...] = ()

    @classmethod
    def from_dict(cls, vertex: str, coeffs: dict) -> "LaurentPoly":
        items = []
        for n, c in coeffs.items():
            c = _coerce_coeff(c)
            if c:
                items.append((int(n), c))
        items.sort(key=lambda t: t[0])
        return cls(vertex, tuple(items))

    @classmethod
    def zero(cls, vertex: str) -> "LaurentPoly":
        return cls(vertex, ())

    @classmethod
    def one(cls, vertex: str) -> "LaurentPoly":
        return cls.monomial(vertex, 0)

    @classmethod
    def generator(cls, vertex: str) -> "LaurentPoly":
        """The coordinate function z on the given vertex circle."""
        return cls.monomial(vertex, 1)

    @classmethod
    def monomial(cls, vertex: str, exponent: int, coeff=GR_ONE) -> "LaurentPoly":
        c = _coerce_coeff(coeff)
        if not c:
            return cls(vertex, ())
        return cls(vertex, ((exponent, c),))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exponent: int) -> GaussianRational:
        for n, c in self.terms:
            if n == exponent:
                return c
        return GR_ZERO

    def _check_vertex(self, other: "LaurentPoly") -> None:
        if self.vertex != other.vertex:
            raise ValueError(f"vertex mismatch: {self.vertex!r} vs {other.vertex!r}")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_vertex(other)
        coeffs: dict[int, GaussianRational] = dict(self.terms)
        for n, c in other.terms:
            coeffs[n] = coeffs.get(n, GR_ZERO) + c
        return LaurentPoly.from_dict(self.vertex, coeffs)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + other.scale(-1)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_vertex(other)
        coeffs: dict[int, GaussianRational] = {}
        for n, c in self.terms:
            for m, d in other.terms:
                k = n + m
                coeffs[k] = coeffs.get(k, GR_ZERO) + c * d
        return LaurentPoly.from_dict(self.vertex, coeffs)

    def scale(self, c) -> "LaurentPoly":
        c = _coerce_coeff(c)
        if not c:
            return LaurentPoly.zero(self.vertex)
        return LaurentPoly(self.vertex, tuple((n, cc * c) for n, cc in self.terms))

    def adjoint(self) -> "LaurentPoly":
        """Pointwise complex conjugate: z^n -> conj(c) z^{-n}."""
        return LaurentPoly(
            self.vertex,
            tuple(sorted(((-n, c.conjugate()) for n, c in self.terms), key=lambda t: t[0])),
        )

    def substitute_power(self, m: int) -> "LaurentPoly":
        """Precompose with z -> z^m (m != 0): z^n -> z^{m n}."""
        if m == 0:
            raise ValueError("substitution power must be nonzero")
        return LaurentPoly(
            self.vertex,
            tuple(sorted(((m * n, c) for n, c in self.terms), key=lambda t: t[0])),
        )

    def transfer(self, p: int) -> "LaurentPoly":
        """Sum over the p preimages of z -> z^p: z^n -> p z^{n/p} if p | n, else 0."""
        if p < 1:
            raise ValueError(f"transfer degree must be >= 1, got {p}")
        kept = [(n // p, c.scale(p)) for n, c in self.terms if n % p == 0]
        return LaurentPoly(self.vertex, tuple(kept))

    def with_vertex(self, vertex: str) -> "LaurentPoly":
        """Reinterpret the same coefficient data on another circle."""
        return LaurentPoly(vertex, self.terms)

    def evaluate(self, z: complex) -> complex:
        return sum((c.to_complex() * z**n for n, c in self.terms), 0j)

    def __str__(self) -> str:
        return self.render("u")

    def render(self, var: str = "u") -> str:
        """Terms as c*u^n joined by ' + ', ascending exponent; '0' when empty."""
        if not self.terms:
            return "0"
        parts = []
        for n, c in self.terms:
            if n == 0:
                parts.append(str(c))
                continue
            head = var if n == 1 else f"{var}^{n}"
            if c == GR_ONE:
                parts.append(head)
            elif c == GaussianRational(Fraction(-1)):
                parts.append(f"-{head}")
            else:
                parts.append(f"{c}*{head}")
        return " + ".join(parts)
