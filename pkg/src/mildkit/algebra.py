"""Exact arithmetic kernel: F_p contexts, weighted monomials, sparse
noncommutative polynomials, and truncated integer power series with the
first-nonzero-coefficient total order used for Poincaré series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ContextMismatchError

# Coefficient moduli stay machine-sized; rank computations assume this.
MAX_MODULUS = 1 << 16

#: Valuation of the zero polynomial.
INFINITY = math.inf

LESS = "less"
EQUAL_TO_CUTOFF = "equal-to-cutoff"
GREATER = "greater"


def is_prime(n: int) -> bool:
    """Trial division; inputs are desk-scale by design."""
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def check_weights(tau) -> tuple[int, ...]:
    """Validate a generator weight vector (every entry >= 1)."""
    tau = tuple(int(t) for t in tau)
    if not tau:
        raise ValueError("weight vector must be nonempty")
    if any(t < 1 for t in tau):
        raise ValueError(f"weights must be positive integers, got {tau}")
    return tau


class Context:
    """Ambient data for polynomial arithmetic: prime modulus p, number of
    generators d, and the weight vector tau assigning deg X_i = tau_i.

    Instances are immutable and compare by value; all polynomial
    operations require equal contexts on both operands.
    """

    __slots__ = ("p", "d", "tau")

    def __init__(self, p: int, d: int, tau=None):
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if p > MAX_MODULUS:
            raise ValueError(f"modulus {p} exceeds the supported bound {MAX_MODULUS}")
        if d < 1:
            raise ValueError("need at least one generator")
        if tau is None:
            tau = (1,) * d
        tau = check_weights(tau)
        if len(tau) != d:
            raise ValueError(f"expected {d} weights, got {len(tau)}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "tau", tau)

    def __setattr__(self, name, value):
        raise AttributeError("Context is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Context)
            and self.p == other.p
            and self.d == other.d
            and self.tau == other.tau
        )

    def __hash__(self):
        return hash((self.p, self.d, self.tau))

    def __repr__(self):
        return f"Context(p={self.p}, d={self.d}, tau={self.tau})"

    def unweighted(self) -> Context:
        """The same (p, d) with all weights 1."""
        return Context(self.p, self.d)

    def deg(self, letters) -> int:
        return sum(self.tau[i - 1] for i in letters)

    def monomial(self, letters) -> Monomial:
        letters = tuple(letters)
        for i in letters:
            if not 1 <= i <= self.d:
                raise ValueError(f"generator index {i} out of range 1..{self.d}")
        return Monomial(letters, self.deg(letters))

    def one_monomial(self) -> Monomial:
        return Monomial((), 0)

    # -- polynomial constructors -------------------------------------------

    def poly(self, items) -> Poly:
        """Build a polynomial from (letters, coefficient) pairs."""
        terms: dict[Monomial, int] = {}
        for letters, c in items:
            m = letters if isinstance(letters, Monomial) else self.monomial(letters)
            terms[m] = (terms.get(m, 0) + c) % self.p
        return Poly(self, {m: c for m, c in terms.items() if c})

    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return Poly(self, {self.one_monomial(): 1 % self.p})

    def gen(self, i: int) -> Poly:
        return self.poly([((i,), 1)])


@dataclass(frozen=True, slots=True)
class Monomial:
    """A word over generator indices with its weighted degree cached.

    The cached degree makes concatenation weight-free: degrees add.  The
    empty word is the monomial 1 (degree 0).
    """

    letters: tuple[int, ...]
    tau_degree: int

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(self.letters + other.letters, self.tau_degree + other.tau_degree)

    def __len__(self):
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    @property
    def sort_key(self):
        """Canonical container key: (degree, length, letters). Storage order
        only; semantic comparisons live in the orders module."""
        return (self.tau_degree, len(self.letters), self.letters)

    def format(self, names=None) -> str:
        if not self.letters:
            return "1"
        parts = []
        run_letter, run = self.letters[0], 1
        for i in self.letters[1:]:
            if i == run_letter:
                run += 1
            else:
                parts.append((run_letter, run))
                run_letter, run = i, 1
        parts.append((run_letter, run))
        out = []
        for letter, mult in parts:
            name = names[letter - 1] if names else f"X{letter}"
            out.append(name if mult == 1 else f"{name}^{mult}")
        return "*".join(out)

    def __repr__(self):
        return f"Monomial({self.format()})"


class Poly:
    """Sparse noncommutative polynomial over F_p: a map monomial -> nonzero
    coefficient in [1, p).  Immutable after construction.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: dict[Monomial, int]):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def _check(self, other: Poly):
        if self.ctx != other.ctx:
            raise ContextMismatchError(f"{self.ctx} vs {other.ctx}")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def __add__(self, other: Poly) -> Poly:
        self._check(other)
        p = self.ctx.p
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = (terms.get(m, 0) + c) % p
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Poly(self.ctx, terms)

    def __neg__(self) -> Poly:
        p = self.ctx.p
        return Poly(self.ctx, {m: (-c) % p for m, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other) -> Poly:
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        p = self.ctx.p
        terms: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = ma * mb
                v = (terms.get(m, 0) + ca * cb) % p
                if v:
                    terms[m] = v
                else:
                    terms.pop(m, None)
        return Poly(self.ctx, terms)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: int) -> Poly:
        c %= self.ctx.p
        if c == 0:
            return self.ctx.zero()
        return Poly(self.ctx, {m: (c * v) % self.ctx.p for m, v in self.terms.items()})

    def coefficient(self, letters) -> int:
        m = letters if isinstance(letters, Monomial) else self.ctx.monomial(letters)
        return self.terms.get(m, 0)

    def tau_valuation(self):
        """Minimum weighted degree of a term; INFINITY for 0."""
        if not self.terms:
            return INFINITY
        return min(m.tau_degree for m in self.terms)

    def homogeneous_component(self, n: int) -> Poly:
        return Poly(self.ctx, {m: c for m, c in self.terms.items() if m.tau_degree == n})

    def degrees(self) -> list[int]:
        return sorted({m.tau_degree for m in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def truncate(self, cutoff: int) -> Poly:
        return Poly(self.ctx, {m: c for m, c in self.terms.items() if m.tau_degree <= cutoff})

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=lambda m: m.sort_key)

    def format(self, names=None) -> str:
        if not self.terms:
            return "0"
        out = []
        for m in self.monomials():
            c = self.terms[m]
            if m.is_identity:
                out.append(str(c))
            elif c == 1:
                out.append(m.format(names))
            else:
                out.append(f"{c}*{m.format(names)}")
        return " + ".join(out)

    def __repr__(self):
        return f"Poly({self.format()} mod {self.ctx.p})"


def mul_truncated(a: Poly, b: Poly, cutoff: int) -> Poly:
    """Product with all terms of weighted degree > cutoff dropped."""
    a._check(b)
    p = a.ctx.p
    terms: dict[Monomial, int] = {}
    for ma, ca in a.terms.items():
        room = cutoff - ma.tau_degree
        for mb, cb in b.terms.items():
            if mb.tau_degree > room:
                continue
            m = ma * mb
            v = (terms.get(m, 0) + ca * cb) % p
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
    return Poly(a.ctx, terms)


@dataclass(frozen=True, slots=True)
class IntSeries:
    """Integer power series c_0 + c_1 t + ... + c_N t^N known up to cutoff N."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def cutoff(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    @classmethod
    def one(cls, cutoff: int) -> IntSeries:
        return cls((1,) + (0,) * cutoff)

    @classmethod
    def from_exponents(cls, exponents, cutoff: int, constant: int = 0) -> IntSeries:
        """Series constant + sum_e t^e for a multiset of exponents <= cutoff."""
        coeffs = [0] * (cutoff + 1)
        coeffs[0] = constant
        for e in exponents:
            if 0 <= e <= cutoff:
                coeffs[e] += 1
        return cls(tuple(coeffs))

    def __add__(self, other: IntSeries) -> IntSeries:
        n = min(self.cutoff, other.cutoff)
        return IntSeries(tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)))

    def __sub__(self, other: IntSeries) -> IntSeries:
        n = min(self.cutoff, other.cutoff)
        return IntSeries(tuple(self.coeffs[i] - other.coeffs[i] for i in range(n + 1)))

    def __mul__(self, other: IntSeries) -> IntSeries:
        """Cauchy product truncated at the smaller cutoff."""
        n = min(self.cutoff, other.cutoff)
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return IntSeries(tuple(out))

    def inverse(self) -> IntSeries:
        """Multiplicative inverse up to the cutoff; requires c_0 in {1, -1}."""
        c0 = self.coeffs[0]
        if c0 not in (1, -1):
            raise ValueError(f"constant coefficient must be +-1 to invert, got {c0}")
        n = self.cutoff
        out = [0] * (n + 1)
        out[0] = c0
        for k in range(1, n + 1):
            acc = sum(self.coeffs[i] * out[k - i] for i in range(1, k + 1))
            out[k] = -c0 * acc
        return IntSeries(tuple(out))

    def truncate(self, cutoff: int) -> IntSeries:
        if cutoff > self.cutoff:
            raise ValueError(f"cannot extend cutoff {self.cutoff} to {cutoff}")
        return IntSeries(self.coeffs[: cutoff + 1])

    def __repr__(self):
        return f"IntSeries({list(self.coeffs)})"


def series_compare(a: IntSeries, b: IntSeries) -> str:
    """Total order on truncated integer series: decided by the sign of the
    first nonzero coefficient of a - b; EQUAL_TO_CUTOFF when all agree.
    Requires equal cutoffs."""
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    for x, y in zip(a.coeffs, b.coeffs):
        if x != y:
            return GREATER if x > y else LESS
    return EQUAL_TO_CUTOFF
