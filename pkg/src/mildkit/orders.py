"""Multiplicative total orders on monomials.

Two families are shipped: weighted degree-lexicographic orders induced by a
permutation of the letters, and the subset orders that additionally count
how many letters fall outside a distinguished subset U and how far right
the out-of-U letters sit.  Both compare weighted degree first, so they are
multiplicative for any weight vector.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import Monomial, check_weights
from .errors import InternalInvariantError, ParseError

LT, EQ, GT = -1, 0, 1


@dataclass(frozen=True)
class OrderStats:
    """Subset-order statistics of a word: l_u counts letters outside U,
    k_u sums the weighted degree of the prefix ending at each such letter."""

    l_u: int
    k_u: int


class MonomialOrder:
    """Base class; subclasses implement compare(a, b) -> {-1, 0, 1}."""

    tau: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.tau)

    def compare(self, a: Monomial, b: Monomial) -> int:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def sort_key(self):
        import functools

        return functools.cmp_to_key(self.compare)

    def _lex(self, a: Monomial, b: Monomial, rank) -> int:
        # Called with deg(a) == deg(b); distinct words of equal weighted
        # degree can never be prefixes of one another, so the first
        # differing position always exists.
        for x, y in zip(a.letters, b.letters):
            if x != y:
                return LT if rank[x] < rank[y] else GT
        if len(a.letters) != len(b.letters):
            raise InternalInvariantError(
                f"equal-degree words {a} and {b} in prefix relation"
            )
        return EQ


class DegLexOrder(MonomialOrder):
    """Weighted degree first, then lexicographic in a letter permutation."""

    def __init__(self, tau, letter_order=None):
        self.tau = check_weights(tau)
        if letter_order is None:
            letter_order = tuple(range(1, self.d + 1))
        self.letter_order = tuple(letter_order)
        if sorted(self.letter_order) != list(range(1, self.d + 1)):
            raise ValueError(f"letter order {letter_order} is not a permutation of 1..{self.d}")
        self.rank = {letter: pos for pos, letter in enumerate(self.letter_order)}

    def compare(self, a: Monomial, b: Monomial) -> int:
        if a.tau_degree != b.tau_degree:
            return LT if a.tau_degree < b.tau_degree else GT
        return self._lex(a, b, self.rank)

    def describe(self) -> str:
        perm = "<".join(f"X{i}" for i in self.letter_order)
        return f"deglex:{perm}"

    def __repr__(self):
        return f"DegLexOrder({self.describe()}, tau={self.tau})"


class UOrder(MonomialOrder):
    """Subset order: weighted degree, then the number of letters outside U,
    then the rightward placement statistic k_u, then lexicographic.

    A word is larger when it has more out-of-U letters and when those
    letters sit further to the right; equivalently U-letters push a word
    down and to the left.
    """

    def __init__(self, u, tau, letter_order=None):
        self.tau = check_weights(tau)
        self.u = frozenset(u)
        if not all(1 <= i <= self.d for i in self.u):
            raise ValueError(f"U = {sorted(self.u)} not a subset of 1..{self.d}")
        if letter_order is None:
            letter_order = tuple(range(1, self.d + 1))
        self.letter_order = tuple(letter_order)
        if sorted(self.letter_order) != list(range(1, self.d + 1)):
            raise ValueError(f"letter order {letter_order} is not a permutation of 1..{self.d}")
        self.rank = {letter: pos for pos, letter in enumerate(self.letter_order)}

    def stats(self, m: Monomial) -> OrderStats:
        l_u = 0
        k_u = 0
        prefix_deg = 0
        for letter in m.letters:
            prefix_deg += self.tau[letter - 1]
            if letter not in self.u:
                l_u += 1
                k_u += prefix_deg
        return OrderStats(l_u, k_u)

    def compare(self, a: Monomial, b: Monomial) -> int:
        if a.tau_degree != b.tau_degree:
            return LT if a.tau_degree < b.tau_degree else GT
        sa, sb = self.stats(a), self.stats(b)
        if sa.l_u != sb.l_u:
            return LT if sa.l_u < sb.l_u else GT
        if sa.k_u != sb.k_u:
            return LT if sa.k_u < sb.k_u else GT
        return self._lex(a, b, self.rank)

    def describe(self) -> str:
        u = ",".join(f"X{i}" for i in sorted(self.u))
        perm = "<".join(f"X{i}" for i in self.letter_order)
        return f"u-order:U={u};{perm}"

    def __repr__(self):
        return f"UOrder({self.describe()}, tau={self.tau})"


def high_term(order: MonomialOrder, a) -> Monomial:
    """The order-maximal monomial of a nonzero polynomial."""
    if a.is_zero:
        raise ValueError("the zero polynomial has no high term")
    best = None
    for m in a.terms:
        if best is None or order.compare(m, best) == GT:
            best = m
    return best


@dataclass
class MultiplicativityReport:
    trials: int
    counterexample: tuple | None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def check_multiplicative(order, trials: int, max_len: int, seed: int) -> MultiplicativityReport:
    """Randomized check of the two multiplicativity axioms: 1 < a for a != 1,
    and a < a' implying b*a*c < b*a'*c.  Reports the first counterexample."""
    rng = random.Random(seed)
    d = order.d
    tau = order.tau

    def rand_word(min_len=0):
        n = rng.randint(min_len, max_len)
        letters = tuple(rng.randint(1, d) for _ in range(n))
        return Monomial(letters, sum(tau[i - 1] for i in letters))

    one = Monomial((), 0)
    for _ in range(trials):
        a = rand_word(min_len=1)
        if order.compare(one, a) != LT:
            return MultiplicativityReport(trials, ("one-minimal", a))
        a2 = rand_word(min_len=1)
        cmp = order.compare(a, a2)
        if cmp == EQ:
            continue
        if cmp == GT:
            a, a2 = a2, a
        b = rand_word()
        c = rand_word()
        if order.compare(b * a * c, b * a2 * c) != LT:
            return MultiplicativityReport(trials, ("translation", a, a2, b, c))
    return MultiplicativityReport(trials, None)


def parse_order_spec(spec: str, names, tau) -> MonomialOrder:
    """Parse CLI order selectors.

    Formats: "deglex", "deglex:x1<x3<x2<x4", "u-order:U=x1,x2",
    "u-order:U=x1,x2;x1<x2<x3".  Generator references use the
    presentation's names.
    """
    index = {name: i + 1 for i, name in enumerate(names)}

    def lookup(token):
        token = token.strip()
        if token not in index:
            raise ParseError(f"unknown generator {token!r} in order spec")
        return index[token]

    def parse_perm(text):
        letters = tuple(lookup(t) for t in text.split("<"))
        if sorted(letters) != list(range(1, len(names) + 1)):
            raise ParseError(f"order spec {text!r} must list every generator exactly once")
        return letters

    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "deglex":
        perm = parse_perm(rest) if rest else None
        return DegLexOrder(tau, perm)
    if kind in ("u-order", "uorder"):
        if not rest.startswith("U="):
            raise ParseError(f"u-order spec must start with 'U=', got {spec!r}")
        u_part, _, perm_part = rest[2:].partition(";")
        u = frozenset(lookup(t) for t in u_part.split(",") if t.strip())
        perm = parse_perm(perm_part) if perm_part else None
        return UOrder(u, tau, perm)
    raise ParseError(f"unknown order kind {kind!r} (expected deglex or u-order)")
