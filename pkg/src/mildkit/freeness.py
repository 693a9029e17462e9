"""Strong-freeness engines.

Three routes are provided and kept independent:

* combinatorial freeness of monomial sequences (no submonomial, no
  prefix/suffix overlap), which for monomials is equivalent to strong
  freeness;
* the high-term criterion: extract the order-maximal monomials under a
  multiplicative order and test those for combinatorial freeness — a
  one-directional proof, never a refutation;
* the graded Hilbert-series oracle: exact F_p dimension counts of the
  quotient by the two-sided ideal, compared degreewise against the
  extremal series 1/(1 - sum t^tau_i + sum t^sigma_j).

The defect series (actual minus extremal, as detected by multiplying with
the denominator) is coefficientwise nonnegative for every input, so a
positive coefficient refutes strong freeness definitively and a negative
one can only mean an implementation bug; the oracle aborts on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Context, IntSeries, Monomial, check_weights
from .errors import InternalInvariantError
from .linalg import RowReducer, check_budget

PROVEN = "proven-strongly-free"
REFUTED = "refuted"
CONSISTENT = "consistent-to-degree"

ADMISSIBLE = "admissible"
INADMISSIBLE = "inadmissible"


# ---------------------------------------------------------------------------
# combinatorial freeness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OverlapWitness:
    """Why a monomial sequence fails combinatorial freeness.

    kind "submonomial": rho_i occurs inside rho_j starting at offset.
    kind "prefix-suffix": the first `length` letters of rho_i equal the
    last `length` letters of rho_j (both proper, nonempty).
    """

    kind: str
    i: int
    j: int
    offset: int
    length: int

    def describe(self) -> str:
        if self.kind == "submonomial":
            return f"rho_{self.i + 1} is a submonomial of rho_{self.j + 1} at offset {self.offset}"
        return (
            f"prefix of rho_{self.i + 1} of length {self.length} equals "
            f"a suffix of rho_{self.j + 1}"
        )


@dataclass(frozen=True)
class CombFreeResult:
    free: bool
    witness: OverlapWitness | None = None

    def __bool__(self):
        return self.free


def combinatorially_free(rhos) -> CombFreeResult:
    """Decide combinatorial freeness of a sequence of monomials.

    Condition (i): no rho_i is a contiguous subword of rho_j for i != j
    (duplicates fail here).  Condition (ii): no proper nonempty prefix of
    any rho_i equals a proper nonempty suffix of any rho_j, i = j allowed.
    Independent of the weights and of the ordering of the sequence.
    """
    words = []
    for r in rhos:
        letters = r.letters if isinstance(r, Monomial) else tuple(r)
        if not letters:
            raise ValueError("combinatorial freeness is undefined for the empty monomial")
        words.append(letters)

    for i, wi in enumerate(words):
        for j, wj in enumerate(words):
            if i != j and len(wi) <= len(wj):
                for off in range(len(wj) - len(wi) + 1):
                    if wj[off : off + len(wi)] == wi:
                        return CombFreeResult(False, OverlapWitness("submonomial", i, j, off, len(wi)))
    for i, wi in enumerate(words):
        for j, wj in enumerate(words):
            for k in range(1, min(len(wi), len(wj))):
                if wi[:k] == wj[len(wj) - k :]:
                    return CombFreeResult(False, OverlapWitness("prefix-suffix", i, j, len(wj) - k, k))
    return CombFreeResult(True)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FreenessCertificate:
    """Names the order and the high terms that witnessed a proof."""

    order: str
    high_terms: tuple[Monomial, ...]

    def as_dict(self, names=None):
        return {
            "order": self.order,
            "high_terms": [m.format(names) for m in self.high_terms],
        }


@dataclass(frozen=True)
class FreenessVerdict:
    status: str
    engine: str
    degree: int | None = None
    at_degree: int | None = None
    witness_coefficient: int | None = None
    certificate: FreenessCertificate | None = None
    detail: str = ""

    @property
    def proven(self) -> bool:
        return self.status == PROVEN

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED

    def as_dict(self, names=None):
        out = {"status": self.status, "engine": self.engine}
        if self.degree is not None:
            out["degree"] = self.degree
        if self.at_degree is not None:
            out["at_degree"] = self.at_degree
        if self.witness_coefficient is not None:
            out["witness_coefficient"] = self.witness_coefficient
        if self.certificate is not None:
            out["certificate"] = self.certificate.as_dict(names)
        if self.detail:
            out["detail"] = self.detail
        return out


def anick_check(rhos, order) -> FreenessVerdict:
    """High-term criterion: if the high terms under a multiplicative order
    are combinatorially free, the sequence is strongly free.  Inconclusive
    otherwise (consistent-to-degree 0); this route never refutes."""
    from .orders import high_term

    highs = []
    for k, rho in enumerate(rhos):
        if rho.is_zero:
            raise ValueError(f"rho_{k + 1} is zero")
        if not rho.is_homogeneous():
            raise ValueError(f"rho_{k + 1} is not homogeneous: degrees {rho.degrees()}")
        highs.append(high_term(order, rho))
    result = combinatorially_free(highs)
    if result.free:
        cert = FreenessCertificate(order.describe(), tuple(highs))
        return FreenessVerdict(PROVEN, "anick", certificate=cert)
    return FreenessVerdict(
        CONSISTENT,
        "anick",
        degree=0,
        detail=f"criterion inconclusive for this order: {result.witness.describe()}",
    )


# ---------------------------------------------------------------------------
# graded quotient dimensions
# ---------------------------------------------------------------------------

def enumerate_basis(ctx: Context, n: int) -> list[Monomial]:
    """All monomials of weighted degree n, in length-lex order."""
    out = []

    def walk(letters, deg):
        if deg == n:
            out.append(Monomial(tuple(letters), n))
            return
        for i in range(1, ctx.d + 1):
            t = ctx.tau[i - 1]
            if deg + t <= n:
                letters.append(i)
                walk(letters, deg + t)
                letters.pop()

    walk([], 0)
    out.sort(key=lambda m: m.sort_key)
    return out


def dimension_series(ctx: Context, N: int) -> IntSeries:
    """Weighted word counts of the free algebra: inverse of 1 - sum t^tau_i."""
    dims = [0] * (N + 1)
    dims[0] = 1
    for n in range(1, N + 1):
        dims[n] = sum(dims[n - t] for t in ctx.tau if n - t >= 0)
    return IntSeries(tuple(dims))


@dataclass
class GradedIdealSlice:
    """Degree-n slice of the two-sided ideal: spanning vectors of all
    alpha * rho_i * beta with matching degree, as rows over the length-lex
    monomial basis of the free algebra in degree n."""

    degree: int
    basis: list[Monomial]
    rows: list[dict[int, int]]


def ideal_slice(ctx: Context, rhos, n: int, budget=None) -> GradedIdealSlice:
    """Literal spanning-set construction; duplicate rows are removed.
    Intended for modest degrees — quotient_dimensions uses an equivalent
    incremental elimination instead."""
    _check_relators(ctx, rhos)
    basis = enumerate_basis(ctx, n)
    index = {m: k for k, m in enumerate(basis)}
    rows = []
    seen = set()
    for rho in rhos:
        sigma = rho.tau_valuation()
        for a in range(0, n - sigma + 1):
            b = n - sigma - a
            for alpha in enumerate_basis(ctx, a):
                for beta in enumerate_basis(ctx, b):
                    row: dict[int, int] = {}
                    for m, c in rho.terms.items():
                        row[index[alpha * m * beta]] = c
                    key = frozenset(row.items())
                    if key not in seen:
                        seen.add(key)
                        rows.append(row)
    check_budget(len(rows), len(basis), budget)
    return GradedIdealSlice(n, basis, rows)


def slice_rank(ctx: Context, slc: GradedIdealSlice) -> int:
    red = RowReducer(ctx.p)
    for row in slc.rows:
        red.add(dict(row))
    return red.rank


def _check_relators(ctx: Context, rhos):
    sigmas = []
    for k, rho in enumerate(rhos):
        if rho.ctx != ctx:
            raise ValueError(f"rho_{k + 1} built over a different context")
        if rho.is_zero:
            raise ValueError(f"rho_{k + 1} is zero")
        if not rho.is_homogeneous():
            raise ValueError(f"rho_{k + 1} is not homogeneous: degrees {rho.degrees()}")
        sigma = rho.tau_valuation()
        if sigma < 1:
            raise ValueError(f"rho_{k + 1} has a constant term")
        sigmas.append(sigma)
    return sigmas


class GradedQuotient:
    """Degreewise dimensions of B = A / (rho_1, ..., rho_m) by exact
    elimination over F_p.

    Degree n of the ideal decomposes as (sum_j R_{n - tau_j} X_j) + the
    span of beta * rho_i over representatives beta of a basis of B in
    degree n - sigma_i; the first part is a direct sum over last letters,
    so only the second needs reducing, over coordinates indexed by the
    quotient bases of the previous degrees.  Per degree this is one
    Gaussian elimination on a (sum_i b_{n-sigma_i}) x (sum_j b_{n-tau_j})
    matrix, which stays desk-scale even where the literal spanning set of
    the slice would not.
    """

    def __init__(self, ctx: Context, rhos, budget=None):
        self.ctx = ctx
        self.rhos = list(rhos)
        self.sigmas = _check_relators(ctx, self.rhos)
        self.budget = budget
        one = ctx.one_monomial()
        self._reps: list[list[Monomial]] = [[one]]
        self._rep_index: list[dict[Monomial, int]] = [{one: 0}]
        # pivot monomial -> combination over same-degree representatives
        self._rewrite: list[dict[Monomial, dict[Monomial, int]]] = [{}]
        self._red_cache: list[dict[Monomial, dict[Monomial, int]]] = [{}]

    def dimension(self, n: int) -> int:
        while len(self._reps) <= n:
            self._extend()
        return len(self._reps[n])

    def dimensions(self, N: int) -> list[int]:
        return [self.dimension(n) for n in range(N + 1)]

    def representatives(self, n: int) -> list[Monomial]:
        self.dimension(n)
        return list(self._reps[n])

    def _reduce(self, m: Monomial) -> dict[Monomial, int]:
        """Image of a monomial in the chosen basis of its degree of B."""
        deg = m.tau_degree
        idx = self._rep_index[deg]
        if m in idx:
            return {m: 1}
        rewrite = self._rewrite[deg]
        if m in rewrite:
            return rewrite[m]
        cache = self._red_cache[deg]
        if m in cache:
            return cache[m]
        # strip the last letter, reduce the prefix, reattach, resolve pivots
        j = m.letters[-1]
        tj = self.ctx.tau[j - 1]
        prefix = Monomial(m.letters[:-1], deg - tj)
        out: dict[Monomial, int] = {}
        p = self.ctx.p
        for beta, c in self._reduce(prefix).items():
            lifted = Monomial(beta.letters + (j,), deg)
            if lifted in idx:
                out[lifted] = (out.get(lifted, 0) + c) % p
            else:
                tail = rewrite.get(lifted)
                if tail is None:
                    raise InternalInvariantError(f"unclassified monomial {lifted}")
                for rep, v in tail.items():
                    out[rep] = (out.get(rep, 0) + c * v) % p
        out = {k: v for k, v in out.items() if v}
        cache[m] = out
        return out

    def _extend(self):
        n = len(self._reps)
        ctx = self.ctx
        p = ctx.p
        # coordinates of A_n modulo sum_j R_{n - tau_j} X_j, one block of
        # B_{n - tau_j} representatives per last letter
        v_monos: list[Monomial] = []
        for j in range(1, ctx.d + 1):
            k = n - ctx.tau[j - 1]
            if k < 0:
                continue
            for beta in self._reps[k]:
                v_monos.append(Monomial(beta.letters + (j,), n))
        v_monos.sort(key=lambda m: m.sort_key)
        col = {m: i for i, m in enumerate(v_monos)}

        nrows = sum(
            len(self._reps[n - sigma]) for sigma in self.sigmas if n - sigma >= 0
        )
        check_budget(nrows, len(v_monos), self.budget)

        red = RowReducer(p)
        for rho, sigma in zip(self.rhos, self.sigmas):
            k = n - sigma
            if k < 0:
                continue
            for beta in self._reps[k]:
                row: dict[int, int] = {}
                for mu, c in rho.terms.items():
                    word = beta.letters + mu.letters
                    j = word[-1]
                    prefix = Monomial(word[:-1], n - ctx.tau[j - 1])
                    for gamma, v in self._reduce(prefix).items():
                        ci = col[Monomial(gamma.letters + (j,), n)]
                        nv = (row.get(ci, 0) + c * v) % p
                        if nv:
                            row[ci] = nv
                        else:
                            row.pop(ci, None)
                red.add(row)
        red.finalize()

        pivot_cols = set(red.pivots)
        reps = [m for i, m in enumerate(v_monos) if i not in pivot_cols]
        rewrite: dict[Monomial, dict[Monomial, int]] = {}
        for lead, prow in red.pivots.items():
            tail = {v_monos[c]: (-v) % p for c, v in prow.items() if c != lead}
            rewrite[v_monos[lead]] = tail
        self._reps.append(reps)
        self._rep_index.append({m: i for i, m in enumerate(reps)})
        self._rewrite.append(rewrite)
        self._red_cache.append({})


def quotient_dimensions(ctx: Context, rhos, N: int, budget=None) -> IntSeries:
    """Dimensions of A/(rhos) in degrees 0..N (equal to dim A_n minus the
    rank of the degree-n ideal slice)."""
    if not rhos:
        return dimension_series(ctx, N)
    q = GradedQuotient(ctx, rhos, budget=budget)
    return IntSeries(tuple(q.dimensions(N)))


# ---------------------------------------------------------------------------
# the series oracle
# ---------------------------------------------------------------------------

def denominator_series(tau, sigmas, N: int) -> IntSeries:
    """1 - (t^tau_1 + ... + t^tau_d) + (t^sigma_1 + ... + t^sigma_m)."""
    tau = check_weights(tau)
    coeffs = [0] * (N + 1)
    coeffs[0] = 1
    for t in tau:
        if t <= N:
            coeffs[t] -= 1
    for s in sigmas:
        if s < 1:
            raise ValueError(f"relator degrees must be >= 1, got {s}")
        if s <= N:
            coeffs[s] += 1
    return IntSeries(tuple(coeffs))


def target_series(tau, sigmas, N: int) -> IntSeries:
    """The extremal quotient series 1/(1 - sum t^tau_i + sum t^sigma_j)."""
    return denominator_series(tau, sigmas, N).inverse()


@dataclass(frozen=True)
class AdmissibilityResult:
    status: str
    degree: int
    at_degree: int | None = None
    coefficient: int | None = None

    @property
    def admissible(self) -> bool:
        return self.status == ADMISSIBLE

    def as_dict(self):
        out = {"status": self.status, "degree": self.degree}
        if self.at_degree is not None:
            out["at_degree"] = self.at_degree
            out["coefficient"] = self.coefficient
        return out


def series_admissibility(tau, sigmas, N: int) -> AdmissibilityResult:
    """Report the first negative coefficient of the extremal series, if any
    up to degree N.  Nonnegativity is necessary for a strongly free
    sequence with the given degrees to exist."""
    target = target_series(tau, sigmas, N)
    for n in range(N + 1):
        if target[n] < 0:
            return AdmissibilityResult(INADMISSIBLE, N, n, target[n])
    return AdmissibilityResult(ADMISSIBLE, N)


def strongly_free_oracle(ctx: Context, rhos, N: int, budget=None) -> FreenessVerdict:
    """Compare actual quotient dimensions against the extremal series.

    The product of the actual series with the denominator minus 1 is a
    coefficientwise nonnegative defect; the first positive coefficient
    refutes strong freeness definitively, and a full run of zeros up to N
    is evidence only (consistent-to-degree N), never a proof.
    """
    sigmas = _check_relators(ctx, rhos)
    dims = quotient_dimensions(ctx, rhos, N, budget=budget)
    defect = dims * denominator_series(ctx.tau, sigmas, N) - IntSeries.one(N)
    for n in range(1, N + 1):
        c = defect[n]
        if c < 0:
            raise InternalInvariantError(
                f"negative defect coefficient {c} at degree {n}; "
                "the quotient-dimension engine is broken"
            )
        if c > 0:
            return FreenessVerdict(REFUTED, "oracle", at_degree=n, witness_coefficient=c)
    return FreenessVerdict(CONSISTENT, "oracle", degree=N)
