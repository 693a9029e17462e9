"""Massey-product tensors of a finite presentation and the verdicts built
on them.

All Massey values are read off the Magnus expansions of the relators: the
coefficient of X_{i_1}...X_{i_n} in the expansion of r equals, up to the
sign (-1)^(n-1), the trace of the n-fold product on the dual basis tuple.
No cochain-level defining systems are ever constructed.  Tensors store the
raw coefficients; the sign lives in massey_value alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .algebra import INFINITY, Monomial, Poly
from .errors import BudgetError, PrecisionError
from .freeness import FreenessVerdict, anick_check
from .lie import NotInRestrictedLieError, lie_membership, p_power_commutator_split
from .linalg import TrackingReducer, dense_rank, is_invertible, kernel_basis
from .magnus import Presentation, expand, initial_form, omega
from .orders import UOrder, high_term

MILD = "mild"
CRITERION_FAILED = "criterion-failed"
NOT_APPLICABLE = "not-applicable"


# ---------------------------------------------------------------------------
# Zassenhaus invariant
# ---------------------------------------------------------------------------

def relator_valuations(P: Presentation, cutoff: int) -> list:
    """Unweighted valuations of the relators; None marks a relator whose
    expansion is trivial to the cutoff (deeper than cutoff, or trivial)."""
    ctx = P.context(unweighted=True)
    return [omega(w, ctx, cutoff) for _, w in P.relators]


def zassenhaus_invariant(P: Presentation, cutoff: int):
    """Largest n with every relator of valuation >= n: the minimum of the
    relator valuations.  INFINITY for a free presentation; None when the
    minimum is not visible at this cutoff."""
    if P.m == 0:
        return INFINITY
    vals = relator_valuations(P, cutoff)
    known = [v for v in vals if v is not None]
    if not known:
        return None
    return min(known)


# ---------------------------------------------------------------------------
# tensors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MasseyTensor:
    """For each relator, the map multi-index I (length n) -> coefficient of
    X_I in its Magnus expansion, stored sparsely."""

    p: int
    d: int
    n: int
    relator_names: tuple[str, ...]
    values: tuple[dict, ...]

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def sign(self) -> int:
        return (-1) ** (self.n - 1) % self.p

    def value(self, j: int, index_tuple) -> int:
        return self.values[j].get(tuple(index_tuple), 0)

    def transformed(self, matrix) -> MasseyTensor:
        """Tensor after the change of dual basis chi'_i = sum_a Q[i][a] chi_a;
        equals the coefficient tensor of the relators in the new letters."""
        vals = tuple(
            _transform_values(v, matrix, self.p, self.d, self.n) for v in self.values
        )
        return MasseyTensor(self.p, self.d, self.n, self.relator_names, vals)

    def as_dict(self):
        return {
            "n": self.n,
            "relators": {
                name: {"".join(map(str, i)): c for i, c in sorted(v.items())}
                for name, v in zip(self.relator_names, self.values)
            },
        }


def _transform_values(values, matrix, p, d, n):
    cur = values
    for slot in range(n):
        nxt: dict = {}
        for index, c in cur.items():
            a = index[slot]
            for i in range(1, d + 1):
                q = matrix[i - 1][a - 1] % p
                if not q:
                    continue
                key = index[:slot] + (i,) + index[slot + 1 :]
                v = (nxt.get(key, 0) + q * c) % p
                if v:
                    nxt[key] = v
                else:
                    nxt.pop(key, None)
        cur = nxt
    return cur


def massey_tensor(P: Presentation, n: int, cutoff=None) -> MasseyTensor:
    """All length-n expansion coefficients of the relators.  Defined only
    for n <= the Zassenhaus invariant (the products are not uniquely
    defined beyond it)."""
    if n < 2:
        raise ValueError(f"tensors start at n = 2, got {n}")
    cutoff = max(cutoff or 0, n)
    z = zassenhaus_invariant(P, cutoff)
    if z is not INFINITY and z is not None and n > z:
        raise ValueError(
            f"n = {n} exceeds the Zassenhaus invariant {z}; "
            "the Massey product is not uniquely defined there"
        )
    ctx = P.context(unweighted=True)
    values = []
    for _, w in P.relators:
        poly = expand(w, ctx, n).poly
        values.append(
            {m.letters: c for m, c in poly.terms.items() if m.tau_degree == n}
        )
    return MasseyTensor(P.p, P.d, n, P.relator_names(), tuple(values))


def massey_value(T: MasseyTensor, xs) -> list[int]:
    """Multilinear extension: component j is (-1)^(n-1) times the full
    contraction of relator j's tensor with the given n coefficient vectors."""
    xs = [list(x) for x in xs]
    if len(xs) != T.n:
        raise ValueError(f"expected {T.n} vectors, got {len(xs)}")
    for x in xs:
        if len(x) != T.d:
            raise ValueError(f"expected vectors of length {T.d}")
    p = T.p
    out = []
    for vals in T.values:
        total = 0
        for index, c in vals.items():
            w = c
            for k, i in enumerate(index):
                w = (w * xs[k][i - 1]) % p
                if not w:
                    break
            total = (total + w) % p
        out.append((T.sign * total) % p)
    return out


# ---------------------------------------------------------------------------
# shuffles and the diagonal map
# ---------------------------------------------------------------------------

def _shuffle_patterns(a: int, b: int):
    """All (a,b)-shuffles as position assignments: for each size-a subset S
    of the n slots, entries 1..a land on S in order and the rest on the
    complement in order."""
    n = a + b
    patterns = []
    for s in itertools.combinations(range(n), a):
        comp = [k for k in range(n) if k not in s]
        slots = [0] * n
        for src, dst in enumerate(s):
            slots[dst] = src
        for src, dst in enumerate(comp):
            slots[dst] = a + src
        patterns.append(tuple(slots))
    return patterns


@dataclass
class ShuffleReport:
    a: int
    b: int
    checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self):
        return {
            "a": self.a,
            "b": self.b,
            "checked": self.checked,
            "violations": [
                {"relator": name, "tuple": list(i)} for name, i in self.violations
            ],
        }


def check_shuffles(T: MasseyTensor, a: int, b: int, max_tuples=200000, seed=0) -> ShuffleReport:
    """Verify that the sum over all (a,b)-shuffles of the tensor entries
    vanishes, for every basis tuple (or a seeded random sample when the
    index space exceeds max_tuples)."""
    if a < 1 or b < 1 or a + b != T.n:
        raise ValueError(f"need a, b >= 1 with a + b = {T.n}")
    patterns = _shuffle_patterns(a, b)
    p = T.p
    space = T.d ** T.n
    if space <= max_tuples:
        tuples = itertools.product(range(1, T.d + 1), repeat=T.n)
        checked = space
    else:
        import random

        rng = random.Random(seed)
        tuples = [
            tuple(rng.randint(1, T.d) for _ in range(T.n)) for _ in range(max_tuples)
        ]
        checked = max_tuples
    violations = []
    tuples = list(tuples)
    for j, vals in enumerate(T.values):
        for index in tuples:
            total = 0
            for pat in patterns:
                shuffled = tuple(index[pat[k]] for k in range(T.n))
                total += vals.get(shuffled, 0)
            if total % p:
                violations.append((T.relator_names[j], index))
    return ShuffleReport(a, b, checked, violations)


def bn_map(T: MasseyTensor) -> list[list[int]]:
    """Matrix of the linear map chi -> n-fold product on (chi, ..., chi):
    m rows (relators), d columns (dual basis vectors), sign included."""
    return [
        [(T.sign * vals.get((i,) * T.n, 0)) % T.p for i in range(1, T.d + 1)]
        for vals in T.values
    ]


# ---------------------------------------------------------------------------
# the decomposition criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    """A splitting of the dual basis: after the (optional) basis change,
    U is spanned by the first c coordinates and V by the rest; e is the
    number of U-slots required on the left of the surjectivity block."""

    c: int
    e: int
    matrix: tuple | None = None

    def rows(self, d: int):
        if self.matrix is None:
            return [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        return [list(row) for row in self.matrix]

    def as_dict(self):
        out = {"c": self.c, "e": self.e}
        if self.matrix is not None:
            out["matrix"] = [list(row) for row in self.matrix]
        return out


@dataclass
class MildCertificate:
    """Re-execution of the criterion's proof path: the transformed,
    row-reduced degree-n relator forms, their high terms under the subset
    order, and the combinatorial-freeness outcome."""

    n: int
    order: str
    decomposition: Decomposition
    initial_forms: tuple[Poly, ...]
    high_terms: tuple[Monomial, ...]
    anick: FreenessVerdict
    notes: str = ""

    def as_dict(self, names=None):
        return {
            "n": self.n,
            "order": self.order,
            "decomposition": self.decomposition.as_dict(),
            "initial_forms": [f.format(names) for f in self.initial_forms],
            "high_terms": [m.format(names) for m in self.high_terms],
            "anick": self.anick.as_dict(names),
            "notes": self.notes,
        }


@dataclass
class MildVerdict:
    status: str
    reason: str = ""
    certificate: MildCertificate | None = None

    @property
    def is_mild(self) -> bool:
        return self.status == MILD

    def as_dict(self, names=None):
        out = {"status": self.status}
        if self.reason:
            out["reason"] = self.reason
        if self.certificate is not None:
            out["certificate"] = self.certificate.as_dict(names)
        return out


def _require_z(P: Presentation, cutoff: int) -> int:
    z = zassenhaus_invariant(P, cutoff)
    if z is None:
        raise PrecisionError(
            f"every relator expands to 1 up to degree {cutoff}; raise the cutoff "
            "(a trivial relator can never yield a finite invariant)"
        )
    return z


def check_mild(P: Presentation, D: Decomposition, cutoff: int = 8) -> MildVerdict:
    """Decide the decomposition criterion at n = z(G) and, on success,
    rebuild its constructive certificate.

    Condition (a): every tensor entry with at least n-e+1 indices in V
    vanishes.  Condition (b): the block over U^e x V^(n-e) multi-indices
    has full rank m.  The certificate row-reduces that block (columns in
    decreasing subset order), recovers the high terms of the reduced
    relator forms, and re-checks combinatorial freeness via the high-term
    criterion; the mild verdict is issued only if that check proves out.
    """
    if P.m == 0:
        return MildVerdict(NOT_APPLICABLE, "free presentation: cd <= 1, nothing to check")
    n = _require_z(P, cutoff)
    d = P.d
    c, e = D.c, D.e
    if not 1 <= c < d:
        raise ValueError(f"need 1 <= c < d = {d}, got c = {c}")
    if not 1 <= e <= n - 1:
        raise ValueError(f"need 1 <= e <= n - 1 = {n - 1}, got e = {e}")
    rows = D.rows(d)
    if not is_invertible(P.p, rows):
        raise ValueError("basis-change matrix is not invertible")

    T = massey_tensor(P, n, cutoff)
    if D.matrix is not None:
        T = T.transformed(rows)

    # (a) vanishing on tuples with >= n - e + 1 entries in V
    for j, vals in enumerate(T.values):
        for index, coeff in vals.items():
            if sum(1 for i in index if i > c) >= n - e + 1:
                return MildVerdict(
                    CRITERION_FAILED,
                    f"condition (a) fails: relator {T.relator_names[j]} has a nonzero "
                    f"product on tuple {index} with >= {n - e + 1} entries in V",
                )

    # (b) surjectivity block over U^e x V^(n-e)
    block = [
        u + v
        for u in itertools.product(range(1, c + 1), repeat=e)
        for v in itertools.product(range(c + 1, d + 1), repeat=n - e)
    ]
    matrix = [[vals.get(index, 0) for index in block] for vals in T.values]
    if dense_rank(P.p, matrix) < T.m:
        return MildVerdict(
            CRITERION_FAILED,
            "condition (b) fails: the block over U^e x V^(n-e) has rank "
            "< m (relators dependent or too deep)",
        )

    # certificate: row-reduce the block with columns in decreasing subset
    # order; pivots become the high terms of the reduced relator forms
    order = UOrder(frozenset(range(1, c + 1)), (1,) * d)
    monos = sorted(
        (Monomial(index, n) for index in block),
        key=order.sort_key(),
        reverse=True,
    )
    col = {m.letters: k for k, m in enumerate(monos)}
    reducer = TrackingReducer(P.p)
    for j, vals in enumerate(T.values):
        reducer.add({col[i]: v for i, v in vals.items() if i in col}, {j: 1})
    if reducer.rank < T.m:
        return MildVerdict(CRITERION_FAILED, "relators dependent or too deep")

    ctx = P.context(unweighted=True)
    full = [
        Poly(ctx, {Monomial(i, n): v for i, v in vals.items()}) for vals in T.values
    ]
    forms = []
    for lead in sorted(reducer.pivots):
        _, trace = reducer.pivots[lead]
        poly = ctx.zero()
        for j, t in trace.items():
            poly = poly + full[j].scale(t)
        forms.append(poly)
    verdict = anick_check(forms, order)
    highs = tuple(high_term(order, f) for f in forms)
    cert = MildCertificate(
        n=n,
        order=order.describe(),
        decomposition=D,
        initial_forms=tuple(forms),
        high_terms=highs,
        anick=verdict,
        notes="forms are the row-reduced degree-n relator coefficients "
        "in the transformed letters",
    )
    if not verdict.proven:
        return MildVerdict(
            CRITERION_FAILED,
            "certificate rebuild failed: high terms not combinatorially free",
            certificate=cert,
        )
    return MildVerdict(MILD, certificate=cert)


def _subset_permutation(d: int, subset) -> tuple:
    """Basis change whose first len(subset) rows are the chosen standard
    vectors, the rest following in index order."""
    rest = [i for i in range(1, d + 1) if i not in subset]
    rows = []
    for i in list(subset) + rest:
        rows.append(tuple(1 if j == i else 0 for j in range(1, d + 1)))
    return tuple(rows)


def search_mild(P: Presentation, cutoff: int = 8, max_cases: int = 4096, matrices=()) -> MildVerdict:
    """Try the criterion over all coordinate-subset decompositions (and any
    user-supplied basis changes) and every admissible e; first success
    wins.  The subset space is 2^d-sized, so a case budget applies."""
    if P.m == 0:
        return MildVerdict(NOT_APPLICABLE, "free presentation: cd <= 1, nothing to check")
    n = _require_z(P, cutoff)
    d = P.d
    if n < 2 or d < 2:
        return MildVerdict(
            CRITERION_FAILED,
            f"no decomposition exists for d = {d}, n = {n}",
        )
    cases = []
    for c in range(1, d):
        for subset in itertools.combinations(range(1, d + 1), c):
            matrix = None if subset == tuple(range(1, c + 1)) else _subset_permutation(d, subset)
            for e in range(1, n):
                cases.append((Decomposition(c, e, matrix), f"U = span{subset}, e = {e}"))
    for matrix in matrices:
        for c in range(1, d):
            for e in range(1, n):
                cases.append((Decomposition(c, e, tuple(tuple(r) for r in matrix)), "user matrix"))
    if len(cases) > max_cases:
        raise BudgetError(
            f"{len(cases)} decompositions exceed the search budget {max_cases}"
        )
    for D, label in cases:
        verdict = check_mild(P, D, cutoff)
        if verdict.is_mild:
            verdict.reason = f"found by search: {label}"
            return verdict
    return MildVerdict(
        CRITERION_FAILED,
        f"criterion failed for all {len(cases)} searched decompositions",
    )


# ---------------------------------------------------------------------------
# one-relator reports
# ---------------------------------------------------------------------------

@dataclass
class MembershipRecord:
    tau: tuple[int, ...]
    valuation: int | None
    is_lie: bool | None
    coordinates: list | None = None

    def as_dict(self, names=None):
        return {
            "tau": list(self.tau),
            "valuation": self.valuation,
            "is_lie": self.is_lie,
            "coordinates": None
            if self.coordinates is None
            else [(e.format(names), c) for e, c in self.coordinates],
        }


@dataclass
class OneRelatorReport:
    p: int
    d: int
    relator: str
    z: int | None
    status: str  # mild | finite | inconclusive | unknown
    routes: list[str]
    coprime: bool | None
    memberships: list[MembershipRecord]
    split: object | None
    split_error: str | None
    bp_matrix: list | None
    bp_kernel: list | None
    demuskin_type: object | None = None
    demuskin_verdict: MildVerdict | None = None
    notes: str = ""

    def as_dict(self, names=None):
        return {
            "p": self.p,
            "d": self.d,
            "relator": self.relator,
            "z": self.z,
            "status": self.status,
            "routes": self.routes,
            "z_coprime_to_p": self.coprime,
            "memberships": [m.as_dict(names) for m in self.memberships],
            "split": self.split.as_dict(names, self.p) if self.split else None,
            "split_error": self.split_error,
            "bp_matrix": self.bp_matrix,
            "bp_kernel": self.bp_kernel,
            "demuskin_type": self.demuskin_type.as_dict() if self.demuskin_type else None,
            "demuskin_verdict": self.demuskin_verdict.as_dict(names)
            if self.demuskin_verdict
            else None,
            "notes": self.notes,
        }


def one_relator_verdict(
    P: Presentation,
    cutoff: int = 8,
    extra_taus=(),
    with_demuskin: bool = False,
    budget: int = 200000,
) -> OneRelatorReport:
    """Diagnostics for a one-relator presentation: the invariant z, the
    coprimality route, Lie-polynomial initial forms at the requested weight
    vectors, the p-power/commutator split, and (for z = p) the diagonal map
    and its kernel.  Mildness claims are one-directional; absence of a
    route is reported as inconclusive, never as a refutation."""
    if P.m != 1:
        raise ValueError(f"one-relator analysis needs exactly one relator, got {P.m}")
    name, w = P.relators[0]
    z = zassenhaus_invariant(P, cutoff)
    routes: list[str] = []
    notes = []

    if z is None:
        return OneRelatorReport(
            P.p, P.d, name, None, "unknown", [], None, [], None, None, None, None,
            notes=f"relator trivial to degree {cutoff}; raise the cutoff",
        )

    coprime = math.gcd(z, P.p) == 1
    if coprime:
        routes.append(f"zassenhaus-invariant {z} coprime to p = {P.p}")

    taus = [(1,) * P.d]
    if P.tau != (1,) * P.d:
        taus.append(P.tau)
    taus.extend(tuple(t) for t in extra_taus)
    memberships = []
    for tau in taus:
        ctx = P.context(tau)
        val = omega(w, ctx, cutoff * max(tau))
        if val is None:
            memberships.append(MembershipRecord(tau, None, None))
            continue
        form = initial_form(w, ctx, cutoff * max(tau))
        coords = lie_membership(form, val)
        memberships.append(MembershipRecord(tau, val, coords is not None, coords))
        if coords is not None:
            routes.append(f"initial form at tau = {tau} is a Lie polynomial")

    split = None
    split_error = None
    try:
        ctx1 = P.context(unweighted=True)
        split = p_power_commutator_split(initial_form(w, ctx1, cutoff), z)
    except NotInRestrictedLieError as exc:  # pragma: no cover - defensive
        split_error = str(exc)

    bp_matrix = None
    bp_kernel = None
    if z == P.p and P.d >= 2:
        T = massey_tensor(P, z, cutoff)
        bp_matrix = bn_map(T)
        bp_kernel = kernel_basis(P.p, bp_matrix, P.d)

    demuskin_report = None
    demuskin_verdict = None
    if with_demuskin:
        demuskin_report = demuskin_type(P, cutoff, budget=budget)
        demuskin_verdict = demuskin_mildness(P, cutoff, budget=budget)
        if demuskin_verdict.is_mild:
            routes.append("Demuškin-type construction")

    if P.d == 1:
        status = "finite"
        notes.append(f"single generator: the group is cyclic of order {P.p}^k with p^k = {z}")
    elif routes:
        status = "mild"
    else:
        status = "inconclusive"
        notes.append("no one-relator route applies; try other weight vectors or the decomposition search")

    return OneRelatorReport(
        P.p, P.d, name, z, status, routes, coprime, memberships,
        split, split_error, bp_matrix, bp_kernel,
        demuskin_report, demuskin_verdict, "; ".join(notes),
    )


# ---------------------------------------------------------------------------
# Demuškin type
# ---------------------------------------------------------------------------

@dataclass
class DemuskinTypeReport:
    is_type: bool
    n: int
    witness: tuple | None = None

    def as_dict(self):
        return {
            "is_demuskin_type": self.is_type,
            "n": self.n,
            "witness": None if self.witness is None else list(self.witness),
        }


def _pairing_form(T: MasseyTensor, chi, slot: int) -> list[int]:
    """The linear form psi -> product on (chi^slot, psi, chi^(n-1-slot)),
    as a coefficient vector over the dual basis (m = 1 tensors only)."""
    p = T.p
    vals = T.values[0]
    out = [0] * T.d
    for index, c in vals.items():
        w = c
        ok = True
        for k, i in enumerate(index):
            if k == slot:
                continue
            w = (w * chi[i - 1]) % p
            if not w:
                ok = False
                break
        if ok:
            out[index[slot] - 1] = (out[index[slot] - 1] + w) % p
    return out


def demuskin_type(P: Presentation, cutoff: int = 8, budget: int = 200000) -> DemuskinTypeReport:
    """Check non-degeneracy of the n-fold pairing: for every nonzero chi
    there must be a slot position and a psi with a nonzero product on
    (chi, ..., psi, ..., chi).  Enumerates all p^d - 1 classes; refuses
    honestly when that exceeds the budget."""
    if P.m != 1:
        raise ValueError(f"Demuškin-type analysis needs exactly one relator, got {P.m}")
    n = _require_z(P, cutoff)
    count = P.p**P.d - 1
    if count > budget:
        raise BudgetError(
            f"enumerating {count} classes of H^1 exceeds the budget {budget}"
        )
    T = massey_tensor(P, n, cutoff)
    for chi in itertools.product(range(P.p), repeat=P.d):
        if not any(chi):
            continue
        if not any(
            any(_pairing_form(T, chi, slot)) for slot in range(n)
        ):
            return DemuskinTypeReport(False, n, witness=chi)
    return DemuskinTypeReport(True, n)


def demuskin_mildness(P: Presentation, cutoff: int = 8, budget: int = 200000) -> MildVerdict:
    """Run the Demuškin-type construction: pick chi in the kernel of the
    diagonal map, find psi pairing nontrivially against chi^(n-1), send chi
    to the last coordinate, and check the criterion with V = span(chi),
    e = 1.  One-generator groups of Demuškin type are finite cyclic."""
    if P.m != 1:
        raise ValueError(f"Demuškin mildness needs exactly one relator, got {P.m}")
    n = _require_z(P, cutoff)
    report = demuskin_type(P, cutoff, budget=budget)
    if not report.is_type:
        return MildVerdict(
            NOT_APPLICABLE,
            f"not of Demuškin type: no pairing partner for chi = {report.witness}",
        )
    if P.d == 1:
        k = 0
        q = 1
        while q < n:
            q *= P.p
            k += 1
        if q != n:
            raise ValueError(
                f"inconsistent input: one generator forces z to be a power of p, got {n}"
            )
        return MildVerdict(
            NOT_APPLICABLE,
            f"finite group: G = Z/{n} (cyclic of order p^{k}); not mild, cd is infinite",
        )
    T = massey_tensor(P, n, cutoff)
    kern = kernel_basis(P.p, bn_map(T), P.d)
    if not kern:  # pragma: no cover - impossible for m = 1 < d
        return MildVerdict(CRITERION_FAILED, "diagonal map has trivial kernel")
    chi = tuple(kern[0])
    form = _pairing_form(T, chi, 0)
    if not any(form):  # pragma: no cover - excluded by the shifting identity
        return MildVerdict(
            CRITERION_FAILED,
            "no psi pairs with chi^(n-1); shifting identity violated",
        )
    pivot = next(i for i, v in enumerate(chi) if v)
    rows = [
        tuple(1 if j == i else 0 for j in range(P.d))
        for i in range(P.d)
        if i != pivot
    ]
    rows.append(chi)
    verdict = check_mild(P, Decomposition(P.d - 1, 1, tuple(rows)), cutoff)
    if verdict.is_mild:
        verdict.reason = (
            f"Demuškin-type construction with chi = {list(chi)} spanning V"
        )
    return verdict
