import itertools
import random

import pytest

from mildkit.errors import BudgetError, PrecisionError
from mildkit.freeness import PROVEN, CONSISTENT, anick_check, strongly_free_oracle
from mildkit.lie import hall_basis, hall_to_group_word
from mildkit.magnus import GroupWord, Gen, make_presentation, substitute
from mildkit.massey import (
    CRITERION_FAILED,
    MILD,
    NOT_APPLICABLE,
    Decomposition,
    bn_map,
    check_mild,
    check_shuffles,
    demuskin_mildness,
    demuskin_type,
    massey_tensor,
    massey_value,
    one_relator_verdict,
    search_mild,
    zassenhaus_invariant,
    _subset_permutation,
)
from mildkit.orders import UOrder

NAMES = {1: ["x"], 2: ["x1", "x2"], 3: ["x1", "x2", "x3"], 4: ["x1", "x2", "x3", "x4"]}


def pres(p, d, relators, tau=None):
    return make_presentation(p, NAMES[d], [(f"r{k + 1}", t) for k, t in enumerate(relators)], tau)


DEMUSKIN_P3 = pres(3, 3, ["x1^3 x2^3 [[x1, x3], x3]"])
CIRCUIT = pres(2, 4, ["[x1, x2]", "[x2, x3]", "[x3, x4]", "[x4, x1]"])
TRIPLE = pres(2, 3, ["[x1, x2]", "[x2, x3]", "[x3, x1]"])


# -- Zassenhaus invariant -------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_z_of_pth_power(p):
    P = pres(p, 1, [f"x^{p}"])
    assert zassenhaus_invariant(P, p + 1) == p


def test_z_of_commutator():
    P = pres(3, 2, ["[x1, x2]"])
    assert zassenhaus_invariant(P, 4) == 2


def test_z_of_demuskin_example():
    assert zassenhaus_invariant(DEMUSKIN_P3, 8) == 3


def test_z_is_minimum_over_relators():
    P = pres(2, 3, ["[x1, x2]", "[[x1, x2], x3]"])
    assert zassenhaus_invariant(P, 6) == 2


def test_z_unknown_for_trivial_relator():
    P = pres(2, 2, ["x1 x2 x2^-1 x1^-1"])
    assert zassenhaus_invariant(P, 6) is None


def test_z_infinite_for_free_presentation():
    from mildkit.algebra import INFINITY

    P = pres(2, 2, [])
    assert zassenhaus_invariant(P, 4) is INFINITY


# -- tensors ---------------------------------------------------------------------


def test_tensor_of_commutator():
    P = pres(5, 2, ["[x1, x2]"])
    T = massey_tensor(P, 2)
    assert T.values[0] == {(1, 2): 1, (2, 1): 4}


def test_tensor_demuskin_entries():
    T = massey_tensor(DEMUSKIN_P3, 3)
    assert T.values[0] == {
        (1, 1, 1): 1,
        (2, 2, 2): 1,
        (1, 3, 3): 1,
        (3, 1, 3): 1,
        (3, 3, 1): 1,
    }


def test_tensor_refuses_beyond_invariant():
    P = pres(3, 2, ["[x1, x2]"])
    with pytest.raises(ValueError):
        massey_tensor(P, 3)


def test_cup_product_sign():
    # at n = 2 the pairing equals the cup product, which carries sign -1
    P = pres(5, 2, ["[x1, x2]"])
    T = massey_tensor(P, 2)
    chi1 = [1, 0]
    chi2 = [0, 1]
    assert massey_value(T, [chi1, chi2]) == [(-1) % 5]
    assert massey_value(T, [chi2, chi1]) == [1]


def test_massey_value_basis_tuple_and_zero():
    T = massey_tensor(DEMUSKIN_P3, 3)
    sign = T.sign
    for index in [(1, 1, 1), (1, 3, 3), (2, 3, 3)]:
        vecs = [[1 if k == i - 1 else 0 for k in range(3)] for i in index]
        assert massey_value(T, vecs) == [(sign * T.value(0, index)) % 3]
    vecs = [[1, 2, 0], [0, 0, 0], [1, 1, 1]]
    assert massey_value(T, vecs) == [0]


def test_massey_value_multilinear():
    rng = random.Random(41)
    T = massey_tensor(DEMUSKIN_P3, 3)
    p, d = T.p, T.d
    for _ in range(30):
        slot = rng.randrange(3)
        base = [[rng.randrange(p) for _ in range(d)] for _ in range(3)]
        u = [rng.randrange(p) for _ in range(d)]
        v = [rng.randrange(p) for _ in range(d)]
        lam = rng.randrange(p)
        left = base[:slot] + [[(a + lam * b) % p for a, b in zip(u, v)]] + base[slot + 1 :]
        right_u = base[:slot] + [u] + base[slot + 1 :]
        right_v = base[:slot] + [v] + base[slot + 1 :]
        lhs = massey_value(T, left)
        rhs = [
            (x + lam * y) % p
            for x, y in zip(massey_value(T, right_u), massey_value(T, right_v))
        ]
        assert lhs == rhs


def test_massey_value_dimension_checks():
    T = massey_tensor(DEMUSKIN_P3, 3)
    with pytest.raises(ValueError):
        massey_value(T, [[1, 0, 0]] * 2)
    with pytest.raises(ValueError):
        massey_value(T, [[1, 0]] * 3)


# -- shuffles ---------------------------------------------------------------------


def test_shuffles_pass_on_real_tensors():
    for P in (DEMUSKIN_P3, CIRCUIT, TRIPLE):
        n = zassenhaus_invariant(P, 8)
        T = massey_tensor(P, n)
        for a in range(1, n):
            assert check_shuffles(T, a, n - a).ok


def test_shuffles_z3_cyclic_and_reversal():
    T = massey_tensor(DEMUSKIN_P3, 3)
    vals = T.values[0]
    for i, j, k in itertools.product((1, 2, 3), repeat=3):
        cyc = vals.get((i, j, k), 0) + vals.get((j, k, i), 0) + vals.get((k, i, j), 0)
        assert cyc % 3 == 0
        assert vals.get((i, j, k), 0) == vals.get((k, j, i), 0)


def test_shuffles_detect_corruption():
    T = massey_tensor(DEMUSKIN_P3, 3)
    corrupted = dict(T.values[0])
    corrupted[(1, 2, 3)] = 1
    bad = type(T)(T.p, T.d, T.n, T.relator_names, (corrupted,))
    assert any(not check_shuffles(bad, a, 3 - a).ok for a in (1, 2))


def test_shuffles_validate_split():
    T = massey_tensor(DEMUSKIN_P3, 3)
    with pytest.raises(ValueError):
        check_shuffles(T, 0, 3)
    with pytest.raises(ValueError):
        check_shuffles(T, 2, 2)


def test_cup_tensor_antisymmetric():
    # the n = 2 pairing is the cup product: value(j, (a, b)) = -value(j, (b, a))
    for P in (CIRCUIT, TRIPLE, pres(5, 2, ["[x1, x2]^2 [x2, x1]"])):
        T = massey_tensor(P, 2)
        for j in range(T.m):
            for a in range(1, T.d + 1):
                for b in range(1, T.d + 1):
                    assert (T.value(j, (a, b)) + T.value(j, (b, a))) % T.p == 0


# -- the diagonal map -------------------------------------------------------------


def test_bn_zero_when_not_p_power():
    from mildkit.magnus import Presentation

    # weight-3 commutator relators at p = 2: 3 is not a 2-power
    for c in hall_basis(3, 3):
        word = hall_to_group_word(c)
        Q = Presentation(2, tuple(NAMES[3]), (1, 1, 1), (("r", word),))
        assert bn_map(massey_tensor(Q, 3)) == [[0, 0, 0]]
    # a weight-6 bracket at p = 5
    w6 = hall_to_group_word(hall_basis(2, 6)[0])
    Q = Presentation(5, tuple(NAMES[2]), (1, 1), (("r", w6),))
    assert zassenhaus_invariant(Q, 7) == 6
    assert bn_map(massey_tensor(Q, 6)) == [[0, 0]]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_bn_nonzero_for_pth_power(p):
    P = pres(p, 1, [f"x^{p}"])
    T = massey_tensor(P, p)
    assert bn_map(T) == [[(-1) ** (p - 1) % p]]


def test_bn_demuskin_columns():
    T = massey_tensor(DEMUSKIN_P3, 3)
    assert bn_map(T) == [[1, 1, 0]]


def test_bn_additive():
    rng = random.Random(42)
    T = massey_tensor(DEMUSKIN_P3, 3)
    B = bn_map(T)
    p, d, n = T.p, T.d, T.n
    for _ in range(40):
        chi = [rng.randrange(p) for _ in range(d)]
        psi = [rng.randrange(p) for _ in range(d)]
        s = [(a + b) % p for a, b in zip(chi, psi)]
        direct = massey_value(T, [s] * n)
        additive = [
            (massey_value(T, [chi] * n)[j] + massey_value(T, [psi] * n)[j]) % p
            for j in range(T.m)
        ]
        assert direct == additive
        # and both agree with the matrix
        from_matrix = [sum(B[j][i] * s[i] for i in range(d)) % p for j in range(T.m)]
        assert direct == from_matrix


# -- the decomposition criterion ----------------------------------------------------


def test_check_mild_demuskin_example():
    verdict = check_mild(DEMUSKIN_P3, Decomposition(2, 1))
    assert verdict.status == MILD
    cert = verdict.certificate
    assert cert.n == 3
    assert [m.letters for m in cert.high_terms] == [(1, 3, 3)]
    assert cert.anick.status == PROVEN


def test_check_mild_triple_fails_everywhere():
    for c in (1, 2):
        for subset in itertools.combinations((1, 2, 3), c):
            matrix = None if subset == tuple(range(1, c + 1)) else _subset_permutation(3, subset)
            verdict = check_mild(TRIPLE, Decomposition(c, 1, matrix))
            assert verdict.status == CRITERION_FAILED
    assert search_mild(TRIPLE).status == CRITERION_FAILED


def test_check_mild_circuit_bipartite():
    D = Decomposition(2, 1, _subset_permutation(4, (2, 4)))
    verdict = check_mild(CIRCUIT, D)
    assert verdict.status == MILD
    highs = verdict.certificate.high_terms
    assert len({m.letters for m in highs}) == 4
    # every high term starts in U (first two transformed letters) and ends in V
    for m in highs:
        assert m.letters[0] <= 2 < m.letters[1]


def test_check_mild_free_presentation():
    P = pres(2, 2, [])
    assert check_mild(P, Decomposition(1, 1)).status == NOT_APPLICABLE


def test_check_mild_validates_decomposition():
    with pytest.raises(ValueError):
        check_mild(DEMUSKIN_P3, Decomposition(3, 1))
    with pytest.raises(ValueError):
        check_mild(DEMUSKIN_P3, Decomposition(2, 3))
    singular = ((1, 0, 0), (1, 0, 0), (0, 0, 1))
    with pytest.raises(ValueError):
        check_mild(DEMUSKIN_P3, Decomposition(2, 1, singular))


def test_check_mild_certificate_is_oracle_consistent():
    # the certificate's reduced forms must stay consistent with the series
    # oracle and prove out under the high-term criterion
    for P, D in [
        (DEMUSKIN_P3, Decomposition(2, 1)),
        (CIRCUIT, Decomposition(2, 1, _subset_permutation(4, (2, 4)))),
    ]:
        verdict = check_mild(P, D)
        assert verdict.status == MILD
        forms = list(verdict.certificate.initial_forms)
        ctx = forms[0].ctx
        order = UOrder(frozenset(range(1, D.c + 1)), ctx.tau)
        assert anick_check(forms, order).status == PROVEN
        assert strongly_free_oracle(ctx, forms, 8).status == CONSISTENT


def test_search_mild_demuskin_finds_identity_split():
    verdict = search_mild(DEMUSKIN_P3)
    assert verdict.status == MILD
    D = verdict.certificate.decomposition
    assert (D.c, D.e) == (2, 1)
    assert D.matrix is None


def test_search_mild_circuit():
    assert search_mild(CIRCUIT).status == MILD


def test_search_mild_free():
    assert search_mild(pres(3, 2, [])).status == NOT_APPLICABLE


def test_search_mild_budget():
    with pytest.raises(BudgetError):
        search_mild(CIRCUIT, max_cases=3)


def test_precision_error_when_z_unknown():
    P = pres(2, 2, ["x1 x1^-1"])
    with pytest.raises(PrecisionError):
        check_mild(P, Decomposition(1, 1))


# -- one-relator reports ---------------------------------------------------------


def test_one_relator_commutator_p2():
    P = pres(2, 2, ["[x1, x2]"])
    report = one_relator_verdict(P)
    assert report.z == 2
    assert report.coprime is False
    assert report.status == "mild"
    assert any("Lie polynomial" in r for r in report.routes)
    lie_rec = next(m for m in report.memberships if m.tau == (1, 1))
    assert lie_rec.is_lie


def test_one_relator_coprime_route():
    P = pres(2, 3, ["[[x1, x2], x3]"])
    report = one_relator_verdict(P)
    assert report.z == 3
    assert report.coprime is True
    assert report.status == "mild"


def test_one_relator_pth_power_flags():
    P = pres(3, 1, ["x^3"])
    report = one_relator_verdict(P)
    assert report.status == "finite"
    assert report.split is not None
    assert [(e.format(p=3), c) for e, c in report.split.power_part] == [("X1^3", 1)]
    assert report.split.lie_part == []


def test_one_relator_bp_kernel_when_z_equals_p():
    report = one_relator_verdict(DEMUSKIN_P3)
    assert report.z == 3 == DEMUSKIN_P3.p
    assert report.bp_matrix == [[1, 1, 0]]
    assert report.bp_kernel is not None and len(report.bp_kernel) == 2


def test_one_relator_requires_single_relator():
    with pytest.raises(ValueError):
        one_relator_verdict(CIRCUIT)


def test_one_relator_weighted_route():
    # x1^2 x2^4 at p = 2: inconclusive at tau = (1,1) but the weighted
    # initial form X1^2 + X2^4 is not Lie either; the tau = (2,1) strong
    # freeness is the oracle's business, checked elsewhere
    P = pres(2, 2, ["x1^2 x2^4"])
    report = one_relator_verdict(P, extra_taus=[(2, 1)])
    assert report.z == 2
    weighted = next(m for m in report.memberships if m.tau == (2, 1))
    assert weighted.valuation == 4
    assert weighted.is_lie is False


# -- Demuškin type ----------------------------------------------------------------


def test_demuskin_type_example():
    report = demuskin_type(DEMUSKIN_P3)
    assert report.is_type
    assert report.n == 3


def test_demuskin_type_witness_failure():
    P = pres(2, 3, ["[x1, x2]"])
    report = demuskin_type(P)
    assert not report.is_type
    assert report.witness == (0, 0, 1)


def test_demuskin_type_single_generator():
    for p in (2, 3):
        P = pres(p, 1, [f"x^{p}"])
        assert demuskin_type(P).is_type


def test_demuskin_type_budget():
    with pytest.raises(BudgetError):
        demuskin_type(DEMUSKIN_P3, budget=10)


def test_demuskin_mildness_example():
    verdict = demuskin_mildness(DEMUSKIN_P3)
    assert verdict.status == MILD
    assert verdict.certificate.decomposition.e == 1
    assert verdict.certificate.decomposition.c == 2


def test_demuskin_mildness_finite_cyclic():
    for p, k in [(2, 1), (3, 1), (2, 2)]:
        P = pres(p, 1, [f"x^{p ** k}"])
        verdict = demuskin_mildness(P)
        assert verdict.status == NOT_APPLICABLE
        assert f"Z/{p ** k}" in verdict.reason


def test_demuskin_mildness_rank2_cup():
    P = pres(2, 2, ["x1^2 [x1, x2]"])
    assert demuskin_type(P).is_type
    verdict = demuskin_mildness(P)
    assert verdict.status == MILD


def test_demuskin_mildness_not_applicable():
    P = pres(2, 3, ["[x1, x2]"])
    verdict = demuskin_mildness(P)
    assert verdict.status == NOT_APPLICABLE
    assert "not of Demuškin type" in verdict.reason


# -- basis-change invariance -------------------------------------------------------


def test_verdicts_invariant_under_letter_permutations():
    rng = random.Random(43)
    base_relators = ["x1^3 x2^3 [[x1, x3], x3]"]
    P = DEMUSKIN_P3
    for _ in range(5):
        perm = list(range(1, 4))
        rng.shuffle(perm)
        images = [GroupWord((Gen(i),)) for i in perm]
        relators = tuple(
            (name, substitute(w, images)) for name, w in P.relators
        )
        from mildkit.magnus import Presentation

        Q = Presentation(P.p, P.names, P.tau, relators)
        assert zassenhaus_invariant(Q, 8) == zassenhaus_invariant(P, 8)
        assert search_mild(Q).status == search_mild(P).status
        assert demuskin_type(Q).is_type == demuskin_type(P).is_type
