"""Acceptance criteria.  Each test prints one ``PASS``/``FAIL criterion N`` line.

Run with ``pytest -v tests/test_acceptance.py``; the corpus reduction is
shared by all criteria and takes a couple of minutes.
"""

import random
import time

import pytest

from branchforge.branch import INFINITY, preprocess, semigroup
from branchforge.contacts import colinearity_order, contact_transfer_residual, lambda_form, lambda_set, pullback_order
from branchforge.corpus import random_branch, random_corpus, random_eligible_field_terms, random_series, random_unit
from branchforge.flows import VectorField, flow_on_branch, picard_flow_oracle, sign_fault
from branchforge.normalform import equivalent, random_equivalent_pair, reduce
from branchforge.scalar import Scalar
from branchforge.series import TruncatedSeries, reciprocal

CORPUS_SEED = 20261015
CORPUS_SIZE = 100
MAX_CONDUCTOR = 120
PER_BRANCH_BUDGET = 10.0
CORPUS_BUDGET = 15 * 60.0


def B(n, terms):
    return preprocess(n, terms).branch


@pytest.fixture
def verdict(capsys):
    """Print the criterion line (bypassing capture) and fail the test on any failure."""

    def report(number, title, failures):
        status = "FAIL" if failures else "PASS"
        with capsys.disabled():
            print(f"\n{status} criterion {number}: {title}")
            for failure in failures[:5]:
                print(f"    {failure}")
        assert not failures, f"criterion {number}: {len(failures)} failures, first: {failures[0]}"

    return report


@pytest.fixture(scope="module")
def corpus():
    """The seeded corpus with its normal forms and per-branch reduction times."""
    branches = random_corpus(CORPUS_SEED, CORPUS_SIZE, max_conductor=MAX_CONDUCTOR)
    results = []
    for b in branches:
        start = time.perf_counter()
        try:
            nf, error = reduce(b), None
        except Exception as exc:  # recorded and reported by criterion 2
            nf, error = None, f"{type(exc).__name__}: {exc}"
        results.append((b, nf, time.perf_counter() - start, error))
    return results


def test_criterion_1_golden_invariants(verdict):
    failures = []
    start = time.perf_counter()
    b = B(4, {6: 1, 7: 1})
    S = semigroup(b)
    lam = lambda_set(b, S).lam
    if (S.generators, S.conductor, lam) != ((4, 6, 13), 16, 7):
        failures.append(f"(t^4, t^6+t^7): generators {S.generators}, c={S.conductor}, lambda={lam}")
    lam = lambda_set(B(3, {7: 1, 8: 1})).lam
    if lam != 8:
        failures.append(f"(t^3, t^7+t^8): lambda={lam}")
    lam = lambda_set(B(2, {3: 1})).lam
    if lam != INFINITY:
        failures.append(f"(t^2, t^3): lambda={lam}")
    elapsed = time.perf_counter() - start
    if elapsed > 3.0:
        failures.append(f"golden analyses took {elapsed:.2f}s")
    verdict(1, "golden invariants (4;6,7) -> <4,6,13>, c=16, lambda=7; (3;7,8) -> 8; (2;3) -> inf", failures)


def test_criterion_2_elimination_contract(corpus, verdict):
    failures = []
    ns = {b.n for b, *_ in corpus}
    if len(corpus) < 100 or not ns <= set(range(3, 8)):
        failures.append(f"corpus has {len(corpus)} branches with n in {sorted(ns)}")
    steps = 0
    for b, nf, seconds, error in corpus:
        c = semigroup(b).conductor
        if c > MAX_CONDUCTOR or not (b.n < b.m <= 3 * b.n) or b.m % b.n == 0:
            failures.append(f"{b}: outside the corpus bounds")
        if error:
            failures.append(f"{b}: {error}")
            continue
        if seconds > PER_BRANCH_BUDGET:
            failures.append(f"{b}: reduce took {seconds:.1f}s")
        for step in nf.audit:
            steps += 1
            j = step.j
            below_before = [t for t in step.before.y_terms if t[0] < j]
            below_after = [t for t in step.after.y_terms if t[0] < j]
            if below_before != below_after:
                failures.append(f"{b}: step j={j} changed lower coefficients")
            if step.after.coefficient(j):
                failures.append(f"{b}: step j={j} left {step.after.coefficient(j)}")
            if not step.beta:
                failures.append(f"{b}: step j={j} has beta = 0")
    total = sum(seconds for _, _, seconds, _ in corpus)
    if total > CORPUS_BUDGET:
        failures.append(f"corpus took {total:.0f}s")
    slowest = max(seconds for _, _, seconds, _ in corpus)
    verdict(
        2,
        f"elimination contract on {len(corpus)} branches, {steps} steps "
        f"(slowest {slowest:.1f}s, total {total:.0f}s)",
        failures,
    )


def test_criterion_3_affine_law(corpus, verdict):
    failures = []
    steps = 0
    for b, nf, _, error in corpus:
        if error:
            failures.append(f"{b}: {error}")
            continue
        for step in nf.audit:
            steps += 1
            a_j = step.before.coefficient(step.j)
            times = [s for s, _ in step.probes]
            if times != [Scalar(0), Scalar(1), Scalar(2), Scalar(-1)]:
                failures.append(f"{b}: step j={step.j} probed at {times}")
            for s, value in step.probes:
                if value != a_j + step.beta * s:
                    failures.append(f"{b}: step j={step.j}: c({s}) = {value} is off the line {a_j} + {step.beta}*s")
    verdict(3, f"affine law at s = 0, 1, 2, -1 on {steps} steps", failures)


def test_criterion_4_oracle_equivalence(verdict):
    failures = []
    pairs = 24
    caught = 0
    for seed in range(pairs):
        rng = random.Random(f"oracle:{seed}")
        b = random_branch(rng, max_conductor=40)
        E = VectorField(*random_eligible_field_terms(rng))
        N = min(b.truncation, 24)
        oracle = picard_flow_oracle(E, b, N)
        if flow_on_branch(E, b, N) != oracle:
            failures.append(f"seed {seed}: recursion and Picard iteration disagree on {b}")
        with sign_fault():
            caught += flow_on_branch(E, b, N) != oracle
    if not caught:
        failures.append("the sign mutation in the recursion went undetected")
    verdict(4, f"recursion == Picard oracle on {pairs} pairs; mutation caught on {caught}", failures)


def test_criterion_5_invariance(corpus, verdict):
    failures = []
    steps = 0
    for b, nf, _, error in corpus:
        if error:
            failures.append(f"{b}: {error}")
            continue
        for step in nf.audit:
            steps += 1
            S = semigroup(step.after)
            data = lambda_set(step.after, S)
            if S != nf.semigroup or data.orders != nf.lambda_data.orders or data.lam != nf.lam:
                failures.append(f"{b}: invariants changed at step j={step.j}")
    sampled = [b for b, *_ in corpus if semigroup(b).conductor <= 60][:5] + [B(4, {6: 1, 7: 1})]
    changes = 0
    for k, b in enumerate(sampled):
        S = semigroup(b)
        data = lambda_set(b, S)
        for trial in range(50):
            _, image = random_equivalent_pair(b, f"invariance:{k}:{trial}")
            changes += 1
            S2 = semigroup(image)
            data2 = lambda_set(image, S2)
            if S2 != S or data2.orders != data.orders or data2.lam != data.lam:
                failures.append(f"{b}: invariants changed under change {trial}")
    verdict(
        5,
        f"S, c, Lambda, lambda preserved across {steps} steps and {changes} coordinate changes "
        f"on {len(sampled)} branches",
        failures,
    )


def test_criterion_6_normal_form_support(corpus, verdict):
    failures = []
    for b, nf, _, error in corpus:
        if error:
            failures.append(f"{b}: {error}")
            continue
        S, c, n, m = nf.semigroup, nf.conductor, b.n, b.m
        for i in nf.coefficients:
            if i == nf.lam:
                continue
            if not (m < i < c) or (i + n) in nf.lambda_data:
                failures.append(f"{b}: exponent {i} outside the allowed support")
            if i in S:
                failures.append(f"{b}: coefficient at {i} in S survives")
            if (i + n) % m == 0 and (i + n) // m > 1:
                failures.append(f"{b}: coefficient at {i} with {i}+{n} a multiple of {m} survives")
    verdict(6, f"normal-form support on {len(corpus)} branches", failures)


def test_criterion_7_trichotomy(corpus, verdict):
    failures = []
    infinite = 0
    for b, nf, _, error in corpus:
        if error:
            failures.append(f"{b}: {error}")
            continue
        if nf.lam == INFINITY:
            infinite += 1
            if nf.coefficients:
                failures.append(f"{b}: lambda = inf but the normal form has terms {sorted(nf.coefficients)}")
        else:
            if not (b.m < nf.lam < nf.conductor):
                failures.append(f"{b}: lambda = {nf.lam} not in ({b.m}, {nf.conductor})")
            if not nf.coefficients or not nf.coefficient(nf.lam):
                failures.append(f"{b}: lambda = {nf.lam} finite but the normal form has no t^lambda term")
    verdict(7, f"trichotomy on {len(corpus)} branches ({infinite} with lambda = inf)", failures)


def test_criterion_8_end_to_end_equivalence(corpus, verdict):
    failures = []
    positives = 0
    rng = random.Random("equivalence")
    while positives < 50:
        b = random_branch(rng, max_conductor=60)
        _, image = random_equivalent_pair(b, rng.randrange(2**32))
        positives += 1
        if not equivalent(reduce(b), reduce(image)):
            failures.append(f"{b} and its image judged inequivalent")
    forms = [nf for _, nf, _, error in corpus if not error]
    negatives = 0
    for k in range(len(forms)):
        for other in forms[k + 1:]:
            nf = forms[k]
            key1 = (nf.semigroup.generators, nf.lambda_data.orders, nf.lam)
            key2 = (other.semigroup.generators, other.lambda_data.orders, other.lam)
            if key1 != key2:
                negatives += 1
                if equivalent(nf, other):
                    failures.append(f"forms with invariants {key1} and {key2} judged equivalent")
                break
        if negatives >= 50:
            break
    if negatives < 50:
        failures.append(f"only {negatives} cross pairs with differing invariants")
    golden = equivalent(reduce(B(4, {6: 1, 7: 1})), reduce(B(4, {6: 1, 7: 2})))
    if not golden or golden.r != Scalar(2):
        failures.append(f"(t^4, t^6+t^7) vs (t^4, t^6+2t^7): {golden}")
    verdict(8, f"{positives} equivalent pairs, {negatives} cross pairs, (4;6,7) ~ (4;6,2*7) with r = 2", failures)


def test_criterion_9_contact_transfer_and_lambda_form(corpus, verdict):
    failures = []
    for k in range(100):
        rng = random.Random(f"transfer:{k}")
        N = rng.randint(10, 30)
        j = rng.randint(1, N - 2)
        p = random_unit(rng, N)
        q, a, A, Bs = (random_series(rng, N) for _ in range(4))
        d = TruncatedSeries(random_unit(rng, N - j).coefficients, N - j)
        b = (a * q - d.shift(j)) * reciprocal(p)
        col = colinearity_order((a, b), (p, q))
        residual = contact_transfer_residual((a, b), (p, q), A, Bs)
        if getattr(col, "order", None) != j:
            failures.append(f"instance {k}: colinearity order {col}, expected {j}")
        if residual != -(Bs * reciprocal(p) * d.shift(j)):
            failures.append(f"instance {k}: residual is not -(B/p) t^j d")
    forms = [(b, nf) for b, nf, _, error in corpus if not error and nf.lam != INFINITY]
    rng = random.Random("lambda form")
    while len(forms) < 100:
        b = random_branch(rng, max_conductor=60)
        nf = reduce(b)
        if nf.lam != INFINITY:
            forms.append((b, nf))
    for b, nf in forms:
        v = pullback_order(nf.to_branch(), lambda_form(b.n, b.m))
        if v != nf.lam + b.n:
            failures.append(f"{b}: lambda form has contact {v}, expected {nf.lam + b.n}")
    verdict(9, f"contact transfer on 100 instances, lambda form on {len(forms)} short forms", failures)


def test_criterion_10_gorenstein(corpus, verdict):
    failures = []
    for b, *_ in corpus:
        S = semigroup(b)
        c = S.conductor
        if any((s in S) == (c - 1 - s in S) for s in range(c)):
            failures.append(f"{b}: semigroup {S.generators} is not symmetric")
    verdict(10, f"Gorenstein symmetry on {len(corpus)} semigroups", failures)
