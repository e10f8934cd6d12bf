"""Seeded property suites behind ``branchforge selftest``.

Each suite draws one random instance from ``random.Random(f"{seed}:{suite}:{k}")``
and returns ``(property, ok, message)`` checks.  A failing check names the
property, the seed and the instance index, which is enough to reproduce it
with :func:`run_instance`.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor

from .branch import INFINITY, semigroup
from .contacts import (
    colinearity_order,
    contact_transfer_residual,
    lambda_form,
    lambda_set,
    pullback_order,
)
from .corpus import random_branch, random_eligible_field_terms, random_series, random_unit
from .errors import BranchforgeError
from .flows import VectorField, flow_on_branch, picard_flow_oracle, sign_fault
from .normalform import equivalent, random_equivalent_pair, reduce
from .scalar import ONE
from .series import (
    TruncatedSeries,
    compose,
    compositional_inverse,
    nth_root_of_unit_series,
    reciprocal,
)

log = logging.getLogger(__name__)

__all__ = ["SUITES", "PROPERTIES", "run_instance", "run_selftest"]


def _series_laws(rng: random.Random, max_conductor: int):
    N = rng.randint(6, 24)
    a, b, c = (random_series(rng, N) for _ in range(3))
    u = random_unit(rng, N)
    n = rng.randint(2, 7)
    g = random_series(rng, N, valuation=1)
    t = TruncatedSeries.monomial(1, ONE, N)
    checks = [
        ("series_laws", (a * b) * c == a * (b * c), "multiplication is not associative"),
        ("series_laws", a * (b + c) == a * b + a * c, "multiplication does not distribute"),
        ("series_laws", (a * b).derivative() == a.derivative() * b + a * b.derivative(), "product rule fails"),
        ("series_laws", u * reciprocal(u) == TruncatedSeries.constant(ONE, N), "u * (1/u) != 1"),
        ("series_laws", nth_root_of_unit_series(u, n) ** n == u, f"({n}-th root)^{n} != u"),
    ]
    h = compositional_inverse(g)
    checks.append(("series_laws", compose(g, h) == t and compose(h, g) == t, "compositional inverse fails"))
    return checks


def _contact_transfer(rng: random.Random, max_conductor: int):
    N = rng.randint(10, 30)
    j = rng.randint(1, N - 2)
    p = random_unit(rng, N)
    q, a, A, B = (random_series(rng, N) for _ in range(4))
    d = random_unit(rng, N - j)
    d_full = TruncatedSeries(d.coefficients, N - j)
    # b chosen so that a*q - b*p = t^j d exactly
    b = (a * q - d_full.shift(j)) * reciprocal(p)
    b = TruncatedSeries(b.coefficients, N)
    col = colinearity_order((a, b), (p, q))
    residual = contact_transfer_residual((a, b), (p, q), A, B)
    expected = -(B * reciprocal(p) * d_full.shift(j))
    v = residual.valuation()
    return [
        ("contact_transfer", col is not None and getattr(col, "order", None) == j, f"colinearity order {col} != {j}"),
        ("contact_transfer", v is None or v >= j, f"residual valuation {v} < {j}"),
        ("contact_transfer", residual == expected, "residual differs from -(B/p) t^j d"),
    ]


def _oracle_equivalence(rng: random.Random, max_conductor: int):
    b = random_branch(rng, max_conductor=min(max_conductor, 40))
    X1, Y1 = random_eligible_field_terms(rng)
    E = VectorField(X1, Y1)
    N = min(b.truncation, 24)
    ours = flow_on_branch(E, b, N)
    oracle = picard_flow_oracle(E, b, N)
    same = ours.x_coeffs == oracle.x_coeffs and ours.y_coeffs == oracle.y_coeffs
    return [("oracle_equivalence", same, f"recursion and Picard iteration disagree on {b} with E=({X1}, {Y1})")]


def _invariance(rng: random.Random, max_conductor: int):
    b = random_branch(rng, max_conductor=max_conductor)
    S = semigroup(b)
    lam = lambda_set(b, S)
    _, image = random_equivalent_pair(b, rng.randrange(2**32))
    S2 = semigroup(image)
    lam2 = lambda_set(image, S2)
    ok = S2 == S and lam2.orders == lam.orders and lam2.lam == lam.lam
    return [("invariance", ok, f"invariants of {b} changed under a coordinate change")]


def _reduction(rng: random.Random, max_conductor: int):
    b = random_branch(rng, max_conductor=max_conductor)
    S = semigroup(b)
    c = S.conductor
    nf = reduce(b)
    checks = []
    for step in nf.audit:
        j = step.j
        lower_same = [t for t in step.before.y_terms if t[0] < j] == [t for t in step.after.y_terms if t[0] < j]
        affine = all(cs == step.probes[0][1] + step.beta * s for s, cs in step.probes)
        checks.append(("elimination_contract", lower_same and bool(step.beta) and not step.after.coefficient(j),
                       f"step j={j} on {b}"))
        checks.append(("affine_law", affine, f"probes at j={j} are not affine in s"))
    lam = nf.lam
    allowed = all(
        i == lam or (i + b.n not in nf.lambda_data and b.m < i < c) for i in nf.coefficients
    )
    vanishing = all(
        i not in S and not ((i + b.n) % b.m == 0 and (i + b.n) // b.m > 1)
        for i in nf.coefficients
        if i != lam
    )
    checks.append(("normal_form_support", allowed and vanishing, f"support {sorted(nf.coefficients)} of reduce({b})"))
    if lam == INFINITY:
        trich = not nf.coefficients
    else:
        trich = b.m < lam < c and bool(nf.coefficient(lam))
    checks.append(("trichotomy", trich, f"lambda={lam}, coefficients {sorted(nf.coefficients)}"))
    symmetric = all((s in S) != (c - 1 - s in S) for s in range(c))
    checks.append(("gorenstein", symmetric, f"semigroup {S.generators} is not symmetric"))
    if lam != INFINITY:
        v = pullback_order(nf.to_branch(), lambda_form(b.n, b.m))
        checks.append(("lambda_form", v == lam + b.n, f"lambda form has contact {v}, expected {lam + b.n}"))
    return checks


def _equivalent_pairs(rng: random.Random, max_conductor: int):
    b = random_branch(rng, max_conductor=max_conductor)
    _, image = random_equivalent_pair(b, rng.randrange(2**32))
    nf1, nf2 = reduce(b), reduce(image)
    checks = [("equivalent_pairs", bool(equivalent(nf1, nf2)), f"{b} and its image were judged inequivalent")]
    other = random_branch(rng, max_conductor=max_conductor)
    nf3 = reduce(other)
    if nf3.invariants() != nf1.invariants():
        checks.append(("equivalent_pairs", not equivalent(nf1, nf3), f"{b} and {other} have different invariants"))
    return checks


SUITES = {
    "series": _series_laws,
    "contact_transfer": _contact_transfer,
    "oracle": _oracle_equivalence,
    "invariance": _invariance,
    "reduction": _reduction,
    "equivalence": _equivalent_pairs,
}

PROPERTIES = (
    "series_laws",
    "contact_transfer",
    "oracle_equivalence",
    "invariance",
    "elimination_contract",
    "affine_law",
    "normal_form_support",
    "trichotomy",
    "gorenstein",
    "lambda_form",
    "equivalent_pairs",
)

_SUITE_PROPERTY = {
    "series": "series_laws",
    "contact_transfer": "contact_transfer",
    "oracle": "oracle_equivalence",
    "invariance": "invariance",
    "reduction": "elimination_contract",
    "equivalence": "equivalent_pairs",
}


def run_instance(suite: str, seed: int, k: int, max_conductor: int = 60, inject_fault: bool = False):
    """Run instance ``k`` of ``suite``; returns a list of ``(property, ok, message)``."""
    rng = random.Random(f"{seed}:{suite}:{k}")
    with sign_fault(inject_fault):
        try:
            return SUITES[suite](rng, max_conductor)
        except (BranchforgeError, AssertionError, ValueError) as exc:
            return [(_SUITE_PROPERTY[suite], False, f"{type(exc).__name__}: {exc}")]


def _run_task(task):
    return task, run_instance(*task)


def run_selftest(seed: int, count: int, jobs: int = 1, max_conductor: int = 60,
                 inject_fault: bool = False, suites=None) -> dict:
    """Run ``count`` instances of every suite; the summary is independent of ``jobs``."""
    names = list(suites or SUITES)
    tasks = [(name, seed, k, max_conductor, inject_fault) for name in names for k in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(task) for task in tasks]
    summary = {p: {"instances": 0, "failures": []} for p in PROPERTIES}
    for (name, _, k, _, _), checks in results:
        seen = set()
        for prop, ok, message in checks:
            entry = summary[prop]
            if (prop, k) not in seen:
                entry["instances"] += 1
                seen.add((prop, k))
            if not ok and not any(f["instance"] == k and f["suite"] == name for f in entry["failures"]):
                entry["failures"].append({"suite": name, "seed": seed, "instance": k, "message": message})
    properties = [
        {"property": p, "instances": v["instances"], "passed": not v["failures"], "failures": v["failures"]}
        for p, v in summary.items()
        if v["instances"]
    ]
    return {
        "seed": seed,
        "count": count,
        "max_conductor": max_conductor,
        "inject_fault": inject_fault,
        "passed": all(p["passed"] for p in properties),
        "properties": properties,
    }
