"""JSON documents and reports.

A branch document is ``{"n": 4, "terms": [[6, "1"], [7, "1"]], "truncation": 20}``:
the x-component is ``t**n`` and ``terms`` lists the y-component as
``[exponent, scalar]`` pairs with scalars as exact strings.  Documents are
validated against the JSON schemas shipped in ``branchforge/schemas``.

Reports are plain JSON objects; :class:`Report` wraps one per command and
round-trips through :meth:`Report.to_json` and :meth:`Report.from_dict`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from importlib import resources

import jsonschema

from .branch import INFINITY, Preprocessed, PuiseuxBranch, SemigroupData, char_exponents, preprocess
from .contacts import DifferentialForm, LambdaData
from .errors import DocumentError, NonPrimitive
from .flows import EliminationStep
from .normalform import Equivalence, NormalForm
from .scalar import Scalar, ScalarParseError
from .series import BivariatePoly

__all__ = [
    "BranchDocument",
    "Report",
    "load_schema",
    "parse_json",
    "validate",
    "invariants_to_dict",
    "normal_form_to_dict",
    "step_to_dict",
    "form_to_dict",
    "form_from_dict",
    "equivalence_to_dict",
    "lambda_to_json",
    "lambda_from_json",
]


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """The JSON schema ``name`` (``"branch_document"`` or ``"pair_document"``)."""
    text = resources.files("branchforge").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def validate(doc, name: str, where: str = "") -> None:
    """Validate ``doc`` against a schema, raising :class:`DocumentError` with the failing path."""
    validator = jsonschema.Draft202012Validator(load_schema(name))
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        path = "/".join(str(p) for p in error.absolute_path)
        location = "/".join(p for p in (where, path) if p)
        raise DocumentError(f"{name} invalid at '/{location}': {error.message}")


def parse_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from exc


def lambda_to_json(lam):
    return "inf" if lam == INFINITY else int(lam)


def lambda_from_json(value):
    return INFINITY if value == "inf" else int(value)


def _terms_to_json(terms):
    return [[int(e), str(c)] for e, c in terms]


# ---------------------------------------------------------------------------
# branch documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchDocument:
    """A parsed, validated branch document."""

    n: int
    terms: tuple[tuple[int, Scalar], ...]
    truncation: int | None = None

    @classmethod
    def from_dict(cls, doc, where: str = "") -> "BranchDocument":
        validate(doc, "branch_document", where)
        terms = []
        previous = 0
        for k, (exponent, text) in enumerate(doc["terms"]):
            if exponent <= previous:
                raise DocumentError(f"/{where}terms/{k}: exponents must be strictly increasing")
            try:
                value = Scalar.parse(text)
            except ScalarParseError as exc:
                raise DocumentError(f"/{where}terms/{k}: {exc}") from exc
            if not value:
                raise DocumentError(f"/{where}terms/{k}: coefficients must be nonzero")
            terms.append((exponent, value))
            previous = exponent
        return cls(doc["n"], tuple(terms), doc.get("truncation"))

    @classmethod
    def from_json(cls, text: str) -> "BranchDocument":
        return cls.from_dict(parse_json(text))

    @classmethod
    def from_branch(cls, b: PuiseuxBranch) -> "BranchDocument":
        return cls(b.n, tuple(b.y_terms), b.truncation)

    def to_dict(self) -> dict:
        doc = {"n": self.n, "terms": _terms_to_json(self.terms)}
        if self.truncation is not None:
            doc["truncation"] = self.truncation
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def reparametrized(self) -> tuple["BranchDocument", int]:
        """Divide every exponent (and ``n``) by their common gcd ``g``: ``t -> t**(1/g)``."""
        g = math.gcd(self.n, *(e for e, _ in self.terms))
        if g == 1:
            return self, 1
        truncation = None if self.truncation is None else self.truncation // g
        return BranchDocument(self.n // g, tuple((e // g, c) for e, c in self.terms), truncation), g

    def preprocess(self, truncation: int | None = None, reparametrize: bool = False) -> tuple[Preprocessed, int]:
        """Bring the document to Puiseux form; returns ``(preprocessed, g)``.

        ``g > 1`` records a reparametrization ``t -> t**(1/g)`` applied to a
        non-primitive parametrization (only with ``reparametrize=True``).
        """
        doc, g = self.reparametrized() if reparametrize else (self, 1)
        N = truncation if truncation is not None else doc.truncation
        try:
            return preprocess(doc.n, dict(doc.terms), N), g
        except NonPrimitive as exc:
            raise NonPrimitive(f"{exc}; rerun with --reparametrize to divide exponents by their gcd") from exc


# ---------------------------------------------------------------------------
# report fragments
# ---------------------------------------------------------------------------


def invariants_to_dict(b: PuiseuxBranch, S: SemigroupData, lam: LambdaData) -> dict:
    return {
        "n": b.n,
        "m": b.m,
        "char_exponents": list(char_exponents(b)),
        "generators": list(S.generators),
        "conductor": S.conductor,
        "gaps": list(S.gaps),
        "symmetric": S.is_symmetric(),
        "Lambda": list(lam.orders),
        "Lambda_bound": lam.bound,
        "lambda": lambda_to_json(lam.lam),
    }


def _poly_to_json(p: BivariatePoly):
    return [[k, l, str(c)] for (k, l), c in sorted(p.coefficients.items())]


def _poly_from_json(rows) -> BivariatePoly:
    return BivariatePoly({(k, l): Scalar.parse(c) for k, l, c in rows})


def form_to_dict(w: DifferentialForm) -> dict:
    return {"A": _poly_to_json(w.A), "B": _poly_to_json(w.B), "text": str(w)}


def form_from_dict(d: dict) -> DifferentialForm:
    return DifferentialForm(_poly_from_json(d["A"]), _poly_from_json(d["B"]))


def step_to_dict(step: EliminationStep) -> dict:
    return {
        "j": step.j,
        "omega": form_to_dict(step.omega),
        "beta": str(step.beta),
        "s_j": str(step.s_j),
        "probes": [[str(s), str(c)] for s, c in step.probes],
    }


def normal_form_to_dict(nf: NormalForm) -> dict:
    b = nf.to_branch()
    return {
        "n": nf.n,
        "m": nf.m,
        "lambda": lambda_to_json(nf.lam),
        "coefficients": _terms_to_json(sorted(nf.coefficients.items())),
        "branch": BranchDocument.from_branch(b).to_dict(),
        "text": str(b),
    }


def _scalar_or_none(c):
    return None if c is None else str(c)


def equivalence_to_dict(e: Equivalence) -> dict:
    return {
        "equivalent": e.equivalent,
        "reason": e.reason,
        "constraints": [[k, str(c)] for k, c in e.constraints],
        "relations": [[list(v), str(p)] for v, p in e.relations],
        "failing_relation": None if e.failing_relation is None else [list(e.failing_relation[0]), str(e.failing_relation[1])],
        "r": _scalar_or_none(e.r),
        "r_power": None if e.r_power is None else [e.r_power[0], str(e.r_power[1])],
    }


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class Report:
    """Output of one CLI command; unset sections are omitted from the JSON."""

    command: str
    input: dict | None = None
    preprocessing: dict | None = None
    invariants: dict | None = None
    normal_form: dict | None = None
    audit: list | None = None
    equivalence: dict | None = None
    selftest: dict | None = None
    error: dict | None = None
    timing: dict | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise DocumentError(f"unknown report fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(parse_json(text))

    def to_json(self, pretty: bool = False) -> str:
        if pretty:
            return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"
