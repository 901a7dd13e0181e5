"""Weighted chain ranking: score assignment, validation rules, benefit totals.

A policy gives each metric an integer weight in 0..5 and a score assignment
(ordered intervals mapping the metric scalar to a score in 0..4). A chain's
benefit is the sum of weight * score over all eight metrics; validation rules
(per-metric threshold comparisons combined through a boolean formula) gate
which chains may win at all. The miner-share map (m6) is reduced to the
biggest miner's percentage before scoring and validation.
"""

from __future__ import annotations

import ast
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .core import ConfigError
from .metrics import METRIC_KEYS, MetricVector

MAX_WEIGHT = 5
MAX_SCORE = 4

_OPS = {
    "<": lambda v, t: v < t,
    "<=": lambda v, t: v <= t,
    ">": lambda v, t: v > t,
    ">=": lambda v, t: v >= t,
    "==": lambda v, t: v == t,
    "!=": lambda v, t: v != t,
}


class SwitchMode(Enum):
    AUTO_SWITCH = "auto-switch"
    REQUIRE_APPROVAL = "require-approval"


@dataclass(frozen=True)
class ScorePiece:
    lo: float
    hi: float  # math.inf for the unbounded top piece
    score: int


@dataclass(frozen=True)
class ScoreAssignment:
    """Ordered half-open intervals [lo, hi) covering [0, inf), each with a score.

    The top piece absorbs all values >= its lower bound, which also makes a
    closed final interval such as [8, 10] behave correctly for reputation.
    """

    metric: str
    pieces: tuple[ScorePiece, ...]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ConfigError(f"{self.metric}: score assignment needs at least one interval")
        expected_lo = 0.0
        for piece in self.pieces:
            if piece.lo != expected_lo:
                raise ConfigError(
                    f"{self.metric}: intervals must tile [0, inf) without gaps; "
                    f"expected lower bound {expected_lo}, got {piece.lo}"
                )
            if piece.hi <= piece.lo:
                raise ConfigError(f"{self.metric}: empty interval [{piece.lo}, {piece.hi})")
            if not 0 <= piece.score <= MAX_SCORE:
                raise ConfigError(f"{self.metric}: score {piece.score} outside 0..{MAX_SCORE}")
            expected_lo = piece.hi

    def apply(self, value: float) -> int:
        """Score for ``value``; +inf lands in the top interval."""
        value = float(value)
        if value < 0:
            raise ConfigError(f"{self.metric}: metric value {value} below domain")
        los = [p.lo for p in self.pieces]
        return self.pieces[bisect_right(los, value) - 1].score


def constant_saf(metric: str, score: int) -> ScoreAssignment:
    return ScoreAssignment(metric, (ScorePiece(0.0, math.inf, score),))


@dataclass(frozen=True)
class ValidationRule:
    """Single-metric requirement: compare the metric scalar against a threshold."""

    metric: str
    op: str  # one of < <= > >= == != or "always"
    threshold: float | None = None

    def __post_init__(self) -> None:
        if self.op != "always" and self.op not in _OPS:
            raise ConfigError(f"unknown validation operator {self.op!r}")
        if self.op != "always" and self.threshold is None:
            raise ConfigError(f"{self.metric}: comparison rule needs a threshold")

    def evaluate(self, value: float) -> bool:
        if self.op == "always":
            return True
        return _OPS[self.op](float(value), self.threshold)


ALWAYS_TRUE = {key: ValidationRule(key, "always") for key in METRIC_KEYS}


class CombinationFormula:
    """Boolean expression over m1..m8 deciding overall chain validity.

    Grammar: ``and`` / ``or`` / ``not`` over the metric identifiers with
    parentheses, e.g. ``"m6 and m7 and (m1 or m3)"``. Parsed through the
    Python AST restricted to exactly those node types.
    """

    def __init__(self, expression: str | None = None) -> None:
        self.expression = expression or " and ".join(METRIC_KEYS)
        try:
            tree = ast.parse(self.expression, mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"invalid combination formula: {exc}") from exc
        self._validate(tree.body)
        self._code = compile(tree, "<combination-formula>", "eval")

    def _validate(self, node: ast.AST) -> None:
        if isinstance(node, ast.BoolOp) and isinstance(node.op, (ast.And, ast.Or)):
            for sub in node.values:
                self._validate(sub)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
            self._validate(node.operand)
        elif isinstance(node, ast.Name):
            if node.id not in METRIC_KEYS:
                raise ConfigError(f"combination formula references unknown name {node.id!r}")
        else:
            raise ConfigError(
                "combination formula may only use and/or/not over m1..m8, "
                f"found {type(node).__name__}"
            )

    def evaluate(self, per_metric: Mapping[str, bool]) -> bool:
        return bool(eval(self._code, {"__builtins__": {}}, dict(per_metric)))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CombinationFormula) and other.expression == self.expression


@dataclass(frozen=True)
class ValidationResult:
    """Eight per-metric validity flags plus the combined overall flag."""

    per_metric: tuple[bool, bool, bool, bool, bool, bool, bool, bool]
    overall: bool

    def as_dict(self) -> dict[str, bool]:
        out = {key: flag for key, flag in zip(METRIC_KEYS, self.per_metric)}
        out["overall"] = self.overall
        return out

    def flag(self, key: str) -> bool:
        return self.per_metric[METRIC_KEYS.index(key)]


@dataclass(frozen=True)
class TransferStrategy:
    name: str
    days: float | None = None


@dataclass(frozen=True)
class RankingPolicy:
    """Everything the operator configures about selection and switchover."""

    weights: dict[str, int]
    safs: dict[str, ScoreAssignment]
    rules: dict[str, ValidationRule] = field(default_factory=lambda: dict(ALWAYS_TRUE))
    formula: CombinationFormula = field(default_factory=CombinationFormula)
    suppression_period_s: float = 0.0
    mode: SwitchMode = SwitchMode.REQUIRE_APPROVAL
    transfer_strategy: TransferStrategy = TransferStrategy("none")

    def __post_init__(self) -> None:
        for key in METRIC_KEYS:
            if key not in self.weights:
                raise ConfigError(f"policy is missing a weight for {key}")
            if key not in self.safs:
                raise ConfigError(f"policy is missing a score assignment for {key}")
            if not 0 <= self.weights[key] <= MAX_WEIGHT:
                raise ConfigError(f"weight for {key} outside 0..{MAX_WEIGHT}")
        if self.suppression_period_s < 0:
            raise ConfigError("suppression period must be >= 0")


def validate(policy: RankingPolicy, vector: MetricVector) -> ValidationResult:
    """Apply every metric rule to the vector and combine via the policy formula."""
    flags = tuple(
        policy.rules.get(key, ALWAYS_TRUE[key]).evaluate(vector.scalar(key))
        for key in METRIC_KEYS
    )
    overall = policy.formula.evaluate(dict(zip(METRIC_KEYS, flags)))
    return ValidationResult(per_metric=flags, overall=overall)  # type: ignore[arg-type]


@dataclass(frozen=True)
class ChainRanking:
    """One chain's row in a ranking result."""

    chain: str
    scores: dict[str, int]
    weighted_scores: dict[str, int]
    benefit: int
    validation: ValidationResult
    eligible: bool
    stale: bool


@dataclass(frozen=True)
class RankingResult:
    per_chain: tuple[ChainRanking, ...]
    winner: str | None
    computed_at: float

    def row(self, chain: str) -> ChainRanking | None:
        for entry in self.per_chain:
            if entry.chain == chain:
                return entry
        return None


def score_vector(policy: RankingPolicy, vector: MetricVector) -> dict[str, int]:
    return {key: policy.safs[key].apply(vector.scalar(key)) for key in METRIC_KEYS}


def rank(
    policy: RankingPolicy,
    vectors: Sequence[MetricVector],
    active: str | None = None,
    stale: frozenset[str] | set[str] = frozenset(),
    now: float | None = None,
) -> RankingResult:
    """Rank all supplied vectors and pick the winner among eligible chains.

    A chain is eligible when its validation passes and its vector is fresh
    (chains with empty windows never reach this function: no vector, no row).
    Ties prefer the active chain, then the lexicographically smallest id, so
    repeated evaluations never oscillate.
    """
    rows: list[ChainRanking] = []
    for vector in vectors:
        scores = score_vector(policy, vector)
        weighted = {key: policy.weights[key] * scores[key] for key in METRIC_KEYS}
        validation = validate(policy, vector)
        is_stale = vector.chain in stale
        rows.append(
            ChainRanking(
                chain=vector.chain,
                scores=scores,
                weighted_scores=weighted,
                benefit=sum(weighted.values()),
                validation=validation,
                eligible=validation.overall and not is_stale,
                stale=is_stale,
            )
        )

    winner: str | None = None
    best: ChainRanking | None = None
    for row in rows:
        if not row.eligible:
            continue
        if best is None or row.benefit > best.benefit:
            best = row
        elif row.benefit == best.benefit:
            if row.chain == active and best.chain != active:
                best = row
            elif best.chain != active and row.chain < best.chain:
                best = row
    if best is not None:
        winner = best.chain

    ts = now if now is not None else (max((v.computed_at for v in vectors), default=0.0))
    return RankingResult(per_chain=tuple(rows), winner=winner, computed_at=ts)


# --------------------------------------------------------------------------
# Policy document (the JSON-facing representation)
# --------------------------------------------------------------------------

def _piece_from_triple(metric: str, triple: Sequence) -> ScorePiece:
    if len(triple) != 3:
        raise ConfigError(f"{metric}: interval must be a [lo, hi, score] triple, got {triple!r}")
    lo, hi, score = triple
    hi_val = math.inf if (isinstance(hi, str) and hi.lower() == "inf") else float(hi)
    return ScorePiece(lo=float(lo), hi=hi_val, score=int(score))


def policy_from_document(doc: Mapping) -> RankingPolicy:
    """Parse the declarative policy mapping used in config files and the API."""
    try:
        weights = {key: int(doc["weights"][key]) for key in METRIC_KEYS}
        safs = {
            key: ScoreAssignment(
                key,
                tuple(_piece_from_triple(key, t) for t in doc["safs"][key]),
            )
            for key in METRIC_KEYS
        }
    except KeyError as exc:
        raise ConfigError(f"policy document is missing {exc}") from exc

    rules = dict(ALWAYS_TRUE)
    validation = doc.get("validation", {})
    raw_rules = validation.get("rules", {})
    # accepted as a mapping keyed by metric, or a list of {"metric","op","threshold"}
    items = (
        raw_rules.items()
        if isinstance(raw_rules, Mapping)
        else ((entry["metric"], entry) for entry in raw_rules)
    )
    for key, raw in items:
        if key not in METRIC_KEYS:
            raise ConfigError(f"validation rule for unknown metric {key!r}")
        rules[key] = ValidationRule(
            metric=key, op=str(raw["op"]), threshold=float(raw["threshold"])
        )
    formula = CombinationFormula(validation.get("formula"))

    strategy_doc = doc.get("transfer_strategy", {"name": "none"})
    strategy = TransferStrategy(
        name=str(strategy_doc.get("name", "none")),
        days=float(strategy_doc["days"]) if "days" in strategy_doc else None,
    )

    return RankingPolicy(
        weights=weights,
        safs=safs,
        rules=rules,
        formula=formula,
        suppression_period_s=float(doc.get("suppression_period_s", 0.0)),
        mode=SwitchMode(doc.get("mode", "require-approval")),
        transfer_strategy=strategy,
    )


def policy_to_document(policy: RankingPolicy) -> dict:
    rules = {
        key: {"op": rule.op, "threshold": rule.threshold}
        for key, rule in policy.rules.items()
        if rule.op != "always"
    }
    doc: dict = {
        "weights": dict(policy.weights),
        "safs": {
            key: [
                [p.lo, "inf" if math.isinf(p.hi) else p.hi, p.score]
                for p in policy.safs[key].pieces
            ]
            for key in METRIC_KEYS
        },
        "validation": {"rules": rules, "formula": policy.formula.expression},
        "suppression_period_s": policy.suppression_period_s,
        "mode": policy.mode.value,
        "transfer_strategy": {"name": policy.transfer_strategy.name},
    }
    if policy.transfer_strategy.days is not None:
        doc["transfer_strategy"]["days"] = policy.transfer_strategy.days
    return doc
