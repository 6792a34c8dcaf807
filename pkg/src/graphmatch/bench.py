"""Benchmark harness: matcher specs, kNN classification, timing, tuning.

A matcher is named by a compact text form, e.g. ``ged-beam(10)`` or
``r-ged(0.25,pagerank)``; ``MatcherSpec`` validates the text once and turns
graph pairs into distances.  On top of that sit a nearest-neighbor
classifier with deterministic tie-breaking, a wall-clock timing loop, and a
steepest-ascent search over the geometric distance weights.
"""

from __future__ import annotations

import re
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .centrality import MEASURES, r_centrality_ged, t_centrality_ged
from .contraction import hged, k_star_ged
from .datasets import DatasetSplit
from .editdist import DEFAULT_PARAMS, EditCostParams, ged, ged_bipartite
from .geometric import DistanceWeights, GeometricGraph, geometric_graph_distance

METHODS = (
    "ged",
    "ged-beam",
    "bipartite",
    "hged",
    "kstar-ged",
    "r-ged",
    "t-ged",
    "geometric",
)


def _int_arg(text: str, what: str, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ValueError(f"{what} must be an integer, got {text!r}") from None
    if value < minimum:
        raise ValueError(f"{what} must be >= {minimum}, got {value}")
    return value


def _float_arg(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"{what} must be a number, got {text!r}") from None


def _parse_method(text: str) -> tuple[str, list[str]]:
    m = re.fullmatch(r"\s*([a-z-]+)\s*(?:\((.*)\))?\s*", text)
    if m is None or m.group(1) not in METHODS:
        raise ValueError(f"unknown matcher {text!r} (one of {', '.join(METHODS)})")
    name = m.group(1)
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
    return name, args


@dataclass(frozen=True)
class MatcherSpec:
    """A named graph distance plus its edit-cost constants.

    Method forms: ``ged``, ``ged-beam(w)``, ``bipartite``, ``hged[(w)]``,
    ``kstar-ged(k[,w])``, ``r-ged(r,measure)``, ``t-ged(t,measure)``,
    ``geometric(w1,w2,w3,w4[,align])`` with w >= 1, k >= 0, 0 <= r <= 1.
    """

    method: str
    cost_params: EditCostParams = DEFAULT_PARAMS

    def __post_init__(self):
        _compiled(self.method, self.cost_params)

    def distance(self, g1, g2) -> float:
        return _compiled(self.method, self.cost_params)(g1, g2)


@lru_cache(maxsize=None)
def _compiled(method: str, p: EditCostParams):
    name, args = _parse_method(method)
    if name == "ged":
        if args:
            raise ValueError("ged takes no arguments")
        return lambda a, b: ged(a, b, p).total_cost
    if name == "ged-beam":
        if len(args) != 1:
            raise ValueError("ged-beam takes exactly (w)")
        w = _int_arg(args[0], "beam width", 1)
        return lambda a, b: ged(a, b, p, beam_width=w).total_cost
    if name == "bipartite":
        if args:
            raise ValueError("bipartite takes no arguments")
        return lambda a, b: ged_bipartite(a, b, p).total_cost
    if name == "hged":
        if len(args) > 1:
            raise ValueError("hged takes at most (w)")
        w = _int_arg(args[0], "beam width", 1) if args else None
        return lambda a, b: hged(a, b, p, beam_width=w).total_cost
    if name == "kstar-ged":
        if len(args) not in (1, 2):
            raise ValueError("kstar-ged takes (k) or (k,w)")
        k = _int_arg(args[0], "k", 0)
        w = _int_arg(args[1], "beam width", 1) if len(args) == 2 else None
        return lambda a, b: k_star_ged(a, b, k, p, beam_width=w).total_cost
    if name in ("r-ged", "t-ged"):
        if len(args) != 2:
            raise ValueError(f"{name} takes exactly (value,measure)")
        measure = args[1]
        if measure not in MEASURES:
            raise ValueError(f"unknown measure {measure!r} (one of {', '.join(MEASURES)})")
        if name == "r-ged":
            r = _float_arg(args[0], "r")
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"r must be in [0, 1], got {r}")
            return lambda a, b: r_centrality_ged(a, b, r, measure, p).total_cost
        t = _int_arg(args[0], "t", 0)
        return lambda a, b: t_centrality_ged(a, b, t, measure, p).total_cost
    if len(args) not in (4, 5):
        raise ValueError("geometric takes (w1,w2,w3,w4) or (w1,w2,w3,w4,align)")
    weights = DistanceWeights(*(_float_arg(a, "weight") for a in args[:4]))
    align = False
    if len(args) == 5:
        if args[4] != "align":
            raise ValueError(f"fifth geometric argument must be 'align', got {args[4]!r}")
        align = True

    def geometric_distance(a, b):
        if not isinstance(a, GeometricGraph) or not isinstance(b, GeometricGraph):
            raise ValueError("geometric matcher needs graphs with coordinates")
        return geometric_graph_distance(a, b, weights, align=align)

    return geometric_distance


def split_method_list(text: str) -> list[str]:
    """Split a comma-separated method list, ignoring commas inside parens."""
    parts = [p.strip() for p in re.split(r",(?![^()]*\))", text)]
    return [p for p in parts if p]


# -- nearest-neighbor classification -----------------------------------------


@dataclass(frozen=True)
class BenchResult:
    method: MatcherSpec
    per_class_accuracy: dict[str, float]
    mean_accuracy: float
    mean_time_ms: float
    pair_count: int
    failures: tuple[str, ...] = ()

    def __post_init__(self):
        values = [self.mean_accuracy, *self.per_class_accuracy.values()]
        if not all(0.0 <= v <= 100.0 for v in values):
            raise ValueError("accuracies must be percentages")
        if self.mean_time_ms < 0:
            raise ValueError("mean_time_ms must be >= 0")


def _distance_row(matcher, test_inst, train):
    """Distances from one test instance to every training instance.

    Returns (distances, times, failures); failed pairs hold None and are
    excluded from timing.
    """
    distances, times, failures = [], [], []
    for train_inst in train.instances:
        start = time.perf_counter()
        try:
            d = matcher.distance(test_inst.graph, train_inst.graph)
        except (ValueError, TypeError) as e:
            distances.append(None)
            failures.append(f"{test_inst.source_id} vs {train_inst.source_id}: {e}")
            continue
        times.append(time.perf_counter() - start)
        distances.append(d)
    return distances, times, failures


def _worker_row(args):
    matcher, test_inst, train = args
    return _distance_row(matcher, test_inst, train)


def _vote(distances, train, k: int) -> str | None:
    """Majority class among the k nearest; ties fall to the candidate class
    with the smaller summed distance inside the neighborhood, then to the
    lexicographically smaller name.  None when every pair failed.
    """
    ranked = sorted(
        (d, i) for i, d in enumerate(distances) if d is not None
    )[:k]
    if not ranked:
        return None
    votes = Counter(train.instances[i].class_label for _, i in ranked)
    top = max(votes.values())
    tied = [c for c, count in votes.items() if count == top]
    if len(tied) == 1:
        return tied[0]
    sums = {
        c: sum(d for d, i in ranked if train.instances[i].class_label == c)
        for c in tied
    }
    return min(tied, key=lambda c: (sums[c], c))


def _audit_predictions(rows, train, k, predictions):
    # independent re-check straight from the distance matrix
    for row, predicted in zip(rows, predictions):
        pairs = [(d, train.instances[i].class_label) for i, d in enumerate(row) if d is not None]
        pairs.sort()
        head = pairs[:k]
        if not head:
            recheck = None
        else:
            counts = Counter(label for _, label in head)
            recheck = min(
                counts,
                key=lambda c: (-counts[c], sum(d for d, l in head if l == c), c),
            )
        if recheck != predicted:
            raise RuntimeError(
                f"audit mismatch: {predicted!r} classified, {recheck!r} rechecked"
            )


def knn_classify(
    train: DatasetSplit,
    test: DatasetSplit,
    matcher: MatcherSpec,
    k: int,
    *,
    jobs: int = 1,
    audit: bool = False,
) -> BenchResult:
    """Classify each test instance by majority vote of its k nearest
    training instances under the matcher's distance.

    Accuracy is the percentage of correctly labeled test instances, overall
    and per class.  Pairs on which the matcher raises are recorded as
    failures, excluded from timing, and leave the test instance to be
    classified from whatever distances remain (none at all counts as a
    miss).  ``jobs`` > 1 spreads test rows over processes; timing stays
    per-pair wall clock either way.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not train.instances or not test.instances:
        raise ValueError("train and test splits must be nonempty")
    if jobs > 1:
        work = [(matcher, inst, train) for inst in test.instances]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker_row, work))
    else:
        results = [_distance_row(matcher, inst, train) for inst in test.instances]

    rows = [r[0] for r in results]
    times = [t for r in results for t in r[1]]
    failures = tuple(f for r in results for f in r[2])
    predictions = [_vote(row, train, k) for row in rows]
    if audit:
        _audit_predictions(rows, train, k, predictions)

    per_class_total = Counter(inst.class_label for inst in test.instances)
    per_class_hit: Counter[str] = Counter()
    for inst, predicted in zip(test.instances, predictions):
        if predicted == inst.class_label:
            per_class_hit[inst.class_label] += 1
    correct = sum(per_class_hit.values())
    return BenchResult(
        method=matcher,
        per_class_accuracy={
            c: 100.0 * per_class_hit[c] / total for c, total in sorted(per_class_total.items())
        },
        mean_accuracy=100.0 * correct / len(test.instances),
        mean_time_ms=1000.0 * statistics.mean(times) if times else 0.0,
        pair_count=len(times),
        failures=failures,
    )


# -- timing ------------------------------------------------------------------


@dataclass(frozen=True)
class TimingSummary:
    method: str
    pair_count: int
    mean_ms: float
    median_ms: float
    min_ms: float
    distances: tuple[float, ...] = field(default=(), repr=False)


def benchmark(pairs, matcher: MatcherSpec, repetitions: int = 3) -> TimingSummary:
    """Wall-clock the matcher over a list of graph pairs.

    Each pair runs ``repetitions`` times (no warmup) and contributes its
    fastest time; the summary aggregates mean/median/min across pairs.  The
    distance of each pair is kept for cross-method comparison plots.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    per_pair_ms, distances = [], []
    for g1, g2 in pairs:
        best = None
        d = 0.0
        for _ in range(repetitions):
            start = time.perf_counter()
            d = matcher.distance(g1, g2)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        per_pair_ms.append(1000.0 * best)
        distances.append(d)
    if not per_pair_ms:
        return TimingSummary(matcher.method, 0, 0.0, 0.0, 0.0)
    return TimingSummary(
        matcher.method,
        len(per_pair_ms),
        statistics.mean(per_pair_ms),
        statistics.median(per_pair_ms),
        min(per_pair_ms),
        tuple(distances),
    )


# -- weight search -----------------------------------------------------------


def _normalized(values) -> DistanceWeights:
    total = sum(values)
    if total <= 0:
        raise ValueError("weights must have a positive sum")
    return DistanceWeights(*(v / total for v in values))


def _weighted_accuracy(train, validation, weights, align):
    correct = 0
    for inst in validation.instances:
        best = None
        for other in train.instances:
            d = geometric_graph_distance(inst.graph, other.graph, weights, align=align)
            key = (d, other.source_id)
            if best is None or key < best[0]:
                best = (key, other.class_label)
        if best is not None and best[1] == inst.class_label:
            correct += 1
    return correct / len(validation.instances)


def tune_weights(
    train: DatasetSplit,
    validation: DatasetSplit,
    start: DistanceWeights = DistanceWeights(0.25, 0.25, 0.25, 0.25),
    delta: float = 0.02,
    align: bool = False,
) -> DistanceWeights:
    """Steepest-ascent search over the geometric distance weights.

    Starting from ``start`` normalized onto the simplex, repeatedly take the
    single +/-delta coordinate move (renormalized) that most improves 1-NN
    validation accuracy; stop when no move improves it.  Deterministic:
    moves are tried in a fixed order and only strict improvements are taken.
    """
    if not train.instances or not validation.instances:
        raise ValueError("train and validation splits must be nonempty")
    if delta <= 0:
        raise ValueError("delta must be > 0")
    current = _normalized(start.as_tuple())
    current_accuracy = _weighted_accuracy(train, validation, current, align)
    while True:
        best_move = None
        for i in range(4):
            for step in (delta, -delta):
                moved = list(current.as_tuple())
                moved[i] += step
                if moved[i] < 0:
                    continue
                try:
                    candidate = _normalized(moved)
                except ValueError:
                    continue
                accuracy = _weighted_accuracy(train, validation, candidate, align)
                if accuracy > current_accuracy and (
                    best_move is None or accuracy > best_move[0]
                ):
                    best_move = (accuracy, candidate)
        if best_move is None:
            return current
        current_accuracy, current = best_move
