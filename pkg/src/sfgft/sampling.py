"""Sampling objectives, greedy selection, and representative partitioning.

The worst-case high-band error of the folded interpolator is minimized by
minimizing the |S|-th smallest generalized frequency of (M, Q(S)); that is
the exact objective. The approximate objective replaces the inverse of the
Q(S) blocks with a truncated Neumann series around the diagonal of M and
maximizes the smallest singular value of the rescaled coupling block
(order 0 uses just the diagonal). Both are exposed to a greedy selector,
an exhaustive oracle, and a round-robin partitioner that grows p disjoint
subsets one vertex at a time.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .core import SamplingSet, VariationOperator, build_inner_product, fixed_gft
from .errors import (
    EigFailure,
    InfeasibleSize,
    TooLarge,
    ValidationError,
)
from .parallel import thread_map

BRUTE_FORCE_LIMIT = 1_000_000


@dataclass(frozen=True)
class SamplingObjective:
    """Objective for scoring candidate sampling sets.

    kind "exact" evaluates the |S|-th generalized frequency (lower is
    better); kind "approx" evaluates the smallest singular value of the
    Neumann-rescaled coupling block at the given series order (higher is
    better). `score` folds the direction in so that greedy code can always
    maximize.
    """

    kind: str
    order: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "approx"):
            raise ValidationError(f"unknown objective kind {self.kind!r}")
        if self.order < 0:
            raise ValidationError("Neumann order must be non-negative")

    @staticmethod
    def from_spec(spec: str) -> "SamplingObjective":
        """Parse 'exact', 'approx0', or 'neumann:<k>'."""
        if spec == "exact":
            return SamplingObjective("exact")
        if spec == "approx0":
            return SamplingObjective("approx", 0)
        if spec.startswith("neumann:"):
            try:
                order = int(spec.split(":", 1)[1])
            except ValueError as exc:
                raise ValidationError(f"bad Neumann order in objective spec {spec!r}") from exc
            return SamplingObjective("approx", order)
        raise ValidationError(
            f"unknown objective spec {spec!r}; expected exact, approx0, or neumann:<k>"
        )

    @property
    def spec_string(self) -> str:
        if self.kind == "exact":
            return "exact"
        return "approx0" if self.order == 0 else f"neumann:{self.order}"

    @property
    def maximize(self) -> bool:
        return self.kind == "approx"

    def evaluate(self, m: VariationOperator, s: SamplingSet) -> float:
        if self.kind == "exact":
            return exact_objective(m, s)
        return approx_objective(m, s, self.order)

    def score(self, m: VariationOperator, s: SamplingSet) -> float:
        value = self.evaluate(m, s)
        return value if self.maximize else -value


DEFAULT_OBJECTIVE = SamplingObjective("approx", 0)


def exact_objective(m: VariationOperator, s: SamplingSet) -> float:
    """|S|-th smallest generalized frequency of (M, Q(S)).

    Requires |S| <= |S^c|; under that condition the value lies in [0, 1]
    and, by folding, equals 2 minus the matching frequency from the top of
    the spectrum.
    """
    if s.size > s.n - s.size:
        raise InfeasibleSize(
            f"exact objective needs |S| <= |S^c|, got |S|={s.size}, n={s.n}"
        )
    ip = build_inner_product(m, s)
    perm = s.permutation
    mp = m.matrix[np.ix_(perm, perm)]
    chol = sla.block_diag(ip.chol_s, ip.chol_sc)
    y = sla.solve_triangular(chol, mp, lower=True)
    a = sla.solve_triangular(chol, y.T, lower=True).T
    a = (a + a.T) / 2.0
    k = s.size
    try:
        vals = sla.eigh(a, eigvals_only=True, subset_by_index=[k - 1, k - 1])
    except sla.LinAlgError as exc:
        raise EigFailure(f"symmetric eigensolver failed: {exc}") from exc
    return float(vals[0])


def _neumann_factor(block: np.ndarray, order: int) -> np.ndarray:
    """Factor F with F F^T equal to the truncated Neumann inverse of block.

    The series is D^{-1/2} (sum_k E^k) D^{-1/2} with E = D^{-1/2} W D^{-1/2},
    D the diagonal of the block and W = D - block. Order 0 reduces to
    D^{-1/2}. Convergence needs the spectral radius of E below one; that is
    checked and warned about, not enforced.
    """
    d = np.diag(block)
    if np.any(d <= 0):
        raise ValidationError("Neumann rescaling needs strictly positive diagonal entries")
    inv_sqrt = 1.0 / np.sqrt(d)
    if order == 0:
        return np.diag(inv_sqrt)
    e = -(block * inv_sqrt[:, None] * inv_sqrt[None, :])
    np.fill_diagonal(e, 0.0)
    evals, evecs = np.linalg.eigh(e)
    radius = float(np.abs(evals).max()) if evals.size else 0.0
    if radius >= 1.0:
        warnings.warn(
            f"Neumann series does not converge: spectral radius {radius:.3f} >= 1",
            RuntimeWarning,
            stacklevel=3,
        )
    powers = np.ones_like(evals)
    partial = np.ones_like(evals)
    for _ in range(order):
        powers = powers * evals
        partial = partial + powers
    partial = np.clip(partial, 0.0, None)
    return inv_sqrt[:, None] * (evecs * np.sqrt(partial)[None, :])


def approx_objective(m: VariationOperator, s: SamplingSet, order: int = 0) -> float:
    """Smallest singular value of the Neumann-rescaled coupling block.

    Order 0 is sigma_min(D_S^{-1/2} M_S,Sc D_Sc^{-1/2}); higher orders use
    the order-k partial sum of the Neumann expansion of each Q(S) block
    inverse. As the order grows (and the series converges) the value tends
    to 1 minus the exact objective.
    """
    if order < 0:
        raise ValidationError("Neumann order must be non-negative")
    s_idx = s.index_array
    sc_idx = s.complement
    coupling = m.matrix[np.ix_(s_idx, sc_idx)]
    f_s = _neumann_factor(m.matrix[np.ix_(s_idx, s_idx)], order)
    f_sc = _neumann_factor(m.matrix[np.ix_(sc_idx, sc_idx)], order)
    rescaled = f_s.T @ coupling @ f_sc
    sigmas = sla.svdvals(rescaled)
    return float(sigmas[-1])


def _pick_best(scores: list[float], candidates: list[int]) -> int:
    """Return the candidate with the highest score; ties go to the lowest id.

    Candidates arrive in ascending vertex order, so a strict comparison
    keeps the first (lowest-id) maximizer.
    """
    best_idx = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best_idx]:
            best_idx = i
    return candidates[best_idx]


def greedy_select(
    m: VariationOperator,
    size: int,
    objective: SamplingObjective = DEFAULT_OBJECTIVE,
    threads: int = 1,
) -> SamplingSet:
    """Grow a sampling set one vertex at a time, maximizing the objective score.

    Deterministic: candidates are scanned in ascending vertex order and
    ties keep the lowest id, so serial and threaded runs agree exactly.
    The returned set stores vertices in insertion order.
    """
    n = m.n
    if size < 1 or 2 * size > n:
        raise InfeasibleSize(f"greedy selection needs 1 <= s <= n/2, got s={size}, n={n}")
    chosen: list[int] = []
    remaining = list(range(n))
    for _ in range(size):
        candidates = remaining

        def trial(q: int) -> float:
            return objective.score(m, SamplingSet(n, tuple(chosen) + (q,)))

        scores = thread_map(trial, candidates, threads)
        winner = _pick_best(scores, candidates)
        chosen.append(winner)
        remaining = [q for q in remaining if q != winner]
    return SamplingSet(n, tuple(chosen))


def brute_force_select(
    m: VariationOperator, size: int, objective: SamplingObjective = DEFAULT_OBJECTIVE
) -> SamplingSet:
    """Exhaustive optimum over all size-s subsets (testing oracle).

    Subsets are scanned in lexicographic order with strict improvement, so
    ties resolve to the lexicographically first optimum. Guarded by a
    budget on the number of combinations.
    """
    n = m.n
    if size < 1 or 2 * size > n:
        raise InfeasibleSize(f"brute force needs 1 <= s <= n/2, got s={size}, n={n}")
    count = math.comb(n, size)
    if count > BRUTE_FORCE_LIMIT:
        raise TooLarge(
            f"C({n},{size}) = {count} exceeds the enumeration budget {BRUTE_FORCE_LIMIT}"
        )
    best: tuple[int, ...] | None = None
    best_score = -math.inf
    for combo in itertools.combinations(range(n), size):
        score = objective.score(m, SamplingSet(n, combo))
        if score > best_score:
            best_score = score
            best = combo
    assert best is not None
    return SamplingSet(n, best)


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of the vertex set by sampling subsets.

    Subset sizes differ by at most one (round-robin growth); provenance
    records the generating algorithm, objective, and any seed.
    """

    subsets: tuple[SamplingSet, ...]
    provenance: dict

    def __post_init__(self):
        if not self.subsets:
            raise ValidationError("a partition needs at least one subset")
        n = self.subsets[0].n
        seen: set[int] = set()
        total = 0
        for subset in self.subsets:
            if subset.n != n:
                raise ValidationError("all subsets must share the same vertex count")
            ids = set(subset.indices)
            if ids & seen:
                raise ValidationError("partition subsets are not disjoint")
            seen |= ids
            total += subset.size
        if total != n:
            raise ValidationError(f"partition covers {total} of {n} vertices")
        sizes = self.sizes
        if max(sizes) - min(sizes) > 1:
            raise ValidationError(f"partition is unbalanced: sizes {sizes}")

    @property
    def n(self) -> int:
        return self.subsets[0].n

    @property
    def p(self) -> int:
        return len(self.subsets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(subset.size for subset in self.subsets)


def _round_robin(n: int, p: int, pick):
    """Shared loop: at step i (1-based) subset i mod p receives pick(...)."""
    members: list[list[int]] = [[] for _ in range(p)]
    remaining = list(range(n))
    for i in range(1, n + 1):
        target = i % p
        if len(remaining) == 1:
            winner = remaining[0]
        else:
            winner = pick(members[target], remaining)
        members[target].append(winner)
        remaining.remove(winner)
    return members


def _check_partition_args(n: int, p: int) -> None:
    if p < 2:
        raise InfeasibleSize(f"partitioning needs p >= 2, got p={p}")
    if p > n:
        raise InfeasibleSize(f"partitioning needs p <= n, got p={p}, n={n}")


def partition_greedy(
    m: VariationOperator,
    p: int,
    objective: SamplingObjective = DEFAULT_OBJECTIVE,
    threads: int = 1,
) -> Partition:
    """Round-robin greedy partitioning driven by a sampling objective.

    Subsets take turns receiving one vertex each; the vertex chosen is the
    unassigned one whose addition gives the subset the best objective
    score, with ties broken by lowest vertex id. For the first vertex of a
    subset the objective is evaluated on the singleton directly.
    """
    n = m.n
    _check_partition_args(n, p)

    def pick(current: list[int], remaining: list[int]) -> int:
        def trial(q: int) -> float:
            return objective.score(m, SamplingSet(n, tuple(current) + (q,)))

        scores = thread_map(trial, remaining, threads)
        return _pick_best(scores, remaining)

    members = _round_robin(n, p, pick)
    subsets = tuple(SamplingSet(n, tuple(ids)) for ids in members)
    provenance = {"algorithm": "greedy-fold", "objective": objective.spec_string}
    return Partition(subsets, provenance)


def partition_baseline(
    m: VariationOperator,
    p: int,
    kind: str,
    seed: int | None = None,
    bandwidth: int | None = None,
    threads: int = 1,
) -> Partition:
    """Reference partitioners: seeded random, or fixed-transform greedy.

    "random" deals a seeded shuffle round-robin. "fixed-gft" runs the same
    round-robin greedy loop but scores a candidate subset by the smallest
    singular value of its rows in the first `bandwidth` eigenvectors of M
    under the identity inner product (a classical bandlimited criterion).
    """
    n = m.n
    _check_partition_args(n, p)
    if kind == "random":
        if seed is None:
            raise ValidationError("random partitioning requires an explicit seed")
        order = np.random.default_rng(seed).permutation(n)
        members: list[list[int]] = [[] for _ in range(p)]
        for i in range(1, n + 1):
            members[i % p].append(int(order[i - 1]))
        subsets = tuple(SamplingSet(n, tuple(ids)) for ids in members)
        return Partition(subsets, {"algorithm": "random", "seed": seed})
    if kind == "fixed-gft":
        if bandwidth is None or bandwidth < 1:
            raise ValidationError("fixed-gft partitioning requires a positive bandwidth")
        _, vectors = fixed_gft(m)
        leading = vectors[:, :bandwidth]

        def pick(current: list[int], remaining: list[int]) -> int:
            def trial(q: int) -> float:
                rows = leading[current + [q], :]
                return float(sla.svdvals(rows)[-1])

            scores = thread_map(trial, remaining, threads)
            return _pick_best(scores, remaining)

        members = _round_robin(n, p, pick)
        subsets = tuple(SamplingSet(n, tuple(ids)) for ids in members)
        return Partition(
            subsets, {"algorithm": "fixed-gft-greedy", "bandwidth": int(bandwidth)}
        )
    raise ValidationError(f"unknown baseline kind {kind!r}; expected random or fixed-gft")
