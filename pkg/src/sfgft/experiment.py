"""Synthetic sensor-network experiment harness.

Pipeline: scatter sensors in the unit square, sample a spatial Gaussian
process with an exponential kernel at the sensor locations, estimate a
precision-based graph from the training draws, calibrate the bandwidth of
classical bandlimited reconstruction, partition the sensors into
representative sampling subsets, and compare reconstruction quality of the
fixed-transform and folded-transform interpolators on fresh test draws.

The graph estimator here is deliberately simple (radius-masked inverse of
the sample covariance, negative off-diagonal entries turned into Laplacian
weights). Comparisons are therefore meaningful as orderings and gaps
between methods on the same graph, not as absolute dB values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .core import SamplingSet, VariationOperator, compute_sf_gft, fixed_gft
from .errors import (
    CholeskyFailure,
    SingularCovariance,
    SingularNormalMatrix,
    ValidationError,
)
from .reconstruct import (
    bandlimited_interpolate,
    err_metric,
    sf_interpolate,
    snr_db_from_err,
)
from .sampling import (
    Partition,
    SamplingObjective,
    exact_objective,
    approx_objective,
    greedy_select,
    partition_baseline,
    partition_greedy,
)

FIXED_RECONSTRUCTOR = "fixed-bandlimited"
SF_RECONSTRUCTOR = "sf"
PROPOSED_PARTITIONER = "proposed"
RANDOM_PARTITIONER = "random"
FIXED_GFT_PARTITIONER = "fixed-gft-greedy"


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment grid.

    Mirrored one-to-one by the JSON config file. `ridge` is the absolute
    ridge added to the learned Laplacian (None picks 1e-8 * trace / n);
    `baseline_seeds` drive the random-partition baseline replicates;
    `bandwidth_grid` overrides the swept bandwidths (default: every value
    from 1 to the smallest probe-subset size).
    """

    n_sensors: int
    sigmas: tuple[float, ...]
    p_values: tuple[int, ...]
    seed: int
    n_train: int = 5000
    n_test: int = 500
    radius: float = 0.3
    baseline_seeds: tuple[int, ...] = (101, 102, 103, 104, 105)
    ridge: float | None = None
    neumann_order: int = 0
    probe_p: int = 5
    bandwidth_grid: tuple[int, ...] | None = None
    cov_shrinkage: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        object.__setattr__(self, "p_values", tuple(int(p) for p in self.p_values))
        object.__setattr__(self, "baseline_seeds", tuple(int(s) for s in self.baseline_seeds))
        if self.bandwidth_grid is not None:
            object.__setattr__(
                self, "bandwidth_grid", tuple(int(k) for k in self.bandwidth_grid)
            )
        if self.n_sensors < 4:
            raise ValidationError("need at least 4 sensors")
        if not self.sigmas or any(s <= 0 for s in self.sigmas):
            raise ValidationError("smoothness parameters must be positive")
        if not self.p_values or any(p < 2 for p in self.p_values):
            raise ValidationError("subset counts must all be >= 2")
        if any(p > self.n_sensors for p in self.p_values):
            raise ValidationError("subset count cannot exceed the sensor count")
        if self.n_train < self.n_sensors + 1:
            raise ValidationError("need at least n_sensors + 1 training draws")
        if self.n_test < 1:
            raise ValidationError("need at least one test draw")
        if not (0.0 < self.radius < math.sqrt(2.0)):
            raise ValidationError("radius must lie in (0, sqrt(2))")
        if not self.baseline_seeds:
            raise ValidationError("need at least one baseline seed")
        if self.probe_p < 2 or self.probe_p > self.n_sensors:
            raise ValidationError("probe partition count must satisfy 2 <= p <= n")
        if self.neumann_order < 0:
            raise ValidationError("Neumann order must be non-negative")
        if self.ridge is not None and self.ridge <= 0:
            raise ValidationError("ridge must be positive when given")
        if self.cov_shrinkage < 0:
            raise ValidationError("covariance shrinkage must be non-negative")

    @property
    def objective(self) -> SamplingObjective:
        return SamplingObjective("approx", self.neumann_order)

    def to_dict(self) -> dict:
        return {
            "n_sensors": self.n_sensors,
            "sigmas": list(self.sigmas),
            "p_values": list(self.p_values),
            "seed": self.seed,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "radius": self.radius,
            "baseline_seeds": list(self.baseline_seeds),
            "ridge": self.ridge,
            "neumann_order": self.neumann_order,
            "probe_p": self.probe_p,
            "bandwidth_grid": None if self.bandwidth_grid is None else list(self.bandwidth_grid),
            "cov_shrinkage": self.cov_shrinkage,
        }

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        known = {
            "n_sensors",
            "sigmas",
            "p_values",
            "seed",
            "n_train",
            "n_test",
            "radius",
            "baseline_seeds",
            "ridge",
            "neumann_order",
            "probe_p",
            "bandwidth_grid",
            "cov_shrinkage",
        }
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        missing = {"n_sensors", "sigmas", "p_values", "seed"} - set(data)
        if missing:
            raise ValidationError(f"config is missing required keys: {sorted(missing)}")
        kwargs = dict(data)
        kwargs["sigmas"] = tuple(kwargs["sigmas"])
        kwargs["p_values"] = tuple(kwargs["p_values"])
        if "baseline_seeds" in kwargs:
            kwargs["baseline_seeds"] = tuple(kwargs["baseline_seeds"])
        if kwargs.get("bandwidth_grid") is not None:
            kwargs["bandwidth_grid"] = tuple(kwargs["bandwidth_grid"])
        return ExperimentConfig(**kwargs)


@dataclass(frozen=True)
class GPField:
    """Gaussian process restricted to fixed sensor locations.

    cov[i, j] = exp(-d_ij / sigma^2) with d the Euclidean distance in the
    unit square; chol is the (possibly jittered) lower Cholesky factor used
    for drawing realizations.
    """

    sigma: float
    locations: np.ndarray
    cov: np.ndarray
    chol: np.ndarray


def gp_covariance(locations: np.ndarray, sigma: float) -> np.ndarray:
    """Exponential-kernel covariance between sensor locations."""
    locations = np.asarray(locations, dtype=float)
    if locations.ndim != 2 or locations.shape[1] != 2:
        raise ValidationError(f"locations must be (n, 2), got {locations.shape}")
    if sigma <= 0:
        raise ValidationError("smoothness parameter must be positive")
    diff = locations[:, None, :] - locations[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    return np.exp(-dist / sigma**2)


def _chol_with_jitter(cov: np.ndarray) -> np.ndarray:
    """Cholesky with escalating jitter; CholeskyFailure after six attempts."""
    n = cov.shape[0]
    jitter = 0.0
    for attempt in range(7):
        try:
            return sla.cholesky(cov + jitter * np.eye(n), lower=True)
        except sla.LinAlgError:
            jitter = 1e-10 * n if jitter == 0.0 else jitter * 10.0
    raise CholeskyFailure(
        f"covariance factorization failed even with jitter {jitter:.3e}"
    )


def _seed_streams(seed: int) -> tuple[np.random.SeedSequence, ...]:
    return tuple(np.random.SeedSequence(seed).spawn(3))


def sample_gp(field: GPField, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `count` i.i.d. realizations, one per row."""
    z = rng.standard_normal((count, field.locations.shape[0]))
    return z @ field.chol.T


def gen_field(
    config: ExperimentConfig, sigma: float, seed: int | None = None
) -> tuple[GPField, np.ndarray]:
    """Scatter sensors and draw the training realizations.

    Locations depend only on the seed (not on sigma), so every smoothness
    level sees the same sensor layout; training and test draws come from
    separate child streams of the same seed.
    """
    seed = config.seed if seed is None else seed
    loc_stream, train_stream, _ = _seed_streams(seed)
    locations = np.random.default_rng(loc_stream).random((config.n_sensors, 2))
    cov = gp_covariance(locations, sigma)
    chol = _chol_with_jitter(cov)
    for arr in (locations, cov, chol):
        arr.setflags(write=False)
    field = GPField(float(sigma), locations, cov, chol)
    train = sample_gp(field, config.n_train, np.random.default_rng(train_stream))
    return field, train


def draw_test_signals(
    config: ExperimentConfig, field: GPField, seed: int | None = None
) -> np.ndarray:
    """Fresh evaluation realizations from the test stream of the seed."""
    seed = config.seed if seed is None else seed
    _, _, test_stream = _seed_streams(seed)
    return sample_gp(field, config.n_test, np.random.default_rng(test_stream))


def build_graph(
    realizations: np.ndarray,
    locations: np.ndarray,
    radius: float,
    ridge: float | None = None,
    shrinkage: float = 0.05,
) -> VariationOperator:
    """Estimate a radius-constrained Laplacian-plus-ridge operator.

    Inverts the shrunk sample covariance (shrinkage is relative to the
    mean diagonal and damps Wishart noise in the precision entries), keeps
    precision entries only between sensors within `radius` of each other,
    converts negative off-diagonal entries to nonnegative edge weights,
    and returns the combinatorial Laplacian of those weights plus a ridge.
    """
    realizations = np.asarray(realizations, dtype=float)
    locations = np.asarray(locations, dtype=float)
    n = locations.shape[0]
    if realizations.ndim != 2 or realizations.shape[1] != n:
        raise ValidationError(
            f"realizations must be (num_draws, {n}), got {realizations.shape}"
        )
    if realizations.shape[0] < n + 1:
        raise ValidationError(
            f"need at least {n + 1} realizations to invert the sample covariance"
        )
    if shrinkage < 0:
        raise ValidationError("covariance shrinkage must be non-negative")
    emp_cov = np.cov(realizations, rowvar=False)
    eps = max(shrinkage, 1e-8) * np.trace(emp_cov) / n
    precision = None
    for attempt in range(2):
        try:
            chol = sla.cholesky(emp_cov + eps * np.eye(n), lower=True)
            precision = sla.cho_solve((chol, True), np.eye(n))
            break
        except sla.LinAlgError:
            eps *= 1e4
    if precision is None:
        raise SingularCovariance(
            f"sample covariance stayed singular after raising ridge to {eps:.3e}"
        )
    diff = locations[:, None, :] - locations[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    mask = dist <= radius
    np.fill_diagonal(mask, False)
    precision = (precision + precision.T) / 2.0
    weights = np.where(mask, np.maximum(-precision, 0.0), 0.0)
    weights = (weights + weights.T) / 2.0
    laplacian = np.diag(weights.sum(axis=1)) - weights
    if ridge is None:
        trace = np.trace(laplacian)
        ridge = 1e-8 * trace / n if trace > 0 else 1e-8
    return VariationOperator(laplacian + ridge * np.eye(n))


def make_fixed_reconstructor(
    m: VariationOperator, bandwidth: int, gft: tuple[np.ndarray, np.ndarray]
):
    """Bandlimited reconstructor closure for err_metric.

    The bandwidth is capped at each subset's size (a subset cannot identify
    more coefficients than it has samples).
    """

    def reconstructor(subset: SamplingSet, x_s: np.ndarray) -> np.ndarray:
        k = min(bandwidth, subset.size)
        return bandlimited_interpolate(m, subset, x_s, k, inner=None, gft=gft)

    return reconstructor


def make_sf_reconstructor(m: VariationOperator):
    """Folded-transform reconstructor closure; caches one basis per subset."""
    cache: dict[tuple[int, ...], object] = {}

    def reconstructor(subset: SamplingSet, x_s: np.ndarray) -> np.ndarray:
        basis = cache.get(subset.indices)
        if basis is None:
            basis = compute_sf_gft(m, subset)
            cache[subset.indices] = basis
        return sf_interpolate(basis, x_s)

    return reconstructor


@dataclass(frozen=True)
class BandwidthCurve:
    """Reconstruction error as a function of bandwidth, plus its argmin."""

    bandwidths: tuple[int, ...]
    errors: tuple[float, ...]
    k_opt: int


def estimate_bandwidth(
    m: VariationOperator,
    signals: np.ndarray,
    probe: Partition,
    bandwidths: tuple[int, ...] | None = None,
    gft: tuple[np.ndarray, np.ndarray] | None = None,
) -> BandwidthCurve:
    """Sweep bandlimited reconstruction bandwidth and pick the error minimizer.

    Each probe subset acts as the sampling set once per bandwidth; errors
    average over subsets and signals. A bandwidth whose normal matrix is
    singular for some subset scores +inf. Ties resolve to the smallest
    bandwidth.
    """
    max_k = min(subset.size for subset in probe.subsets)
    if bandwidths is None:
        bandwidths = tuple(range(1, max_k + 1))
    else:
        bandwidths = tuple(int(k) for k in bandwidths)
        if not bandwidths or min(bandwidths) < 1 or max(bandwidths) > max_k:
            raise ValidationError(
                f"bandwidths must lie in [1, {max_k}] for this probe partition"
            )
    if gft is None:
        gft = fixed_gft(m)
    errors = []
    for k in bandwidths:
        try:
            report = err_metric(
                probe.subsets, make_fixed_reconstructor(m, k, gft), signals
            )
            errors.append(report.err)
        except SingularNormalMatrix:
            errors.append(math.inf)
    best = int(np.argmin(errors))
    return BandwidthCurve(bandwidths, tuple(errors), int(bandwidths[best]))


@dataclass(frozen=True)
class FrequencyCurves:
    """Exact vs order-0 objective values along one greedy selection run."""

    steps: tuple[int, ...]
    exact: tuple[float, ...]
    approx: tuple[float, ...]

    def mean_abs_gap(self) -> float:
        """Mean |exact - (1 - approx)| over the recorded steps."""
        exact = np.asarray(self.exact)
        approx = np.asarray(self.approx)
        return float(np.mean(np.abs(exact - (1.0 - approx))))


def frequency_curves(
    m: VariationOperator,
    size: int,
    objective: SamplingObjective | None = None,
    threads: int = 1,
) -> FrequencyCurves:
    """Run greedy selection and record both objectives at every prefix."""
    objective = SamplingObjective("approx", 0) if objective is None else objective
    selected = greedy_select(m, size, objective, threads=threads)
    steps, exact_vals, approx_vals = [], [], []
    for k in range(1, size + 1):
        prefix = SamplingSet(m.n, selected.indices[:k])
        steps.append(k)
        exact_vals.append(exact_objective(m, prefix))
        approx_vals.append(approx_objective(m, prefix, 0))
    return FrequencyCurves(tuple(steps), tuple(exact_vals), tuple(approx_vals))


@dataclass(frozen=True)
class ResultRow:
    sigma: float
    p: int
    partitioner: str
    reconstructor: str
    err: float
    snr_db: float


@dataclass(frozen=True)
class ResultTable:
    """One row per (sigma, p, partitioner, reconstructor) grid cell."""

    rows: tuple[ResultRow, ...]
    metadata: dict = field(default_factory=dict)

    def cell(self, sigma: float, p: int, partitioner: str, reconstructor: str) -> ResultRow:
        for row in self.rows:
            if (
                row.sigma == sigma
                and row.p == p
                and row.partitioner == partitioner
                and row.reconstructor == reconstructor
            ):
                return row
        raise KeyError((sigma, p, partitioner, reconstructor))


@dataclass(frozen=True)
class ExperimentArtifacts:
    """Everything run_table1 produces besides the main table."""

    table: ResultTable
    bandwidth_curves: tuple[tuple[float, BandwidthCurve], ...]
    frequency_curves: tuple[tuple[float, FrequencyCurves], ...]
    partitions: tuple[tuple[float, int, Partition], ...]
    random_detail: tuple[tuple[float, int, int, str, float], ...]


def run_table1(config: ExperimentConfig, threads: int = 1) -> ExperimentArtifacts:
    """Full comparison grid over (sigma, p, partitioner, reconstructor).

    For each smoothness level: draw the field, learn the graph, calibrate
    the fixed-transform bandwidth on a probe partition, then evaluate both
    reconstructors on partitions from the greedy partitioner, the
    fixed-transform greedy baseline, and seeded random baselines (random
    rows aggregate the error over the baseline seeds before converting to
    dB). Fully deterministic for a fixed config.
    """
    rows: list[ResultRow] = []
    bw_curves: list[tuple[float, BandwidthCurve]] = []
    freq_curves: list[tuple[float, FrequencyCurves]] = []
    partitions: list[tuple[float, int, Partition]] = []
    random_detail: list[tuple[float, int, int, str, float]] = []
    metadata: dict = {
        "config": config.to_dict(),
        "k_opt": {},
        "warnings": [],
        "conventions": {
            "snr_db": "-10*log10(err); random rows convert the seed-averaged err",
            "err": "partition-averaged relative reconstruction energy",
        },
    }
    objective = config.objective
    for sigma in config.sigmas:
        field_, train = gen_field(config, sigma)
        test = draw_test_signals(config, field_)
        m = build_graph(
            train, field_.locations, config.radius, config.ridge, config.cov_shrinkage
        )
        gft = fixed_gft(m)
        probe = partition_greedy(m, config.probe_p, objective, threads=threads)
        curve = estimate_bandwidth(m, train, probe, config.bandwidth_grid, gft=gft)
        k_opt = curve.k_opt
        metadata["k_opt"][repr(sigma)] = k_opt
        bw_curves.append((sigma, curve))
        freq_curves.append(
            (sigma, frequency_curves(m, min(100, m.n // 2), objective, threads=threads))
        )
        for p in config.p_values:
            if p * k_opt > m.n:
                msg = (
                    f"sigma={sigma}, p={p}: subsets of size ~{m.n // p} cannot carry "
                    f"the calibrated bandwidth {k_opt}; it is capped per subset"
                )
                warnings.warn(msg, RuntimeWarning, stacklevel=2)
                metadata["warnings"].append(msg)
            evaluated: list[tuple[str, Partition]] = [
                (PROPOSED_PARTITIONER, partition_greedy(m, p, objective, threads=threads)),
                (
                    FIXED_GFT_PARTITIONER,
                    partition_baseline(m, p, "fixed-gft", bandwidth=k_opt, threads=threads),
                ),
            ]
            partitions.append((sigma, p, evaluated[0][1]))
            for name, partition in evaluated:
                for recon_name, err in _evaluate_partition(m, partition, test, k_opt, gft):
                    rows.append(
                        ResultRow(sigma, p, name, recon_name, err, snr_db_from_err(err))
                    )
            # Random baseline: one row per reconstructor, err averaged over seeds.
            sums = {FIXED_RECONSTRUCTOR: 0.0, SF_RECONSTRUCTOR: 0.0}
            for seed in config.baseline_seeds:
                random_part = partition_baseline(m, p, "random", seed=seed)
                for recon_name, err in _evaluate_partition(m, random_part, test, k_opt, gft):
                    sums[recon_name] += err
                    random_detail.append((sigma, p, seed, recon_name, err))
            for recon_name in (FIXED_RECONSTRUCTOR, SF_RECONSTRUCTOR):
                mean_err = sums[recon_name] / len(config.baseline_seeds)
                rows.append(
                    ResultRow(
                        sigma, p, RANDOM_PARTITIONER, recon_name, mean_err,
                        snr_db_from_err(mean_err),
                    )
                )
    table = ResultTable(tuple(rows), metadata)
    return ExperimentArtifacts(
        table,
        tuple(bw_curves),
        tuple(freq_curves),
        tuple(partitions),
        tuple(random_detail),
    )


def _evaluate_partition(m, partition, test, k_opt, gft):
    fixed = err_metric(
        partition.subsets, make_fixed_reconstructor(m, k_opt, gft), test
    )
    folded = err_metric(partition.subsets, make_sf_reconstructor(m), test)
    return ((FIXED_RECONSTRUCTOR, fixed.err), (SF_RECONSTRUCTOR, folded.err))
