"""Variation operators, sampling sets, and the sampling-set-adaptive GFT.

The transform diagonalizes a symmetric positive-definite variation operator
M against the block-diagonal inner product Q(S) = blockdiag(M_SS, M_ScSc),
where S is the sampling set and Sc its complement. With that inner product
the generalized spectrum folds symmetrically about 1: if (u, lam) is an
eigenpair, flipping the sign of u on Sc yields an eigenpair with frequency
2 - lam. Frequencies therefore live in [0, 2] and split into a low band
(lam < 1), a mid band (lam = 1), and a high band (lam > 1).

All values here are immutable after construction and safe to share across
threads; every operation is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionMismatch,
    EigFailure,
    SingularBlock,
    ValidationError,
)

# Relative symmetry tolerance for accepting an operator matrix.
SYMMETRY_RTOL = 1e-12
# Entries smaller than this are ignored when fixing eigenvector signs.
SIGN_EPS = 1e-10
# Half-width of the frequency window classified as the mid band (lam = 1).
DEFAULT_BAND_TOL = 1e-8


def _as_square_float(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"operator matrix must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError("operator matrix must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("operator matrix contains non-finite entries")
    return arr


@dataclass(frozen=True)
class VariationOperator:
    """Symmetric positive-definite operator whose entries define the graph.

    Off-diagonal entry (i, j) is nonzero exactly when the graph has edge
    (i, j). Positive definiteness is not verified eagerly; operations that
    need it (Cholesky of the full matrix or of diagonal blocks) raise
    SingularBlock when it fails, so that purely spectral uses still accept
    positive semi-definite inputs such as raw combinatorial Laplacians.
    """

    matrix: np.ndarray

    def __post_init__(self):
        arr = _as_square_float(self.matrix)
        scale = np.abs(arr).max()
        asym = np.abs(arr - arr.T).max()
        if scale > 0 and asym > SYMMETRY_RTOL * scale:
            raise ValidationError(
                f"operator matrix is not symmetric: max|M - M^T| = {asym:.3e} "
                f"exceeds {SYMMETRY_RTOL:g} * max|M| = {SYMMETRY_RTOL * scale:.3e}"
            )
        arr = (arr + arr.T) / 2.0
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def with_ridge(self, delta: float | None = None) -> "VariationOperator":
        """Return a ridge-regularized copy M + delta*I.

        Default delta is 1e-8 * trace(M) / n, enough to make a learned
        (semi-definite) Laplacian strictly positive definite without
        materially changing its spectrum.
        """
        return VariationOperator(add_ridge(self.matrix, delta))


def add_ridge(matrix: np.ndarray, delta: float | None = None) -> np.ndarray:
    """Add delta*I to a square matrix; delta defaults to 1e-8*trace/n."""
    arr = _as_square_float(matrix)
    if delta is None:
        delta = 1e-8 * np.trace(arr) / arr.shape[0]
    if delta < 0:
        raise ValidationError("ridge delta must be non-negative")
    return arr + delta * np.eye(arr.shape[0])


@dataclass(frozen=True)
class SamplingSet:
    """Ordered subset of vertex ids (the observed vertices).

    Order is preserved: greedy selection stores vertices in insertion
    order, and sample vectors x_S follow this order. The complement is
    always reported in ascending vertex order.
    """

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("a sampling set needs a graph with n >= 2")
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0 or len(idx) >= self.n:
            raise ValidationError(
                f"sampling set size must satisfy 0 < |S| < n, got |S|={len(idx)}, n={self.n}"
            )
        if len(set(idx)) != len(idx):
            raise ValidationError("sampling set contains duplicate vertex ids")
        if min(idx) < 0 or max(idx) >= self.n:
            raise ValidationError(f"vertex ids must lie in [0, {self.n}), got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def size(self) -> int:
        return len(self.indices)

    @cached_property
    def index_array(self) -> np.ndarray:
        arr = np.asarray(self.indices, dtype=np.intp)
        arr.setflags(write=False)
        return arr

    @cached_property
    def complement(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.index_array] = False
        arr = np.flatnonzero(mask)
        arr.setflags(write=False)
        return arr

    @cached_property
    def permutation(self) -> np.ndarray:
        """Vertex permutation placing S first, then the ascending complement."""
        arr = np.concatenate([self.index_array, self.complement])
        arr.setflags(write=False)
        return arr


@dataclass(frozen=True)
class InnerProduct:
    """Block-diagonal inner product blockdiag(M_SS, M_ScSc).

    Stored as the two diagonal blocks of the S-first permuted operator,
    together with their lower Cholesky factors. Quadratic forms use the
    block structure directly; the dense matrix is only materialized on
    request (tests, file output).
    """

    sampling_set: SamplingSet
    block_s: np.ndarray
    block_sc: np.ndarray
    chol_s: np.ndarray
    chol_sc: np.ndarray

    @property
    def n(self) -> int:
        return self.sampling_set.n

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Compute Q x in the original vertex order (x may be batched (n, k))."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"expected leading dimension {self.n}, got {x.shape[0]}")
        s = self.sampling_set.index_array
        sc = self.sampling_set.complement
        out = np.empty_like(x)
        out[s] = self.block_s @ x[s]
        out[sc] = self.block_sc @ x[sc]
        return out

    def quad(self, x: np.ndarray) -> float | np.ndarray:
        """Quadratic form x^T Q x (per column for batched input)."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"expected leading dimension {self.n}, got {x.shape[0]}")
        s = self.sampling_set.index_array
        sc = self.sampling_set.complement
        xs, xc = x[s], x[sc]
        val = np.sum(xs * (self.block_s @ xs), axis=0) + np.sum(xc * (self.block_sc @ xc), axis=0)
        return float(val) if np.ndim(val) == 0 else val

    def solve_s(self, b: np.ndarray) -> np.ndarray:
        return sla.cho_solve((self.chol_s, True), b)

    def solve_sc(self, b: np.ndarray) -> np.ndarray:
        return sla.cho_solve((self.chol_sc, True), b)

    def dense(self) -> np.ndarray:
        """Materialize Q as a dense n x n matrix in the original vertex order."""
        q = np.zeros((self.n, self.n))
        s = self.sampling_set.index_array
        sc = self.sampling_set.complement
        q[np.ix_(s, s)] = self.block_s
        q[np.ix_(sc, sc)] = self.block_sc
        return q


def build_inner_product(m: VariationOperator, s: SamplingSet) -> InnerProduct:
    """Form Q(S) = blockdiag(M_SS, M_ScSc) and factor both blocks.

    Raises SingularBlock if either diagonal block is not positive definite.
    """
    if s.n != m.n:
        raise DimensionMismatch(f"sampling set is for n={s.n}, operator has n={m.n}")
    s_idx = s.index_array
    sc_idx = s.complement
    block_s = m.matrix[np.ix_(s_idx, s_idx)]
    block_sc = m.matrix[np.ix_(sc_idx, sc_idx)]
    try:
        chol_s = sla.cholesky(block_s, lower=True)
    except sla.LinAlgError as exc:
        raise SingularBlock(f"sampled block M_SS is not positive definite: {exc}") from exc
    try:
        chol_sc = sla.cholesky(block_sc, lower=True)
    except sla.LinAlgError as exc:
        raise SingularBlock(f"complement block M_ScSc is not positive definite: {exc}") from exc
    for arr in (block_s, block_sc, chol_s, chol_sc):
        arr.setflags(write=False)
    return InnerProduct(s, block_s, block_sc, chol_s, chol_sc)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry exceeding SIGN_EPS is positive."""
    u = np.array(vectors)
    for j in range(u.shape[1]):
        nz = np.flatnonzero(np.abs(u[:, j]) > SIGN_EPS)
        if nz.size and u[nz[0], j] < 0:
            u[:, j] = -u[:, j]
    return u


def _order_degenerate(freqs: np.ndarray, vectors: np.ndarray, tol: float = 1e-10):
    """Reorder columns inside (near-)degenerate clusters lexicographically.

    Sorting is by frequency first (already ascending from the solver), then
    by rounded eigenvector entries, which makes runs reproducible even when
    the solver's ordering inside a degenerate cluster is arbitrary.
    """
    n = freqs.size
    order = np.arange(n)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and freqs[j + 1] - freqs[i] <= tol * max(1.0, abs(freqs[i])):
            j += 1
        if j > i:
            cluster = list(range(i, j + 1))
            cluster.sort(key=lambda c: tuple(np.round(vectors[:, c], 12)))
            order[i : j + 1] = cluster
        i = j + 1
    return freqs[order], vectors[:, order]


@dataclass(frozen=True)
class SFBasis:
    """Generalized eigenbasis of (M, Q(S)) with spectral-folding metadata.

    vectors holds the Q-orthonormal eigenvectors as columns, rows indexed
    by the original vertex ids; freqs is ascending in [0, 2]. low/mid/high
    are column index arrays for the three frequency bands. fold_signs is
    the +/-1 diagonal that maps an eigenvector at frequency lam to one at
    2 - lam (positive on S, negative on the complement).
    """

    inner: InnerProduct
    vectors: np.ndarray
    freqs: np.ndarray
    low: np.ndarray
    mid: np.ndarray
    high: np.ndarray
    fold_signs: np.ndarray
    band_tol: float

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def sampling_set(self) -> SamplingSet:
        return self.inner.sampling_set

    @property
    def s_indices(self) -> np.ndarray:
        return self.inner.sampling_set.index_array

    @property
    def sc_indices(self) -> np.ndarray:
        return self.inner.sampling_set.complement


def compute_sf_gft(
    m: VariationOperator, s: SamplingSet, band_tol: float = DEFAULT_BAND_TOL
) -> SFBasis:
    """Solve M u = lam Q(S) u and return the folded eigenbasis.

    The generalized problem is whitened through the block Cholesky factor
    of Q(S) and handed to the standard symmetric solver, which keeps the
    returned basis Q-orthonormal by construction. Columns are sorted by
    ascending frequency with a deterministic sign and tie-break convention.
    """
    ip = build_inner_product(m, s)
    perm = s.permutation
    mp = m.matrix[np.ix_(perm, perm)]
    chol = sla.block_diag(ip.chol_s, ip.chol_sc)
    y = sla.solve_triangular(chol, mp, lower=True)
    a = sla.solve_triangular(chol, y.T, lower=True).T
    a = (a + a.T) / 2.0
    try:
        freqs, vecs = sla.eigh(a)
    except sla.LinAlgError as exc:
        raise EigFailure(f"symmetric eigensolver failed: {exc}") from exc
    # Map whitened eigenvectors back: u = L^{-T} v, then undo the permutation.
    u_perm = sla.solve_triangular(chol, vecs, lower=True, trans="T")
    u = np.empty_like(u_perm)
    u[perm] = u_perm
    u = _fix_signs(u)
    freqs, u = _order_degenerate(freqs, u)
    low = np.flatnonzero(freqs < 1.0 - band_tol)
    mid = np.flatnonzero(np.abs(freqs - 1.0) <= band_tol)
    high = np.flatnonzero(freqs > 1.0 + band_tol)
    signs = np.ones(m.n)
    signs[s.complement] = -1.0
    for arr in (u, freqs, low, mid, high, signs):
        arr.setflags(write=False)
    return SFBasis(ip, u, freqs, low, mid, high, signs, band_tol)


def fixed_gft(m: VariationOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of M under the identity inner product.

    Returns (freqs, vectors) sorted ascending with the same deterministic
    sign convention as the folded transform. This is the sampling-set
    independent transform used by classical bandlimited reconstruction.
    """
    try:
        freqs, vecs = sla.eigh(m.matrix)
    except sla.LinAlgError as exc:
        raise EigFailure(f"symmetric eigensolver failed: {exc}") from exc
    vecs = _fix_signs(vecs)
    freqs, vecs = _order_degenerate(freqs, vecs)
    freqs.setflags(write=False)
    vecs.setflags(write=False)
    return freqs, vecs


def _check_signal(basis: SFBasis, x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != basis.n:
        raise DimensionMismatch(
            f"{name} has leading dimension {x.shape[0]}, basis expects {basis.n}"
        )
    return x


def analyze(basis: SFBasis, x: np.ndarray) -> np.ndarray:
    """Forward transform: coefficients U^T Q x (batched input allowed)."""
    x = _check_signal(basis, x, "signal")
    return basis.vectors.T @ basis.inner.apply(x)


def synthesize(basis: SFBasis, coeffs: np.ndarray) -> np.ndarray:
    """Inverse transform: U @ coeffs."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != basis.n:
        raise DimensionMismatch(
            f"spectrum has leading dimension {coeffs.shape[0]}, basis expects {basis.n}"
        )
    return basis.vectors @ coeffs


def band_split(basis: SFBasis, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split x into its low-, mid-, and high-band vertex-domain components.

    The three components sum to x and are mutually Q-orthogonal.
    """
    coeffs = analyze(basis, x)
    parts = []
    for band in (basis.low, basis.mid, basis.high):
        if band.size:
            parts.append(basis.vectors[:, band] @ coeffs[band])
        else:
            parts.append(np.zeros_like(np.asarray(x, dtype=float)))
    return parts[0], parts[1], parts[2]
