"""Self-check suite for one (operator, sampling set) pair.

Runs the structural identities behind the folded transform (eigen
residuals, Q-orthonormality, spectrum symmetry, band cardinalities, the
involution identity), the reconstruction error identity, the two forms of
the conditional-mean estimator against explicit covariance inversion, and
a Monte-Carlo check of the band covariances. Each check reports a value,
its tolerance, and a pass flag; deterministic checks use the library's
fixed tolerances while the Monte-Carlo tolerance scales with the sample
count.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .core import SamplingSet, VariationOperator, analyze, compute_sf_gft
from .errors import SingularBlock
from .reconstruct import (
    error_decomposition,
    high_freq_covariance_check,
    mmse_estimate,
    mmse_spectral,
)

IDENTITY_TOL = 1e-9
INVOLUTION_TOL = 1e-8
RANK_THRESHOLD = 1e-10


def _check(value: float, tolerance: float) -> dict:
    return {"value": float(value), "tolerance": float(tolerance), "pass": bool(value <= tolerance)}


def verification_report(
    m: VariationOperator,
    s: SamplingSet,
    trials: int = 50,
    seed: int = 0,
    mc_samples: int = 50_000,
) -> dict:
    """Run every check and return a JSON-serializable report."""
    basis = compute_sf_gft(m, s)
    n = m.n
    m_norm = float(np.linalg.norm(m.matrix, 2))
    q = basis.inner.dense()
    u, freqs = basis.vectors, basis.freqs

    residual = 0.0
    fold_residual = 0.0
    j_u = basis.fold_signs[:, None] * u
    for k in range(n):
        residual = max(
            residual, float(np.linalg.norm(m.matrix @ u[:, k] - freqs[k] * (q @ u[:, k])))
        )
        fold_residual = max(
            fold_residual,
            float(
                np.linalg.norm(
                    m.matrix @ j_u[:, k] - (2.0 - freqs[k]) * (q @ j_u[:, k])
                )
            ),
        )
    gram_dev = float(np.abs(u.T @ q @ u - np.eye(n)).max())
    symmetry_dev = float(np.abs(freqs + freqs[::-1] - 2.0).max())
    involution = u.T @ q @ (basis.fold_signs[:, None] * u)
    involution_dev = float(np.abs(involution @ involution - np.eye(n)).max())

    coupling = m.matrix[np.ix_(s.index_array, s.complement)]
    sigmas = sla.svdvals(coupling)
    rank = int(np.sum(sigmas > RANK_THRESHOLD * sigmas[0])) if sigmas[0] > 0 else 0
    rank_condition = rank == s.size
    cardinalities_ok = True
    if rank_condition:
        cardinalities_ok = (
            basis.low.size == s.size
            and basis.high.size == s.size
            and basis.mid.size == n - 2 * s.size
        )

    rng = np.random.default_rng(seed)
    identity_dev = 0.0
    parseval_dev = 0.0
    for _ in range(trials):
        x = rng.standard_normal(n)
        err_q, high_e, mid_e = error_decomposition(basis, x)
        rhs = 2.0 * high_e + mid_e
        scale = max(abs(err_q), abs(rhs), 1e-300)
        identity_dev = max(identity_dev, abs(err_q - rhs) / scale)
        coeffs = analyze(basis, x)
        q_norm = float(basis.inner.quad(x))
        parseval_dev = max(
            parseval_dev, abs(q_norm - float(np.sum(coeffs**2))) / max(q_norm, 1e-300)
        )

    mmse_checks: dict = {"skipped": False}
    try:
        chol_m = sla.cholesky(m.matrix, lower=True)
        cov = sla.cho_solve((chol_m, True), np.eye(n))
        cov_s = cov[np.ix_(s.index_array, s.index_array)]
        cov_cs = cov[np.ix_(s.complement, s.index_array)]
        equiv_dev = 0.0
        explicit_dev = 0.0
        for _ in range(trials):
            x_s = rng.standard_normal(s.size)
            block = mmse_estimate(m, s, x_s)
            spectral = mmse_spectral(basis, x_s)
            explicit = cov_cs @ np.linalg.solve(cov_s, x_s)
            scale = max(float(np.linalg.norm(block)), 1e-300)
            equiv_dev = max(equiv_dev, float(np.linalg.norm(block - spectral)) / scale)
            explicit_dev = max(explicit_dev, float(np.linalg.norm(block - explicit)) / scale)
        mmse_checks["equivalence"] = _check(equiv_dev, IDENTITY_TOL)
        mmse_checks["explicit_inverse"] = _check(explicit_dev, 1e-6)
    except sla.LinAlgError as exc:
        raise SingularBlock(
            f"operator is not positive definite, GMRF checks impossible: {exc}"
        ) from exc

    mc = high_freq_covariance_check(m, s, mc_samples, seed)
    mc_tol = max(0.05, 25.0 / np.sqrt(mc_samples))

    checks = {
        "eigen_residual": _check(residual, IDENTITY_TOL * m_norm),
        "folding_residual": _check(fold_residual, IDENTITY_TOL * m_norm),
        "q_orthonormality": _check(gram_dev, IDENTITY_TOL),
        "spectrum_symmetry": _check(symmetry_dev, IDENTITY_TOL),
        "involution_identity": _check(involution_dev, INVOLUTION_TOL),
        "band_cardinalities": {
            "rank_condition_holds": rank_condition,
            "sizes": {
                "low": int(basis.low.size),
                "mid": int(basis.mid.size),
                "high": int(basis.high.size),
            },
            "pass": bool(cardinalities_ok),
        },
        "parseval": _check(parseval_dev, IDENTITY_TOL),
        "error_identity": _check(identity_dev, IDENTITY_TOL),
        "mmse_equivalence": mmse_checks.get("equivalence"),
        "mmse_explicit_inverse": mmse_checks.get("explicit_inverse"),
        "high_band_covariance": _check(mc.high_band_deviation, mc_tol),
        "mid_band_identity": _check(mc.mid_identity_deviation, mc_tol),
        "band_cross_correlation": _check(mc.cross_deviation, mc_tol),
    }
    overall = all(
        c["pass"] for c in checks.values() if isinstance(c, dict) and "pass" in c
    )
    return {
        "n": n,
        "sampling_set": list(s.indices),
        "trials": trials,
        "mc_samples": mc_samples,
        "seed": seed,
        "empty_high_band": mc.empty_band,
        "checks": checks,
        "pass": overall,
    }
