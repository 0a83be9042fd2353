"""Finite-sample statistics: weighted least squares, chi-squared and F tests,
simulation ensembles and unitarity estimation.

The observations entering the fits are log-det (or fidelity) statistics of
sampled probability matrices.  Their fluctuations are Gaussian to first
order with variances supplied by the closed forms in :mod:`gatectx.tomography`
and :mod:`gatectx.context_tests`, so under a true q-parameter model the
weighted residual sum of squares follows chi^2 with M - q degrees of
freedom, and the nested-model statistic

    F = (M - q2) / (q2 - q1) * (X1^2 / X2^2 - 1)

follows F_{q2-q1, M-q2}.  Rejecting the null when the one-sided p-value
drops below a threshold gives the context-dependence tests their power.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.special

from .context_tests import GateSequence, cycle_family, pd_family, sequence_map
from .errors import NumericalError
from .lindblad import ZZModelParams, zz_context
from .liouville import MapMatrix
from .sampling import bootstrap_variance, sample_entries, sample_probmatrix, substream
from .tomography import ProbMatrix, ideal_log_det, probability_matrix

__all__ = [
    "FitResult",
    "UnitarityEstimate",
    "PowerSweepResult",
    "sample_probmatrix",
    "bootstrap_variance",
    "substream",
    "wls_fit",
    "chi2_survival",
    "f_survival",
    "f_test_nested",
    "unitarity_from_fit",
    "slope_sd_bounds",
    "logdet_ensemble",
    "moment_ensemble",
    "id_true_matrices",
    "family_true_matrices",
    "power_sweep",
]

WEIGHT_FLOOR = 1e-15


@dataclass(frozen=True)
class FitResult:
    """Weighted least-squares fit of a polynomial model.

    ``beta`` minimizes sum_i w_i (y_i - sum_n beta_n x_i^n)^2 with weights
    w_i = 1 / sigma_i^2; ``chi2`` is the attained minimum, distributed as
    chi^2 with ``dof = M - q`` degrees of freedom when the model is true
    and the variances are correct.
    """

    beta: np.ndarray
    covariance: np.ndarray
    chi2: float
    dof: int
    pvalue: float

    def __post_init__(self):
        if self.dof < 1:
            raise ValueError("need at least one residual degree of freedom")
        if self.chi2 < 0:
            raise ValueError("chi2 must be nonnegative")

    @property
    def q(self) -> int:
        return len(self.beta)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta.tolist(),
            "covariance": self.covariance.tolist(),
            "chi2": self.chi2,
            "dof": self.dof,
            "pvalue": self.pvalue,
        }


@dataclass(frozen=True)
class UnitarityEstimate:
    """Unitarity u' = exp(2 beta1 / (d^2 - 1)) extracted from a linear fit."""

    u_hat: float
    sigma_u: float
    beta1_hat: float
    sigma_beta1: float
    d: int

    def to_dict(self) -> dict:
        return {
            "u_hat": self.u_hat,
            "sigma_u": self.sigma_u,
            "beta1_hat": self.beta1_hat,
            "sigma_beta1": self.sigma_beta1,
            "d": self.d,
        }


def _design(xs: np.ndarray, q: int) -> np.ndarray:
    return np.vander(xs, q, increasing=True)


def _floored_weights(variances: np.ndarray) -> np.ndarray:
    variances = np.asarray(variances, dtype=float)
    if (variances < 0).any():
        raise ValueError("variances must be nonnegative")
    if (variances < WEIGHT_FLOOR).any():
        warnings.warn(f"variances below {WEIGHT_FLOOR:g} floored (saturated entries?)")
        variances = np.maximum(variances, WEIGHT_FLOOR)
    return 1.0 / variances


def wls_fit(xs, ys, variances, q: int) -> FitResult:
    """Fit y = sum_{n<q} beta_n x^n by weighted least squares.

    The covariance of the estimates is (X^T W X)^-1 and the one-sided
    p-value comes from the upper tail of chi^2_{M-q}.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    m = len(xs)
    if m <= q:
        raise ValueError(f"need more observations ({m}) than parameters ({q})")
    w = _floored_weights(variances)
    x = _design(xs, q)
    a = x.T @ (w[:, None] * x)
    if np.linalg.cond(a) > 1e14:
        raise NumericalError("rank-deficient design matrix")
    cov = np.linalg.inv(a)
    beta = cov @ (x.T @ (w * ys))
    resid = ys - x @ beta
    chi2 = float(np.sum(w * resid**2))
    dof = m - q
    return FitResult(beta, cov, chi2, dof, float(chi2_survival(chi2, dof)))


def _wls_chi2_batch(xs: np.ndarray, ys: np.ndarray, variances: np.ndarray, q: int):
    """Per-row WLS over a (R, M) stack of observations; returns chi2, beta, cov."""
    w = 1.0 / np.maximum(variances, WEIGHT_FLOOR)
    x = _design(xs, q)
    a = np.einsum("mi,rm,mj->rij", x, w, x)
    b = np.einsum("mi,rm,rm->ri", x, w, ys)
    cov = np.linalg.inv(a)
    beta = np.einsum("rij,rj->ri", cov, b)
    resid = ys - beta @ x.T
    chi2 = np.einsum("rm,rm->r", w, resid**2)
    return np.maximum(chi2, 0.0), beta, cov


def chi2_survival(x, n) -> np.ndarray | float:
    """Upper-tail probability of the chi-squared distribution (regularized gamma)."""
    x = np.asarray(x, dtype=float)
    if (x < 0).any() or n < 1:
        raise ValueError("need x >= 0 and dof >= 1")
    return scipy.special.gammaincc(n / 2.0, x / 2.0)


def f_survival(x, n1, n2) -> np.ndarray | float:
    """Upper-tail probability of the F distribution (regularized incomplete beta)."""
    x = np.asarray(x, dtype=float)
    if (x < 0).any() or n1 < 1 or n2 < 1:
        raise ValueError("need x >= 0 and positive degrees of freedom")
    return scipy.special.betainc(n2 / 2.0, n1 / 2.0, n2 / (n2 + n1 * x))


def f_test_nested(xs, ys, variances, q1: int, q2: int) -> tuple[float, float]:
    """Compare nested polynomial models of sizes q1 < q2.

    Returns the F statistic and its one-sided p-value under the null that
    the smaller model is correct.  An exact fit of the smaller model gives
    (0, 1); a vanishing chi^2 of the larger model alone is degenerate.
    """
    m = len(np.asarray(xs))
    if not q1 < q2 < m:
        raise ValueError("need q1 < q2 < number of observations")
    chi1 = wls_fit(xs, ys, variances, q1).chi2
    chi2 = wls_fit(xs, ys, variances, q2).chi2
    if chi2 <= 1e-30:
        if chi1 <= 1e-30:
            return 0.0, 1.0
        raise NumericalError("degenerate fit: larger model has zero residual")
    f = (m - q2) / (q2 - q1) * max(chi1 / chi2 - 1.0, 0.0)
    return float(f), float(f_survival(f, q2 - q1, m - q2))


def unitarity_from_fit(fit: FitResult, d: int) -> UnitarityEstimate:
    """Unitarity estimate from the slope of a linear log-det fit.

    Requires a fit with at least two parameters; beta_1 estimates
    log |det G| and u' = exp(2 beta_1 / (d^2 - 1)), with standard
    deviation 2 u' sigma_beta1 / (d^2 - 1) in the small-error regime.
    """
    if fit.q < 2:
        raise ValueError("unitarity needs the slope of a q >= 2 fit")
    scale = 2.0 / (d * d - 1.0)
    u_hat = float(np.exp(scale * fit.beta[1]))
    sigma_beta1 = float(np.sqrt(fit.covariance[1, 1]))
    return UnitarityEstimate(u_hat, scale * u_hat * sigma_beta1, float(fit.beta[1]), sigma_beta1, d)


def slope_sd_bounds(
    sigma_min: float, sigma_max: float, m_count: int, spacing: float
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Bounds on the WLS intercept and slope SDs from the extreme point SDs.

    For M evenly spaced sequence lengths m_n = b (n - 1) and point SDs
    anywhere in [sigma_min, sigma_max], the intercept and slope SDs lie in

        c * sigma_min^2 / sigma_max  <=  sigma_hat  <=  c * sigma_max^2 / sigma_min

    with c the homoskedastic coefficient of each estimate; both bounds
    collapse onto the homoskedastic formulas when sigma_min = sigma_max.
    Returns ((b0_low, b0_high), (b1_low, b1_high)).
    """
    if not 0 < sigma_min <= sigma_max:
        raise ValueError("need 0 < sigma_min <= sigma_max")
    if m_count < 2 or spacing <= 0:
        raise ValueError("need at least two points with positive spacing")
    m = m_count
    c0 = np.sqrt(2.0 / m * (2.0 * m - 1.0) / (m + 1.0))
    c1 = 2.0 * np.sqrt(3.0) / np.sqrt(m * (m * m - 1.0) * spacing**2)
    low, high = sigma_min**2 / sigma_max, sigma_max**2 / sigma_min
    return (c0 * low, c0 * high), (c1 * low, c1 * high)


# ---------------------------------------------------------------------------
# simulation ensembles
# ---------------------------------------------------------------------------


def id_true_matrices(gate_label, lengths, gates, spam) -> list[ProbMatrix]:
    """True probability matrices of m-fold gate iterations, one per length."""
    unit_labels = (gate_label,) if isinstance(gate_label, str) else tuple(gate_label)
    unit = sequence_map(GateSequence(unit_labels), gates)
    out = []
    power = np.eye(unit.basis.size)
    prev = 0
    for m in lengths:
        for _ in range(m - prev):
            power = unit.entries @ power
        prev = m
        out.append(probability_matrix(MapMatrix(unit.dim, power, unit.basis), spam))
    return out


def family_true_matrices(seqs, gates, spam) -> list[ProbMatrix]:
    """True probability matrices of an explicit sequence family."""
    return [probability_matrix(sequence_map(s, gates), spam) for s in seqs]


def logdet_ensemble(
    true_ps: list[ProbMatrix], offset: float, n_s: int, r: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sampled log-det observations over r hypothetical experiments.

    Returns (ys, variances), both of shape (r, M): per experiment and
    sequence, y = offset + log |det P-hat| and the closed-form variance
    evaluated on the sampled matrix.  Substream key: (experiment, sequence, 0).
    """
    stack = np.stack([p.entries for p in true_ps])
    n_seq = stack.shape[0]
    ys = np.empty((r, n_seq))
    variances = np.empty((r, n_seq))
    for rr in range(r):
        hats = np.empty_like(stack)
        for k in range(n_seq):
            hats[k] = sample_entries(stack[k], n_s, substream(seed, rr, k, 0))
        signs, logdets = np.linalg.slogdet(hats)
        if not np.isfinite(logdets).all() or (signs == 0).any():
            raise NumericalError("sampled probability matrix is singular; reduce sequence lengths")
        inv = np.linalg.inv(hats)
        ys[rr] = offset + logdets
        variances[rr] = np.einsum("kij,kji->k", inv**2, hats * (1.0 - hats)) / n_s
    return ys, variances


def moment_ensemble(
    true_ps: list[ProbMatrix],
    true_p0: ProbMatrix,
    order: int,
    n_s: int,
    r: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Sampled fidelity observations F^(order) over r hypothetical experiments.

    Each point pairs a sampled sequence matrix with its own independent
    sample of the reference matrix (substream keys (experiment, point, 0)
    and (experiment, point, 1)), so the per-point statistics are unbiased
    and uncorrelated.  Variances come from first-order propagation.
    """
    stack = np.stack([p.entries for p in true_ps])
    n_seq, n = stack.shape[0], stack.shape[1]
    ys = np.empty((r, n_seq))
    variances = np.empty((r, n_seq))
    for rr in range(r):
        hats = np.empty_like(stack)
        refs = np.empty_like(stack)
        for k in range(n_seq):
            hats[k] = sample_entries(stack[k], n_s, substream(seed, rr, k, 0))
            refs[k] = sample_entries(true_p0.entries, n_s, substream(seed, rr, k, 1))
        ref_inv = np.linalg.inv(refs)
        m = hats @ ref_inv
        m_pow = np.broadcast_to(np.eye(n), m.shape).copy()
        for _ in range(order - 1):
            m_pow = m_pow @ m
        ys[rr] = np.einsum("kii->k", m_pow @ m).real / n
        grad_a = (order / n) * np.transpose(ref_inv @ m_pow, (0, 2, 1))
        grad_b = -(order / n) * np.transpose(ref_inv @ m_pow @ m, (0, 2, 1))
        variances[rr] = (
            np.einsum("kij,kij->k", grad_a**2, hats * (1.0 - hats))
            + np.einsum("kij,kij->k", grad_b**2, refs * (1.0 - refs))
        ) / n_s
    return ys, variances


# ---------------------------------------------------------------------------
# power sweeps
# ---------------------------------------------------------------------------

#: null and alternative model sizes per test kind
_MODEL_SIZES = {"id": (2, 3), "cycle": (1, 3), "pd": (1, 3)}


@dataclass(frozen=True)
class PowerSweepResult:
    """Rejection ratios over a (phi, n_s) grid for both test statistics."""

    test_kind: str
    phis: tuple[float, ...]
    n_s_values: tuple[int, ...]
    chi2_ratio: np.ndarray = field(repr=False)
    f_ratio: np.ndarray = field(repr=False)
    p_cr: float
    r: int

    def __post_init__(self):
        for name in ("chi2_ratio", "f_ratio"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (len(self.phis), len(self.n_s_values)):
                raise ValueError(f"{name} must have shape (len(phis), len(n_s_values))")
            if arr.min() < 0 or arr.max() > 1:
                raise ValueError("rejection ratios must lie in [0, 1]")
            object.__setattr__(self, name, arr)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["phi", "n_s", "chi2_rejection_ratio", "f_rejection_ratio"])
            for i, phi in enumerate(self.phis):
                for j, n_s in enumerate(self.n_s_values):
                    writer.writerow([repr(phi), n_s, repr(self.chi2_ratio[i, j]), repr(self.f_ratio[i, j])])


def _sweep_observations(test_kind, params, n_s, r, seed, lengths, family_n, frame, spam_errors):
    gates, spam, frame = zz_context(params, frame=frame, spam_errors=spam_errors)
    if test_kind == "id":
        xs = np.asarray(lengths, dtype=float)
        true_ps = id_true_matrices("I", np.asarray(lengths, dtype=int), gates, spam)
        offset = -ideal_log_det(frame)
        return xs, logdet_ensemble(true_ps, offset, n_s, r, seed)
    if test_kind == "pd":
        seqs, ks = pd_family(family_n)
        true_ps = family_true_matrices(seqs, gates, spam)
        offset = -ideal_log_det(frame)
        return ks.astype(float), logdet_ensemble(true_ps, offset, n_s, r, seed)
    if test_kind == "cycle":
        seqs, ks = cycle_family(family_n)
        true_ps = family_true_matrices(seqs, gates, spam)
        true_p0 = probability_matrix(None, spam)
        return ks.astype(float), moment_ensemble(true_ps, true_p0, 2, n_s, r, seed)
    raise ValueError(f"unknown test kind {test_kind!r}")


def power_sweep(
    test_kind: str,
    params: ZZModelParams,
    phis,
    n_s_values,
    r: int,
    p_cr: float = 0.01,
    seed: int = 0,
    lengths=range(0, 501, 10),
    family_n: int | None = None,
    frame=None,
    spam_errors: bool = True,
) -> PowerSweepResult:
    """Rejection ratio of the chi-squared and F tests over a (phi, n_s) grid.

    For every grid cell, ``r`` hypothetical experiments are simulated from
    the two-qubit model with the given interaction strength; the null model
    is fitted (linear for the ID test, constant for the permutational
    tests) and rejected when its one-sided p-value falls below ``p_cr``.
    The F variant compares the null against the quadratic alternative on
    the same data.  At phi = 0 both ratios calibrate to p_cr.
    """
    if r < 100:
        raise ValueError("use at least 100 experiments per grid cell")
    if test_kind not in _MODEL_SIZES:
        raise ValueError(f"unknown test kind {test_kind!r}")
    q1, q2 = _MODEL_SIZES[test_kind]
    if family_n is None:
        family_n = 250 if test_kind == "pd" else 500
    phis = tuple(float(p) for p in phis)
    n_s_values = tuple(int(n) for n in n_s_values)
    chi2_ratio = np.empty((len(phis), len(n_s_values)))
    f_ratio = np.empty_like(chi2_ratio)
    for i, phi in enumerate(phis):
        params_phi = replace(params, phi=phi)
        for j, n_s in enumerate(n_s_values):
            xs, (ys, variances) = _sweep_observations(
                test_kind, params_phi, n_s, r, seed + i * len(n_s_values) + j,
                lengths, family_n, frame, spam_errors,
            )
            m = len(xs)
            chi1, _, _ = _wls_chi2_batch(xs, ys, variances, q1)
            chi2_, _, _ = _wls_chi2_batch(xs, ys, variances, q2)
            p_chi = chi2_survival(chi1, m - q1)
            f_stat = (m - q2) / (q2 - q1) * np.maximum(chi1 / chi2_ - 1.0, 0.0)
            p_f = f_survival(f_stat, q2 - q1, m - q2)
            chi2_ratio[i, j] = np.mean(p_chi < p_cr)
            f_ratio[i, j] = np.mean(p_f < p_cr)
    return PowerSweepResult(test_kind, phis, n_s_values, chi2_ratio, f_ratio, p_cr, r)
