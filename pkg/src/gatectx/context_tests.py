"""Gate sequences, the three context-independence witnesses and the toy model.

All sequence strings are temporal: ``labels[0]`` is applied first.  The three
witnesses compare probability matrices across structured sequence families:

* PD test: the log-det of P is invariant under any permutation of a
  context-independent sequence.
* cycle test: the spectrum of P_sigma P_0^-1, summarized by the moments
  F^(r) = Tr[(P_sigma P_0^-1)^r] / d^2, is invariant under cyclic
  permutations.
* ID test: log |det P_m| decays linearly in the iteration count m.

The toy model couples the tested qubit to a memory qubit through a Z (x) Z
phase and breaks all three symmetries; its probability matrix has a closed
form that serves as an exact oracle.
"""

from __future__ import annotations

import csv
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NumericalError
from .liouville import MapMatrix, liouville_of_unitary, pauli_basis
from .sampling import sample_probmatrix, substream
from .tomography import (
    ProbMatrix,
    SpamConfig,
    StateSet,
    ideal_log_det,
    logdet_variance,
    probability_matrix,
    standard_set,
)

__all__ = [
    "GateSequence",
    "TestObservations",
    "sequence_map",
    "pd_family",
    "cycle_family",
    "pd_test",
    "cycle_test",
    "id_test",
    "fidelity_variance",
    "cp_witness_radius",
    "cp_witness_det_monotone",
    "toy_probability",
    "toy_model",
    "toy_sequence",
]


@dataclass(frozen=True)
class GateSequence:
    """Ordered list of instruction labels, applied left to right in time."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def length(self) -> int:
        return len(self.labels)

    def multiset(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for l in self.labels:
            counts[l] = counts.get(l, 0) + 1
        return counts

    def is_cyclic_shift_of(self, other: "GateSequence") -> bool:
        if self.length != other.length:
            return False
        doubled = other.labels + other.labels
        return any(doubled[s : s + self.length] == self.labels for s in range(self.length))


@dataclass(frozen=True)
class TestObservations:
    """Statistic values with their variances along a sequence family.

    ``kind`` records which witness produced them ('pd', 'cycle' or 'id');
    exact (infinite-shot) curves carry zero variances.
    """

    xs: np.ndarray
    ys: np.ndarray
    variances: np.ndarray
    kind: str

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        var = np.asarray(self.variances, dtype=float)
        if not (xs.shape == ys.shape == var.shape) or xs.ndim != 1:
            raise ValueError("xs, ys and variances must be 1-d arrays of equal length")
        if (var < 0).any():
            raise ValueError("variances must be nonnegative")
        if self.kind not in ("pd", "cycle", "id"):
            raise ValueError("kind must be 'pd', 'cycle' or 'id'")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "variances", var)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "sigma"])
            for x, y, v in zip(self.xs, self.ys, self.variances):
                writer.writerow([repr(x), repr(y), repr(float(np.sqrt(v)))])

    @classmethod
    def read_csv(cls, path, kind: str) -> "TestObservations":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            rows = [(float(x), float(y), float(s)) for x, y, s in reader]
        xs, ys, sigmas = (np.array(col) for col in zip(*rows))
        return cls(xs, ys, sigmas**2, kind)


def sequence_map(seq: GateSequence, gates: Mapping[str, MapMatrix]) -> MapMatrix:
    """Liouville matrix of a sequence: the product of gate matrices, first gate rightmost."""
    missing = set(seq.labels) - set(gates)
    if missing:
        raise ValueError(f"sequence uses unknown gate labels {sorted(missing)}")
    some = next(iter(gates.values()))
    out = np.eye(some.basis.size)
    for label in seq.labels:
        out = gates[label].entries @ out
    return MapMatrix(some.dim, out, some.basis)


def pd_family(n: int, ks: Sequence[int] | None = None) -> tuple[list[GateSequence], np.ndarray]:
    """Non-cyclic permutations I^(n-k+1) X^(n-k+1) (X I)^(k-1) of I^n X^n.

    Returns the sequences together with their permutation indices k; the
    default picks every fifth index, k = 1, 6, ..., n + 1.
    """
    ks = np.asarray(ks if ks is not None else range(1, n + 2, 5), dtype=int)
    if ks.min() < 1 or ks.max() > n + 1:
        raise ValueError("permutation indices must lie in 1..n+1")
    seqs = [
        GateSequence(("I",) * (n - k + 1) + ("x180",) * (n - k + 1) + ("x180", "I") * (k - 1))
        for k in ks
    ]
    return seqs, ks


def cycle_family(n: int, ks: Sequence[int] | None = None) -> tuple[list[GateSequence], np.ndarray]:
    """Cyclic permutations I^(k-1) X I^(n-k+1) of X I^n, default k = 1, 11, ..., n + 1."""
    ks = np.asarray(ks if ks is not None else range(1, n + 2, 10), dtype=int)
    if ks.min() < 1 or ks.max() > n + 1:
        raise ValueError("cyclic indices must lie in 1..n+1")
    seqs = [
        GateSequence(("I",) * (k - 1) + ("x180",) + ("I",) * (n - k + 1))
        for k in ks
    ]
    return seqs, ks


def _observed_logdet(
    p_true: ProbMatrix, offset: float, n_s: int | None, rng
) -> tuple[float, float]:
    if n_s is None:
        return offset + p_true.log_abs_det(), 0.0
    p_hat = sample_probmatrix(p_true, n_s, rng)
    return offset + p_hat.log_abs_det(), logdet_variance(p_hat)


def pd_test(
    seqs: Sequence[GateSequence],
    gates: Mapping[str, MapMatrix],
    spam: SpamConfig,
    ideal: StateSet,
    n_s: int | None = None,
    seed: int = 0,
    xs: Sequence[float] | None = None,
) -> TestObservations:
    """Permutational determinant test along a family of permuted sequences.

    Every sequence must hold the same multiset of labels.  The statistic is
    L_sigma = -log |det P0_ideal| + log |det P_sigma|, constant across
    permutations when the gates are context-independent.  With ``n_s`` the
    matrices are sampled at that shot count and variances estimated from
    the sampled matrices themselves.
    """
    ref = seqs[0].multiset()
    if any(s.multiset() != ref for s in seqs[1:]):
        raise ValueError("PD test requires permutations of one label multiset")
    offset = -ideal_log_det(ideal)
    ys, var = [], []
    for k, seq in enumerate(seqs):
        p = probability_matrix(sequence_map(seq, gates), spam)
        y, v = _observed_logdet(p, offset, n_s, substream(seed, k, 0) if n_s else None)
        ys.append(y)
        var.append(v)
    xs = np.asarray(xs, float) if xs is not None else np.arange(1, len(seqs) + 1, dtype=float)
    return TestObservations(xs, np.array(ys), np.array(var), "pd")


def fidelity_variance(p_seq: ProbMatrix, p_ref: ProbMatrix, r: int, n_s: int | None = None) -> float:
    """First-order variance of F^(r) = Tr[(P P0^-1)^r] / d^2 under shot noise.

    Propagates independent binomial entry fluctuations of both matrices
    through the trace, the same linearization that gives the log-det
    variance its closed form.
    """
    n_s = n_s if n_s is not None else (p_seq.n_s or p_ref.n_s)
    if n_s is None:
        raise ValueError("n_s is required when neither matrix is sampled")
    a, b = p_seq.entries, p_ref.entries
    n = a.shape[0]
    b_inv = np.linalg.inv(b)
    m = a @ b_inv
    m_pow = np.linalg.matrix_power(m, r - 1)
    grad_a = (r / n) * (b_inv @ m_pow).T
    grad_b = -(r / n) * (b_inv @ m_pow @ m).T
    var = (grad_a**2 * a * (1.0 - a)).sum() + (grad_b**2 * b * (1.0 - b)).sum()
    return float(var / n_s)


def cycle_test(
    seqs: Sequence[GateSequence],
    gates: Mapping[str, MapMatrix],
    spam: SpamConfig,
    r: int = 2,
    n_s: int | None = None,
    seed: int = 0,
    xs: Sequence[float] | None = None,
) -> TestObservations:
    """Cycle test: moments of P_sigma' P_0^-1 across cyclic permutations.

    The reference P_0 belongs to the null instruction (nothing at all
    between preparation and measurement).  In the sampled regime each point
    gets its own statistically independent estimate of P_0, so consecutive
    fidelities share no noise.
    """
    if any(not s.is_cyclic_shift_of(seqs[0]) for s in seqs[1:]):
        raise ValueError("cycle test requires cyclic permutations of one sequence")
    p0 = probability_matrix(None, spam)
    n = p0.size
    ys, var = [], []
    for k, seq in enumerate(seqs):
        p = probability_matrix(sequence_map(seq, gates), spam)
        if n_s is None:
            ref = p0
            v = 0.0
        else:
            p = sample_probmatrix(p, n_s, substream(seed, k, 0))
            ref = sample_probmatrix(p0, n_s, substream(seed, k, 1))
            v = fidelity_variance(p, ref, r)
        try:
            m = p.entries @ np.linalg.inv(ref.entries)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("reference probability matrix is singular") from exc
        ys.append(np.trace(np.linalg.matrix_power(m, r)).real / n)
        var.append(v)
    xs = np.asarray(xs, float) if xs is not None else np.arange(1, len(seqs) + 1, dtype=float)
    return TestObservations(xs, np.array(ys), np.array(var), "cycle")


def id_test(
    gate_label: str | Sequence[str],
    lengths: Sequence[int],
    gates: Mapping[str, MapMatrix],
    spam: SpamConfig,
    ideal: StateSet,
    n_s: int | None = None,
    seed: int = 0,
) -> TestObservations:
    """Iterative determinant test: L_m along m repetitions of one gate.

    ``gate_label`` may be a single label or a tuple of labels forming one
    composite logical gate (for instance a z rotation built from x and y
    pulses).  For context-independent gates L_m is linear in m with slope
    log |det G|.
    """
    lengths = np.asarray(lengths, dtype=int)
    if (lengths < 0).any() or (np.diff(lengths) <= 0).any():
        raise ValueError("lengths must be nonnegative and strictly increasing")
    unit_labels = (gate_label,) if isinstance(gate_label, str) else tuple(gate_label)
    unit = sequence_map(GateSequence(unit_labels), gates)
    offset = -ideal_log_det(ideal)
    ys, var = [], []
    power = np.eye(unit.basis.size)
    prev = 0
    for k, m in enumerate(lengths):
        for _ in range(m - prev):
            power = unit.entries @ power
        prev = m
        p = probability_matrix(MapMatrix(unit.dim, power, unit.basis), spam)
        try:
            y, v = _observed_logdet(p, offset, n_s, substream(seed, k, 0) if n_s else None)
        except NumericalError as exc:
            raise NumericalError(f"sequence length {m}: {exc}") from exc
        ys.append(y)
        var.append(v)
    return TestObservations(lengths.astype(float), np.array(ys), np.array(var), "id")


def cp_witness_radius(p_m: ProbMatrix, p_m0: ProbMatrix) -> float:
    """Spectral radius of P_m P_m0^-1; above 1 it witnesses CP-indivisibility.

    Valid under fixed SPAM: the spectrum of the probability-matrix quotient
    equals that of the intermediate propagator, and CPTP maps keep all
    eigenvalues on the unit disc.
    """
    try:
        quotient = p_m.entries @ np.linalg.inv(p_m0.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("reference probability matrix is singular") from exc
    return float(np.abs(np.linalg.eigvals(quotient)).max())


def cp_witness_det_monotone(ps: Sequence[ProbMatrix], tol: float = 1e-9) -> list[int]:
    """Indices where |det P_m| rises above the running minimum.

    For a CP-divisible chain under fixed SPAM, |det P_m| cannot increase
    with m; any returned index marks a violation beyond ``tol`` (compared
    on the log scale).
    """
    violations = []
    running_min = np.inf
    for idx, p in enumerate(ps):
        logdet = p.log_abs_det()
        if logdet > running_min + tol:
            violations.append(idx)
        running_min = min(running_min, logdet)
    return violations


# ---------------------------------------------------------------------------
# toy model: qubit A + memory qubit B coupled by exp(-i phi/2 Z (x) Z)
# ---------------------------------------------------------------------------

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _rotation(axis: np.ndarray, theta: float) -> np.ndarray:
    return np.cos(theta / 2.0) * _I2 - 1.0j * np.sin(theta / 2.0) * axis


def toy_probability(
    m1: int, m2: int, phi: float, nzb: float, alpha_pi: float, alpha_pi2: float
) -> ProbMatrix:
    """Closed-form probability matrix of the toy-model echo sequence.

    The sequence applies m2 idles (each a joint Z (x) Z phase of angle phi),
    one bit flip on the tested qubit, then m1 more idles; the standard
    frame is prepared and measured through depolarized pulses (strength
    ``alpha_pi`` for pi pulses, ``alpha_pi2`` for pi/2 pulses, idles exact).
    Only the coherence block feels the memory, through dm = m2 - m1.
    """
    if not abs(nzb) < 1.0:
        raise ValueError("memory polarization must satisfy |nzb| < 1")
    for a in (alpha_pi, alpha_pi2):
        if not 0.0 < a <= 1.0:
            raise ValueError("depolarization parameters must lie in (0, 1]")
    dm = (m2 - m1) * phi
    a, b = alpha_pi, alpha_pi2
    c, s = np.cos(dm), nzb * np.sin(dm)
    entries = 0.5 * np.array(
        [
            [1.0 - a, 1.0 + a * a, 1.0, 1.0],
            [2.0, 1.0 - a, 1.0, 1.0],
            [1.0, 1.0, 1.0 + b * b * c, 1.0 - b * b * s],
            [1.0, 1.0, 1.0 - b * b * s, 1.0 - b * b * c],
        ]
    )
    return ProbMatrix(entries, "true")


def toy_sequence(m1: int, m2: int) -> GateSequence:
    """Echo sequence labels: m2 idles, the flip, then m1 idles."""
    return GateSequence(("I",) * m2 + ("x180",) + ("I",) * m1)


def toy_model(
    phi: float, nzb: float, alpha_pi: float, alpha_pi2: float
) -> tuple[dict[str, MapMatrix], SpamConfig, StateSet]:
    """Liouville-space realization of the toy model.

    Returns the instruction set {'I': joint phase, 'x180': flip on A}, the
    SPAM configuration with the depolarized preparation / measurement
    pulses, and the target standard frame.  `toy_probability` is the
    closed form of what `probability_matrix` produces for `toy_sequence`.
    """
    basis = pauli_basis(2, 2)
    u_idle = scipy.linalg.expm(-0.5j * phi * np.kron(_Z, _Z))
    gates = {
        "I": liouville_of_unitary(u_idle, basis),
        "x180": liouville_of_unitary(np.kron(_rotation(_X, np.pi), _I2), basis),
    }

    def depolarized(unitary: np.ndarray, alpha: float) -> MapMatrix:
        rot = liouville_of_unitary(np.kron(unitary, _I2), basis).entries
        depol = np.kron(np.diag([1.0, alpha, alpha, alpha]), np.eye(4))
        return MapMatrix(4, depol @ rot, basis)

    pulses_in = [
        (_I2, 1.0),
        (_rotation(_X, np.pi), alpha_pi),
        (_rotation(_Y, np.pi / 2.0), alpha_pi2),
        (_rotation(_X, -np.pi / 2.0), alpha_pi2),
    ]
    pulses_out = [pulses_in[1], pulses_in[0], pulses_in[2], pulses_in[3]]
    rho0 = np.kron(np.outer([1.0, 0.0], [1.0, 0.0]), 0.5 * (_I2 + nzb * _Z))
    m0 = np.kron(np.outer([0.0, 1.0], [0.0, 1.0]), _I2)
    spam = SpamConfig.from_gates(
        [depolarized(u, al) for u, al in pulses_in],
        [depolarized(u, al) for u, al in pulses_out],
        rho0,
        m0,
        basis,
    )
    return gates, spam, standard_set(2)
