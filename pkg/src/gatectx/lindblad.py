"""Lindblad generators and the noisy-gate models used throughout the package.

Everything is expressed in the Liouville representation of
:mod:`gatectx.liouville`.  Time units are fixed once and for all: rates in
1/ns, durations in ns, so every exponent that enters `matrix_exp` is
dimensionless.

The two-qubit model couples the tested qubit A to a memory qubit B through
an Ising term V = (J/2) Z (x) Z.  A noisy gate of duration t_g is

    G = exp(J_G + t_g * V + t_g * D)

with J_G the Liouville generator of the ideal rotation on A (zero for the
idle gate), and D the local relaxation / excitation / dephasing dissipator
of both qubits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .liouville import (
    MapMatrix,
    OperatorBasis,
    liouville_of_channel,
    pauli_basis,
)

__all__ = [
    "Dissipator",
    "GateModel",
    "ZZModelParams",
    "GATE_LABELS",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "hamiltonian_matrix",
    "dissipator_matrix",
    "dissipator_trace",
    "matrix_exp",
    "qubit_relaxation_map",
    "gate_model",
    "build_gate",
    "build_qubit_gate",
    "stationary_state",
    "zz_context",
    "STANDARD_INPUT_PULSES",
    "STANDARD_OUTPUT_PULSES",
]

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
SIGMA_PLUS = SIGMA_MINUS.conj().T

#: Rotation labels accepted by `build_gate`: axis in {x, y}, angle in degrees.
GATE_LABELS = ("I", "x90", "x-90", "x180", "x-180", "x360", "y90", "y-90", "y180", "y-180")


@dataclass(frozen=True)
class Dissipator:
    """A sum of Lindblad dissipation channels, sum_k gamma_k D_k.

    ``ops`` holds (rate, operator) pairs; rates must be nonnegative, which
    is what makes the generated evolution completely positive.
    """

    ops: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        checked = []
        for rate, f in self.ops:
            if rate < 0:
                raise ValueError(f"negative dissipation rate {rate}")
            checked.append((float(rate), np.asarray(f, dtype=complex)))
        object.__setattr__(self, "ops", tuple(checked))


def hamiltonian_matrix(h: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Liouville matrix of the commutator map rho -> -i [H, rho]."""
    h = np.asarray(h, dtype=complex)
    return liouville_of_channel(lambda rho: -1.0j * (h @ rho - rho @ h), basis).entries


def _single_dissipator(f: np.ndarray, rho: np.ndarray) -> np.ndarray:
    fdf = f.conj().T @ f
    return f @ rho @ f.conj().T - 0.5 * (fdf @ rho + rho @ fdf)


def dissipator_matrix(d: Dissipator, basis: OperatorBasis) -> np.ndarray:
    """Liouville matrix of sum_k gamma_k D_k for the given channel list.

    Each D_k(rho) = F_k rho F_k^dag - {F_k^dag F_k, rho} / 2.
    """
    for _, f in d.ops:
        if f.shape != (basis.dim, basis.dim):
            raise ValueError(f"Lindblad operator shape {f.shape} does not match basis dim {basis.dim}")
    out = np.zeros((basis.size, basis.size))
    for rate, f in d.ops:
        out += rate * liouville_of_channel(lambda rho, f=f: _single_dissipator(f, rho), basis).entries
    return out


def dissipator_trace(f: np.ndarray) -> float:
    """Trace of the Liouville matrix of a single (unit-rate) dissipation channel.

    Equals -d (Tr[F^dag F] - |Tr F|^2 / d), which is never positive and is
    invariant under c-number shifts F -> F + c and unitary channel mixing.
    The determinant of exp(t D) follows directly from this trace.
    """
    f = np.asarray(f, dtype=complex)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError("Lindblad operator must be square")
    d = f.shape[0]
    return float(-d * (np.einsum("ij,ij->", f.conj(), f).real - abs(np.trace(f)) ** 2 / d))


def matrix_exp(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a real square matrix (scaling and squaring)."""
    a = np.asarray(a, dtype=float)
    if not np.isfinite(a).all():
        raise ValueError("matrix exponential of non-finite input")
    return scipy.linalg.expm(a)


def qubit_relaxation_map(
    t: float,
    gamma1: float,
    gammaphi: float,
    omega: float = 0.0,
    basis: OperatorBasis | None = None,
) -> MapMatrix:
    """Closed-form free evolution of a qubit with relaxation and dephasing.

    Hamiltonian -(omega/2) Z plus decay channels F_1 = sigma_- at rate
    ``gamma1`` and F_phi = Z / sqrt(2) at rate ``gammaphi``; the map in the
    (I, X, Y, Z) basis is block diagonal with a damped rotation in the XY
    plane and relaxation toward the ground state along Z.  Its determinant
    is exp(-2 t (gamma1 + gammaphi)).
    """
    if gamma1 < 0 or gammaphi < 0:
        raise ValueError("rates must be nonnegative")
    g2 = gamma1 / 2.0 + gammaphi  # 1/T2
    e1, e2 = np.exp(-gamma1 * t), np.exp(-g2 * t)
    c, s = np.cos(omega * t), np.sin(omega * t)
    entries = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c * e2, s * e2, 0.0],
            [0.0, -s * e2, c * e2, 0.0],
            [1.0 - e1, 0.0, 0.0, e1],
        ]
    )
    return MapMatrix(2, entries, basis if basis is not None else pauli_basis(1, 2))


def _nz_from_rates(gamma1: float, gamma3: float) -> float:
    if gamma1 + gamma3 <= 0:
        raise ValueError("stationary polarization undefined: gamma1 + gamma3 must be positive")
    return (gamma1 - gamma3) / (gamma1 + gamma3)


@dataclass(frozen=True)
class ZZModelParams:
    """Parameters of the two-qubit ZZ model (all rates in 1/ns, times in ns).

    ``nz_a`` / ``nz_b`` are the stationary polarizations
    (gamma1 - gamma3) / (gamma1 + gamma3); they are derived from the rates
    when omitted and validated against them when given.  ``phi`` is the
    dimensionless interaction J * t_g, ``eta`` the detector efficiency.
    """

    gamma1_a: float
    gamma1_b: float
    gamma3_a: float
    gamma3_b: float
    gammaphi_a: float
    gammaphi_b: float
    t_g: float
    phi: float = 0.0
    nz_a: float | None = None
    nz_b: float | None = None
    eta: float = 1.0

    def __post_init__(self):
        for name in ("gamma1_a", "gamma1_b", "gamma3_a", "gamma3_b", "gammaphi_a", "gammaphi_b"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.t_g <= 0:
            raise ValueError("gate duration must be positive")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("detector efficiency must lie in (0, 1]")
        for side in "ab":
            given = getattr(self, f"nz_{side}")
            g1, g3 = getattr(self, f"gamma1_{side}"), getattr(self, f"gamma3_{side}")
            if g1 + g3 <= 0:
                # no relaxation channel: every polarization is stationary;
                # default to the gamma3 -> 0 limit
                object.__setattr__(self, f"nz_{side}", 1.0 if given is None else given)
                continue
            derived = _nz_from_rates(g1, g3)
            if given is None:
                object.__setattr__(self, f"nz_{side}", derived)
            elif abs(given - derived) > 1e-9:
                raise ValueError(
                    f"nz_{side}={given} inconsistent with rates (stationarity requires {derived:.6g})"
                )

    @classmethod
    def from_polarization(
        cls,
        gamma1: float,
        gammaphi: float,
        nz: float,
        t_g: float,
        phi: float = 0.0,
        eta: float = 1.0,
        gamma1_b: float | None = None,
        gammaphi_b: float | None = None,
        nz_b: float | None = None,
    ) -> "ZZModelParams":
        """Build params from (gamma1, gammaphi, nz) per qubit.

        The excitation rate follows from stationarity,
        gamma3 = gamma1 (1 - nz) / (1 + nz).  Qubit B defaults to a copy
        of qubit A.
        """
        if not -1.0 < nz <= 1.0:
            raise ValueError("nz must lie in (-1, 1]")
        g1b = gamma1 if gamma1_b is None else gamma1_b
        gpb = gammaphi if gammaphi_b is None else gammaphi_b
        nzb = nz if nz_b is None else nz_b
        g3 = gamma1 * (1.0 - nz) / (1.0 + nz)
        g3b = g1b * (1.0 - nzb) / (1.0 + nzb)
        return cls(gamma1, g1b, g3, g3b, gammaphi, gpb, t_g, phi, nz, nzb, eta)


@dataclass(frozen=True)
class GateModel:
    """Generator pieces of one noisy gate, G = exp(J + t_g V + t_g D)."""

    generator_j: np.ndarray = field(repr=False)
    interaction_v: np.ndarray = field(repr=False)
    dissipation: np.ndarray = field(repr=False)
    gate_time: float
    phi: float

    def matrix(self, basis: OperatorBasis) -> MapMatrix:
        total = self.generator_j + self.interaction_v + self.dissipation
        return MapMatrix(basis.dim, matrix_exp(total), basis)


def _parse_rotation(label: str) -> tuple[np.ndarray, float]:
    axis = {"x": _X, "y": _Y}.get(label[0])
    if axis is None:
        raise ValueError(f"unknown gate label {label!r}; expected 'I' or axis+degrees like 'x90'")
    try:
        theta = np.deg2rad(float(label[1:]))
    except ValueError as exc:
        raise ValueError(f"unknown gate label {label!r}") from exc
    return axis, theta


def _qubit_dissipator(gamma1: float, gamma3: float, gammaphi: float) -> Dissipator:
    return Dissipator(
        (
            (gamma1, SIGMA_MINUS),
            (gamma3, SIGMA_PLUS),
            (gammaphi, _Z / np.sqrt(2.0)),
        )
    )


def _embed(op: np.ndarray, slot: int) -> np.ndarray:
    return np.kron(op, _I2) if slot == 0 else np.kron(_I2, op)


def gate_model(params: ZZModelParams, gate_label: str, basis: OperatorBasis) -> GateModel:
    """Generator decomposition of one noisy two-qubit-model gate."""
    if gate_label == "I":
        j = np.zeros((16, 16))
    else:
        axis, theta = _parse_rotation(gate_label)
        j = (theta / 2.0) * hamiltonian_matrix(_embed(axis, 0), basis)
    v = (params.phi / 2.0) * hamiltonian_matrix(np.kron(_Z, _Z), basis)
    channels = []
    for slot, (g1, g3, gp) in enumerate(
        ((params.gamma1_a, params.gamma3_a, params.gammaphi_a),
         (params.gamma1_b, params.gamma3_b, params.gammaphi_b))
    ):
        for rate, f in _qubit_dissipator(g1, g3, gp).ops:
            channels.append((rate, _embed(f, slot)))
    d = params.t_g * dissipator_matrix(Dissipator(tuple(channels)), basis)
    return GateModel(j, v, d, params.t_g, params.phi)


def build_gate(params: ZZModelParams, gate_label: str, basis: OperatorBasis | None = None) -> MapMatrix:
    """16x16 Liouville matrix of a noisy gate on the system + memory pair.

    ``gate_label`` is ``"I"`` for the idle gate or axis+degrees for a
    rotation of qubit A (see `GATE_LABELS`).  At phi = 0 the result
    factorizes as (single-qubit map on A) (x) (decoherence map on B).
    """
    basis = basis if basis is not None else pauli_basis(2, 2)
    if basis.dim != 4:
        raise ValueError("build_gate needs the two-qubit product basis")
    return gate_model(params, gate_label, basis).matrix(basis)


def build_qubit_gate(
    gamma1: float,
    gamma3: float,
    gammaphi: float,
    t_g: float,
    gate_label: str,
    basis: OperatorBasis | None = None,
) -> MapMatrix:
    """4x4 noisy single-qubit gate exp(J_G + t_g D).

    This is the reduced dynamics of qubit A in the two-qubit model when the
    interaction is switched off.
    """
    basis = basis if basis is not None else pauli_basis(1, 2)
    if gate_label == "I":
        j = np.zeros((4, 4))
    else:
        axis, theta = _parse_rotation(gate_label)
        j = (theta / 2.0) * hamiltonian_matrix(axis, basis)
    d = dissipator_matrix(_qubit_dissipator(gamma1, gamma3, gammaphi), basis)
    return MapMatrix(2, matrix_exp(j + t_g * d), basis)


def stationary_state(params: ZZModelParams) -> np.ndarray:
    """Product state rho_A (x) rho_B left invariant by the dissipator and V.

    Each factor is (I + nz Z) / 2 with nz fixed by the rate ratio; diagonal
    states commute with Z (x) Z, so the interaction leaves them alone too.
    """
    rho_a = 0.5 * (_I2 + params.nz_a * _Z)
    rho_b = 0.5 * (_I2 + params.nz_b * _Z)
    return np.kron(rho_a, rho_b)


#: preparation / measurement pulse labels realizing the standard qubit frame
#: from rho0 ~ |g> and M0 ~ |e><e|
STANDARD_INPUT_PULSES = ("I", "x180", "y90", "x-90")
STANDARD_OUTPUT_PULSES = ("x180", "I", "y90", "x-90")


def zz_context(
    params: ZZModelParams,
    frame=None,
    spam_errors: bool = True,
    gate_labels: tuple[str, ...] = GATE_LABELS,
):
    """Assemble gates, SPAM configuration and target frame for the two-qubit model.

    With ``spam_errors`` the single-qubit standard frame is prepared and
    measured through the model's own noisy pulses, starting from the
    stationary state and ending in the effect eta |e><e| (x) I.  Without it,
    the given frame (any single-qubit `StateSet`) is prepared exactly on
    qubit A while the memory starts in its stationary state.

    Returns ``(gates, spam, frame)`` ready for the witness functions.
    """
    from .tomography import SpamConfig, standard_set
    from .liouville import vectorize_effect, vectorize_state

    basis = pauli_basis(2, 2)
    gates = {label: build_gate(params, label, basis) for label in gate_labels}
    excited = np.outer([0.0, 1.0], [0.0, 1.0]).astype(complex)
    m0 = params.eta * np.kron(excited, _I2)
    if spam_errors:
        if frame is None:
            frame = standard_set(2)
        if frame.label != "standard" or frame.dim != 2:
            raise ValueError("noisy preparation pulses realize only the standard qubit frame")
        spam = SpamConfig.from_gates(
            [gates[l] for l in STANDARD_INPUT_PULSES],
            [gates[l] for l in STANDARD_OUTPUT_PULSES],
            stationary_state(params),
            m0,
            basis,
        )
    else:
        if frame is None:
            frame = standard_set(2)
        if frame.dim != 2:
            raise ValueError("the memory model tests a single qubit; use a d=2 frame")
        rho_b = 0.5 * (_I2 + params.nz_b * _Z)
        phi_in = np.stack(
            [vectorize_state(np.kron(rho, rho_b), basis) for rho in frame.states], axis=1
        )
        phi_out = np.stack(
            [vectorize_effect(params.eta * np.kron(pi, _I2), basis) for pi in frame.effects], axis=1
        )
        spam = SpamConfig(phi_in, phi_out, basis)
    return gates, spam, frame
