"""Tomographic frames, probability matrices and log-det variance formulas.

A frame is a set of d^2 input states rho_i and d^2 measurement effects
Pi_k.  Running a gate sequence S between preparation and measurement yields
the probability matrix

    P(S) = Phi_out^T S Phi_in,      P_{k|i} = Tr[M_k^exp S(rho_i^exp)],

where the columns of Phi_in / Phi_out are the vectorized actual (possibly
SPAM-affected) states and effects.  Everything downstream is built on
determinants and spectra of these matrices, which is what makes the tests
insensitive to the unknown but fixed Phi factors.

The closed-form variance of log|det P-hat| under binomial sampling noise,

    var = (1/N_s) sum_{ik} (P^{-1})_{ik}^2 P_{ki} (1 - P_{ki}),

is the workhorse used to weight least-squares fits; symmetric (SIC) frames
minimize it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import NumericalError
from .liouville import MapMatrix, OperatorBasis, pauli_basis, vectorize_effect, vectorize_state

__all__ = [
    "StateSet",
    "ProbMatrix",
    "SpamConfig",
    "standard_set",
    "sic_set",
    "tensor_set",
    "ideal_prob_matrix",
    "ideal_log_det",
    "probability_matrix",
    "raw_map",
    "logdet_variance",
    "sic_variance_closed_form",
    "sic_tensor_variance",
    "mixed_sic_variance",
    "frobenius_bound",
    "basis_for_factors",
]

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class StateSet:
    """Tomographic frame: d^2 input states and d^2 measurement effects.

    Parameters
    ----------
    dim : int
        System dimension d.
    states : ndarray, shape (d**2, d, d)
        Density matrices rho_i.
    effects : ndarray, shape (d**2, d, d)
        Positive operators Pi_k with 0 <= Pi_k <= I.
    label : str
        One of ``"standard"``, ``"sic"`` or ``"tensor(...)"``.
    factors : tuple of int
        Subsystem dimensions, e.g. (2, 2) for a two-qubit product frame.
    """

    dim: int
    states: np.ndarray = field(repr=False)
    effects: np.ndarray = field(repr=False)
    label: str
    factors: tuple[int, ...] = ()

    def __post_init__(self):
        d, n = self.dim, self.dim * self.dim
        states = np.asarray(self.states, dtype=complex)
        effects = np.asarray(self.effects, dtype=complex)
        if states.shape != (n, d, d) or effects.shape != (n, d, d):
            raise ValueError(f"expected {n} states and effects of shape ({d},{d})")
        if not self.factors:
            object.__setattr__(self, "factors", (d,))
        elif int(np.prod(self.factors)) != d:
            raise ValueError("factors must multiply to the system dimension")
        for rho in states:
            if abs(np.trace(rho) - 1.0) > 1e-12 or np.abs(rho - rho.conj().T).max() > 1e-12:
                raise ValueError("states must be unit-trace Hermitian matrices")
            if np.linalg.eigvalsh(rho).min() < -1e-12:
                raise ValueError("states must be positive semidefinite")
        for pi in effects:
            if np.abs(pi - pi.conj().T).max() > 1e-12:
                raise ValueError("effects must be Hermitian")
            ev = np.linalg.eigvalsh(pi)
            if ev.min() < -1e-12 or ev.max() > 1.0 + 1e-12:
                raise ValueError("effects must satisfy 0 <= Pi <= I")
        ideal = np.einsum("kab,iba->ki", effects, states).real
        if abs(np.linalg.det(ideal)) < 1e-15:
            raise ValueError("frame is not informationally complete (singular ideal matrix)")
        if self.label == "sic":
            target = (d * np.eye(n) + 1.0) / (d + 1.0)
            if np.abs(ideal - target).max() > 1e-12:
                raise ValueError("label 'sic' requires pairwise overlaps 1/(d+1)")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "effects", effects)

    def to_dict(self) -> dict:
        """JSON-compatible form; complex numbers become [re, im] pairs."""
        as_pairs = lambda a: np.stack([a.real, a.imag], axis=-1).tolist()
        return {
            "dim": self.dim,
            "label": self.label,
            "factors": list(self.factors),
            "states": as_pairs(self.states),
            "effects": as_pairs(self.effects),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StateSet":
        unpair = lambda a: np.asarray(a)[..., 0] + 1j * np.asarray(a)[..., 1]
        return cls(
            dim=int(data["dim"]),
            states=unpair(data["states"]),
            effects=unpair(data["effects"]),
            label=str(data["label"]),
            factors=tuple(data.get("factors", ())),
        )

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load_json(cls, path) -> "StateSet":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class ProbMatrix:
    """Matrix of outcome probabilities P_{k|i} (row k: effect, column i: state)."""

    entries: np.ndarray = field(repr=False)
    kind: str = "true"
    n_s: int | None = None

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("probability matrix must be square")
        if m.min() < -1e-9 or m.max() > 1.0 + 1e-9:
            raise ValueError("probabilities must lie in [0, 1]")
        if self.kind not in ("true", "sampled"):
            raise ValueError("kind must be 'true' or 'sampled'")
        if self.kind == "sampled":
            if self.n_s is None or self.n_s < 1:
                raise ValueError("sampled probability matrices carry the shot count n_s")
            counts = m * self.n_s
            if np.abs(counts - np.round(counts)).max() > 1e-6:
                raise ValueError("sampled entries must be integer multiples of 1/n_s")
        object.__setattr__(self, "entries", np.clip(m, 0.0, 1.0))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def log_abs_det(self) -> float:
        sign, logdet = np.linalg.slogdet(self.entries)
        if sign == 0:
            raise NumericalError("probability matrix is singular")
        return float(logdet)

    def to_dict(self) -> dict:
        return {"entries": self.entries.tolist(), "kind": self.kind, "n_s": self.n_s}

    @classmethod
    def from_dict(cls, data: dict) -> "ProbMatrix":
        n_s = data.get("n_s")
        return cls(np.asarray(data["entries"], dtype=float), str(data["kind"]), None if n_s is None else int(n_s))

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load_json(cls, path) -> "ProbMatrix":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _ket_states(kets: list[np.ndarray]) -> np.ndarray:
    return np.stack([np.outer(k, k.conj()) for k in kets])


def standard_set(d: int, n_factors: int = 1) -> StateSet:
    """Standard tomographic frame from basis kets and +/i superposition pairs.

    The single-factor states are {|n>} followed by (|n> + |m>) / sqrt(2) and
    (|n> + i |m>) / sqrt(2) for n < m; effects are the matching projectors.
    ``n_factors > 1`` returns the tensor-product frame.
    """
    if d not in (2, 3, 4):
        raise ValueError(f"unsupported dimension {d} for the standard frame")
    eye = np.eye(d, dtype=complex)
    kets = [eye[n] for n in range(d)]
    kets += [(eye[n] + eye[m]) / np.sqrt(2.0) for n, m in combinations(range(d), 2)]
    kets += [(eye[n] + 1j * eye[m]) / np.sqrt(2.0) for n, m in combinations(range(d), 2)]
    states = _ket_states(kets)
    single = StateSet(d, states, states.copy(), "standard", (d,))
    out = single
    for _ in range(n_factors - 1):
        out = tensor_set(out, single)
    return out


def sic_set(d: int) -> StateSet:
    """Symmetric informationally complete frame, |<psi_i|psi_j>|^2 = 1/(d+1).

    d=2 is the regular tetrahedron on the Bloch sphere anchored at |0>;
    d=3 takes the nine equal-weight superpositions of basis-ket pairs with
    phases 1, e^{2 pi i / 3}, e^{-2 pi i / 3}.
    """
    if d == 2:
        w = np.exp(2j * np.pi / 3.0)
        kets = [
            np.array([1.0, 0.0], dtype=complex),
            np.array([1.0, np.sqrt(2.0)], dtype=complex) / np.sqrt(3.0),
            np.array([1.0, w * np.sqrt(2.0)], dtype=complex) / np.sqrt(3.0),
            np.array([1.0, w.conjugate() * np.sqrt(2.0)], dtype=complex) / np.sqrt(3.0),
        ]
    elif d == 3:
        w = np.exp(2j * np.pi / 3.0)
        eye = np.eye(3, dtype=complex)
        kets = [
            (eye[n] + phase * eye[m]) / np.sqrt(2.0)
            for n, m in ((0, 1), (0, 2), (1, 2))
            for phase in (1.0, w, w.conjugate())
        ]
    else:
        raise ValueError(f"unsupported dimension {d} for the SIC frame")
    states = _ket_states(kets)
    return StateSet(d, states, states.copy(), "sic", (d,))


def tensor_set(a: StateSet, b: StateSet) -> StateSet:
    """Product frame with states rho_i (x) rho_j, left factor slowest."""
    states = np.kron(a.states[:, None], b.states[None, :]).reshape(
        a.dim * a.dim * b.dim * b.dim, a.dim * b.dim, a.dim * b.dim
    )
    effects = np.kron(a.effects[:, None], b.effects[None, :]).reshape(states.shape)
    return StateSet(a.dim * b.dim, states, effects, f"tensor({a.label},{b.label})", a.factors + b.factors)


def ideal_prob_matrix(s: StateSet) -> ProbMatrix:
    """Probability matrix Tr[Pi_k rho_i] of the frame itself (no gate, no SPAM)."""
    return ProbMatrix(np.einsum("kab,iba->ki", s.effects, s.states).real, "true")


def ideal_log_det(s: StateSet) -> float:
    """log |det| of the ideal frame matrix; -this is the offset in the L statistics."""
    return ideal_prob_matrix(s).log_abs_det()


def basis_for_factors(factors: tuple[int, ...]) -> OperatorBasis:
    """Product Pauli / Gell-Mann basis matching a frame's subsystem structure."""
    basis = pauli_basis(1, factors[0])
    for d in factors[1:]:
        basis = basis.tensor(pauli_basis(1, d))
    return basis


@dataclass(frozen=True)
class SpamConfig:
    """State preparation and measurement model behind a tomography run.

    The columns of ``phi_in`` are the vectorized prepared states, those of
    ``phi_out`` the vectorized measured effects, both expressed in ``basis``
    on the full (possibly system + memory) space.  The number of columns
    sets the size of every probability matrix produced with this config.
    """

    phi_in: np.ndarray = field(repr=False)
    phi_out: np.ndarray = field(repr=False)
    basis: OperatorBasis = field(repr=False)

    def __post_init__(self):
        pin, pout = np.asarray(self.phi_in, float), np.asarray(self.phi_out, float)
        if pin.shape != pout.shape or pin.shape[0] != self.basis.size:
            raise ValueError("phi_in / phi_out must be (basis size) x (frame size) matrices")
        if abs(np.linalg.det(pout.T @ pin)) < 1e-300:
            raise ValueError("SPAM configuration is not informationally complete")
        object.__setattr__(self, "phi_in", pin)
        object.__setattr__(self, "phi_out", pout)

    @property
    def n_outcomes(self) -> int:
        return self.phi_in.shape[1]

    @classmethod
    def from_gates(
        cls,
        input_gates: list[MapMatrix],
        output_gates: list[MapMatrix],
        rho0: np.ndarray,
        m0: np.ndarray,
        basis: OperatorBasis,
    ) -> "SpamConfig":
        """Fixed preparation rho0 and effect m0 steered by gate lists.

        Prepared states are G_i^in(rho0) and measured effects the adjoints
        G_k^out^dag(m0); in Liouville form the adjoint is the transpose.
        """
        v_rho = vectorize_state(rho0, basis)
        v_m = vectorize_effect(m0, basis)
        phi_in = np.stack([g.entries @ v_rho for g in input_gates], axis=1)
        phi_out = np.stack([g.entries.T @ v_m for g in output_gates], axis=1)
        return cls(phi_in, phi_out, basis)

    @classmethod
    def ideal(cls, frame: StateSet, basis: OperatorBasis | None = None) -> "SpamConfig":
        """Error-free preparation / measurement of the target frame."""
        basis = basis if basis is not None else basis_for_factors(frame.factors)
        phi_in = np.stack([vectorize_state(r, basis) for r in frame.states], axis=1)
        phi_out = np.stack([vectorize_effect(p, basis) for p in frame.effects], axis=1)
        return cls(phi_in, phi_out, basis)


def probability_matrix(seq: MapMatrix | None, spam: SpamConfig) -> ProbMatrix:
    """True (infinite-shot) probability matrix Phi_out^T S Phi_in.

    ``seq=None`` stands for the null instruction (nothing between the
    preparation and measurement stages), i.e. S is the identity.
    """
    if seq is None:
        entries = spam.phi_out.T @ spam.phi_in
    else:
        if seq.basis.size != spam.basis.size:
            raise ValueError("sequence map and SPAM config live on different spaces")
        entries = spam.phi_out.T @ seq.entries @ spam.phi_in
    return ProbMatrix(entries, "true")


def _checked_inverse(m: np.ndarray, what: str) -> np.ndarray:
    if np.linalg.cond(m) > CONDITION_LIMIT:
        raise NumericalError(
            f"{what} has condition number above {CONDITION_LIMIT:.0e}; "
            "use shorter gate sequences"
        )
    return np.linalg.inv(m)


def raw_map(p: ProbMatrix, ideal: StateSet) -> MapMatrix:
    """Frame-corrected map (Phi_out^ideal,T)^-1 P (Phi_in^ideal)^-1.

    Equals the true sequence map when preparation and measurement hit the
    target frame exactly; with SPAM errors it keeps the spectrum-based
    statistics intact while normalizing the scale.
    """
    basis = basis_for_factors(ideal.factors)
    spam = SpamConfig.ideal(ideal, basis)
    left = _checked_inverse(spam.phi_out.T, "ideal output frame")
    right = _checked_inverse(spam.phi_in, "ideal input frame")
    return MapMatrix(ideal.dim, left @ p.entries @ right, basis)


def logdet_variance(p: ProbMatrix, n_s: int | None = None) -> float:
    """First-order variance of log |det P-hat| under binomial noise.

    ``n_s`` defaults to the shot count carried by a sampled matrix.  The
    estimate is reliable while the linearization holds, i.e. while P is
    well conditioned.
    """
    n_s = n_s if n_s is not None else p.n_s
    if n_s is None:
        raise ValueError("n_s is required for a 'true' probability matrix")
    inv = _checked_inverse(p.entries, "probability matrix")
    return float(np.einsum("ik,ki->", inv**2, p.entries * (1.0 - p.entries)) / n_s)


def sic_variance_closed_form(d: int, n_s: int) -> float:
    """log-det variance of the ideal SIC frame: (d-1) / (d (d+1) N_s)."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return (d - 1.0) / (d * (d + 1.0) * n_s)


def sic_tensor_variance(d: int, n: int, n_s: int) -> float:
    """log-det variance of the n-fold tensor power of an ideal SIC frame."""
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    r = d * d + 2.0 * d - 1.0
    return ((r - 1.0 / d) ** n - (r - 2.0 / (d + 1.0)) ** n) / n_s


def _sic_product_factors(d: int) -> tuple[float, float]:
    beta = (d * d + d - 1.0) / d**2
    gamma = -1.0 / d**2
    alpha = 1.0 / (d + 1.0)
    r = d * d * (beta**2 + (d * d - 1.0) * alpha * gamma**2)
    q = d * d * (beta**2 + (d * d - 1.0) * alpha**2 * gamma**2)
    return r, q


def mixed_sic_variance(d1: int, d2: int, n_s: int) -> float:
    """log-det variance of the product of SIC frames in dimensions d1 and d2."""
    if d1 < 2 or d2 < 2:
        raise ValueError("both dimensions must be at least 2")
    r1, q1 = _sic_product_factors(d1)
    r2, q2 = _sic_product_factors(d2)
    return (r1 * r2 - q1 * q2) / n_s


def frobenius_bound(p: ProbMatrix, n_s: int | None = None) -> float:
    """Strict upper bound ||P^-1||_F^2 / (4 N_s) on `logdet_variance`."""
    n_s = n_s if n_s is not None else p.n_s
    if n_s is None:
        raise ValueError("n_s is required for a 'true' probability matrix")
    inv = _checked_inverse(p.entries, "probability matrix")
    return float(np.einsum("ik,ik->", inv, inv) / (4.0 * n_s))
