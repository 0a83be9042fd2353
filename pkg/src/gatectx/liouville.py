"""Operator bases and the real-matrix (Liouville) representation of quantum maps.

A linear map S on operators over a d-dimensional Hilbert space is encoded as
a real d^2 x d^2 matrix with entries S_nm = Tr[P_n S(P_m)] / d, where {P_n}
is a Hermitian operator basis orthogonal under the Hilbert-Schmidt inner
product, Tr[P_n P_m] = d delta_nm.  In this representation map composition is
matrix multiplication, which is what makes gate-sequence bookkeeping cheap.

Conventions fixed here and relied on by the rest of the package:

* element 0 of every basis is the identity, the rest are traceless;
* qubit bases are ordered (I, X, Y, Z), multi-qudit bases are Kronecker
  products with the leftmost factor slowest (index = d1^2 * n_A + n_B);
* states vectorize as v_n = Tr[P_n rho] / sqrt(d) and effects the same way,
  so that Tr[M rho] = m . v.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError

__all__ = [
    "STRUCTURAL_TOL",
    "SPECTRAL_TOL",
    "OperatorBasis",
    "MapMatrix",
    "UnitalDecomposition",
    "pauli_basis",
    "liouville_of_unitary",
    "liouville_of_channel",
    "compose",
    "change_basis",
    "is_trace_preserving",
    "unital_decomposition",
    "unitarity_det",
    "unitarity_frobenius",
    "spectrum",
    "spectral_radius",
    "vectorize_state",
    "vectorize_effect",
    "unvectorize",
]

STRUCTURAL_TOL = 1e-10
SPECTRAL_TOL = 1e-8

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def _gell_mann() -> list[np.ndarray]:
    """The eight Gell-Mann matrices, Tr[g_i g_j] = 2 delta_ij."""
    g = []
    for j, k in ((0, 1), (0, 2), (1, 2)):
        m = np.zeros((3, 3), dtype=complex)
        m[j, k] = m[k, j] = 1.0
        g.append(m)
        m = np.zeros((3, 3), dtype=complex)
        m[j, k] = -1.0j
        m[k, j] = 1.0j
        g.append(m)
    g.append(np.diag([1.0, -1.0, 0.0]).astype(complex))
    g.append(np.diag([1.0, 1.0, -2.0]).astype(complex) / np.sqrt(3.0))
    return g


@dataclass(frozen=True)
class OperatorBasis:
    """Hermitian operator basis {P_n} with Tr[P_n P_m] = d delta_nm.

    Parameters
    ----------
    dim : int
        Hilbert-space dimension d.
    elements : ndarray, shape (d**2, d, d)
        The basis operators, identity first.
    labels : tuple of str
        One label per element.
    """

    dim: int
    elements: np.ndarray = field(repr=False)
    labels: tuple[str, ...]

    def __post_init__(self):
        d = self.dim
        el = np.asarray(self.elements, dtype=complex)
        if el.shape != (d * d, d, d):
            raise ValueError(f"expected {d * d} operators of shape ({d},{d}), got {el.shape}")
        if len(self.labels) != d * d:
            raise ValueError("one label per basis element required")
        if np.abs(el - el.conj().transpose(0, 2, 1)).max() > 1e-12:
            raise ValueError("basis elements must be Hermitian")
        gram = np.einsum("nij,mji->nm", el, el)
        if np.abs(gram - d * np.eye(d * d)).max() > 1e-12:
            raise ValueError("basis elements must satisfy Tr[P_n P_m] = d delta_nm")
        object.__setattr__(self, "elements", el)

    @property
    def size(self) -> int:
        return self.dim * self.dim

    def tensor(self, other: "OperatorBasis") -> "OperatorBasis":
        """Product basis, left factor slowest."""
        el = np.kron(self.elements[:, None], other.elements[None, :]).reshape(
            self.size * other.size, self.dim * other.dim, self.dim * other.dim
        )
        sep = "" if all(len(l) == 1 for l in self.labels + other.labels) else ","
        labels = tuple(a + sep + b for a in self.labels for b in other.labels)
        return OperatorBasis(self.dim * other.dim, el, labels)


def pauli_basis(n_qudits: int = 1, d: int = 2) -> OperatorBasis:
    """Generalized Pauli basis for ``n_qudits`` systems of dimension ``d``.

    For d=2 the single-qubit basis is (I, X, Y, Z); for d=3 it is the
    identity plus the Gell-Mann matrices scaled to Tr[P_n P_m] = 3 delta_nm.
    Multi-qudit bases are Kronecker products, leftmost factor slowest.
    """
    if n_qudits < 1:
        raise ValueError("n_qudits must be >= 1")
    if d == 2:
        single = OperatorBasis(2, np.stack(list(_PAULI.values())), tuple(_PAULI))
    elif d == 3:
        el = [np.eye(3, dtype=complex)] + [np.sqrt(1.5) * g for g in _gell_mann()]
        single = OperatorBasis(3, np.stack(el), ("I",) + tuple(f"G{k}" for k in range(1, 9)))
    else:
        raise ValueError(f"unsupported qudit dimension {d}; expected 2 or 3")
    basis = single
    for _ in range(n_qudits - 1):
        basis = basis.tensor(single)
    return basis


@dataclass(frozen=True)
class MapMatrix:
    """Real d^2 x d^2 Liouville matrix of a Hermiticity-preserving map."""

    dim: int
    entries: np.ndarray = field(repr=False)
    basis: OperatorBasis = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        n = self.dim * self.dim
        if m.shape != (n, n):
            raise ValueError(f"expected shape ({n},{n}), got {m.shape}")
        if self.basis.dim != self.dim:
            raise ValueError("basis dimension does not match map dimension")
        object.__setattr__(self, "entries", m)

    def __matmul__(self, other: "MapMatrix") -> "MapMatrix":
        return compose(self, other)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the map to a density operator (matrix in, matrix out)."""
        return unvectorize(self.entries @ vectorize_state(rho, self.basis), self.basis)


@dataclass(frozen=True)
class UnitalDecomposition:
    """Non-unital vector kappa and unital block W of a trace-preserving map."""

    kappa: np.ndarray
    w: np.ndarray

    def reassemble(self, basis: OperatorBasis) -> MapMatrix:
        n = len(self.kappa) + 1
        m = np.zeros((n, n))
        m[0, 0] = 1.0
        m[1:, 0] = self.kappa
        m[1:, 1:] = self.w
        dim = int(round(np.sqrt(n)))
        return MapMatrix(dim, m, basis)


def vectorize_state(rho: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Coefficients Tr[P_n rho] / sqrt(d) of a Hermitian operator."""
    v = np.einsum("nij,ji->n", basis.elements, np.asarray(rho, dtype=complex))
    if np.abs(v.imag).max() > 1e-10:
        raise ValueError("operator is not Hermitian: complex basis coefficients")
    return v.real / np.sqrt(basis.dim)


def vectorize_effect(m: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Same encoding as `vectorize_state`; kept separate for call-site clarity."""
    return vectorize_state(m, basis)


def unvectorize(v: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Inverse of `vectorize_state`."""
    return np.einsum("n,nij->ij", np.asarray(v, dtype=float), basis.elements) / np.sqrt(basis.dim)


def liouville_of_unitary(u: np.ndarray, basis: OperatorBasis, tol: float = STRUCTURAL_TOL) -> MapMatrix:
    """Liouville matrix of the conjugation map A -> U A U^dagger.

    The result is real orthogonal with determinant +1.
    """
    u = np.asarray(u, dtype=complex)
    d = basis.dim
    if u.shape != (d, d):
        raise ValueError(f"expected a ({d},{d}) unitary, got {u.shape}")
    if np.abs(u @ u.conj().T - np.eye(d)).max() > tol:
        raise ValueError("input matrix is not unitary within tolerance")
    rotated = np.einsum("ab,mbc,dc->mad", u, basis.elements, u.conj())
    entries = np.einsum("nij,mji->nm", basis.elements, rotated).real / d
    return MapMatrix(d, entries, basis)


def liouville_of_channel(apply_fn, basis: OperatorBasis) -> MapMatrix:
    """Liouville matrix of an arbitrary Hermiticity-preserving map.

    ``apply_fn`` maps a d x d complex matrix to a d x d complex matrix.
    Dense and slow; intended for tests and small constructions.
    """
    d = basis.dim
    entries = np.empty((d * d, d * d))
    for m in range(d * d):
        out = apply_fn(basis.elements[m])
        col = np.einsum("nij,ji->n", basis.elements, out) / d
        if np.abs(col.imag).max() > 1e-10:
            raise ValueError("map is not Hermiticity-preserving")
        entries[:, m] = col.real
    return MapMatrix(d, entries, basis)


def compose(s2: MapMatrix, s1: MapMatrix) -> MapMatrix:
    """Matrix of the composition s2 after s1, i.e. the product S2 S1."""
    if s1.dim != s2.dim:
        raise ValueError(f"dimension mismatch: {s2.dim} vs {s1.dim}")
    if s1.basis is not s2.basis and not np.array_equal(s1.basis.elements, s2.basis.elements):
        raise ValueError("maps are expressed in different operator bases")
    return MapMatrix(s1.dim, s2.entries @ s1.entries, s1.basis)


def change_basis(s: MapMatrix, o: np.ndarray, tol: float = STRUCTURAL_TOL) -> MapMatrix:
    """Conjugate the representation, S' = O S O^T, for orthogonal O.

    The spectrum and determinant are invariant, so every statistic built on
    them is independent of the operator basis chosen.
    """
    o = np.asarray(o, dtype=float)
    n = s.dim * s.dim
    if o.shape != (n, n):
        raise ValueError(f"expected a ({n},{n}) orthogonal matrix")
    if np.abs(o @ o.T - np.eye(n)).max() > tol:
        raise ValueError("basis-change matrix is not orthogonal within tolerance")
    rotated = np.einsum("ni,nab->iab", o, s.basis.elements)
    new_basis = OperatorBasis(s.dim, rotated, tuple(f"Q{k}" for k in range(n)))
    return MapMatrix(s.dim, o @ s.entries @ o.T, new_basis)


def _trace_vector(basis: OperatorBasis) -> np.ndarray:
    return np.einsum("nii->n", basis.elements).real / basis.dim


def is_trace_preserving(s: MapMatrix, tol: float = STRUCTURAL_TOL) -> bool:
    """Whether S^T tau = tau for tau_n = Tr[P_n] / d."""
    tau = _trace_vector(s.basis)
    return bool(np.abs(s.entries.T @ tau - tau).max() <= tol)


def unital_decomposition(s: MapMatrix, tol: float = STRUCTURAL_TOL) -> UnitalDecomposition:
    """Split a trace-preserving map into its non-unital and unital parts.

    Requires the identity-first basis convention, under which a TP map has
    first row (1, 0, ..., 0); kappa is the rest of the first column and W
    the lower-right block.
    """
    top = np.zeros(s.dim * s.dim)
    top[0] = 1.0
    if np.abs(s.entries[0] - top).max() > tol:
        raise ValueError("map is not trace-preserving (first row deviates from (1, 0, ..., 0))")
    return UnitalDecomposition(kappa=s.entries[1:, 0].copy(), w=s.entries[1:, 1:].copy())


def unitarity_det(s: MapMatrix) -> float:
    """Determinant-based unitarity |det S|^(2 / (d^2 - 1)).

    Gauge invariant: conjugating the representation leaves it unchanged.
    Equals 1 exactly for unitary maps and lies in [0, 1] for CPTP maps.
    """
    sign, logabsdet = np.linalg.slogdet(s.entries)
    if sign == 0 or np.isneginf(logabsdet):
        return 0.0
    return float(np.exp(2.0 * logabsdet / (s.dim * s.dim - 1)))


def unitarity_frobenius(s: MapMatrix, tol: float = STRUCTURAL_TOL) -> float:
    """Frobenius unitarity Tr[W^T W] / (d^2 - 1) of the unital block W.

    Upper-bounds `unitarity_det` for trace-preserving maps (AM-GM on the
    squared singular values of W).
    """
    w = unital_decomposition(s, tol=tol).w
    return float(np.einsum("ij,ij->", w, w) / (s.dim * s.dim - 1))


def spectrum(s: MapMatrix) -> np.ndarray:
    """Eigenvalues of the real representation matrix."""
    try:
        return np.linalg.eigvals(s.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed for {s.dim**2}x{s.dim**2} map: {exc}") from exc


def spectral_radius(s: MapMatrix) -> float:
    """Largest eigenvalue modulus."""
    return float(np.abs(spectrum(s)).max())
