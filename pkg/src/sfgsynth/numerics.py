"""Dense linear algebra helpers for a three-qubit register.

Basis ordering: index ``x = 4*x2 + 2*x1 + x0`` where ``xq`` is the value of
qubit ``q``, i.e. qubit 2 is the most significant bit.
"""
from __future__ import annotations

import numpy as np

NUM_QUBITS = 3
DIM = 2**NUM_QUBITS

# Planck constant in meV per GHz (equivalently meV * ns).
PLANCK_MEV_NS = 4.135667e-3

UNITARY_ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= atol


def _check_qubit(q: int) -> None:
    if not (0 <= q < NUM_QUBITS):
        raise ValueError(f"qubit index {q} out of range 0..{NUM_QUBITS - 1}")


def embed_single(u2: np.ndarray, qubit: int) -> np.ndarray:
    """Lift a 2x2 operator onto ``qubit`` of the register."""
    _check_qubit(qubit)
    u2 = np.asarray(u2, dtype=complex)
    if u2.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {u2.shape}")
    factors = [I2] * NUM_QUBITS
    # Kronecker order is most significant qubit first.
    factors[NUM_QUBITS - 1 - qubit] = u2
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def embed_pair(u4: np.ndarray, qa: int, qb: int) -> np.ndarray:
    """Lift a 4x4 operator onto qubits ``(qa, qb)``.

    The 4x4 matrix is indexed by the two-bit word ``2*x_qa + x_qb``, so
    ``qa`` plays the role of the high bit. The remaining qubit is untouched.
    """
    _check_qubit(qa)
    _check_qubit(qb)
    if qa == qb:
        raise ValueError("two-qubit embedding needs distinct qubits")
    u4 = np.asarray(u4, dtype=complex)
    if u4.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {u4.shape}")
    idx = np.arange(DIM)
    bits = (idx[:, None] >> np.arange(NUM_QUBITS)) & 1
    other = ({0, 1, 2} - {qa, qb}).pop()
    word = 2 * bits[:, qa] + bits[:, qb]
    same_other = bits[:, other][:, None] == bits[:, other][None, :]
    return np.where(same_other, u4[word[:, None], word[None, :]], 0)


def mat_power(u: np.ndarray, k: int) -> np.ndarray:
    if k < 0:
        raise ValueError("matrix power must be non-negative")
    return np.linalg.matrix_power(np.asarray(u, dtype=complex), k)


def energy_to_frequency(energy_mev: float) -> float:
    """Convert an energy in meV to a frequency in GHz via E = h * nu."""
    if energy_mev < 0:
        raise ValueError("energy must be non-negative")
    return energy_mev / PLANCK_MEV_NS


def basis_state(index: int = 0) -> np.ndarray:
    psi = np.zeros(DIM, dtype=complex)
    psi[index] = 1.0
    return psi
