"""Exact dense simulation of mixed-dimension circuits and entanglement diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .circuit import UNITARY_TOL, Circuit, gate_matrix, monomial_form

if TYPE_CHECKING:
    from .compressor import Encoding

MAX_SIM_DIM = 2**12
RANK_TOL = 1e-9
EIGEN_CUTOFF = 1e-12


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class StateVector:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != math.prod(self.dims):
            raise SimulationError(f"{amps.size} amplitudes for dims {self.dims}")
        if abs(np.linalg.norm(amps) - 1) >= UNITARY_TOL:
            raise SimulationError("state is not normalized")
        object.__setattr__(self, "amplitudes", amps)


@lru_cache(maxsize=4096)
def _register_gather(cols: bytes, wires: tuple[int, ...], dims: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    cols_arr = np.frombuffer(cols, dtype=np.intp)
    digits = np.indices(dims).reshape(len(dims), -1)
    wdims = tuple(dims[w] for w in wires)
    row = np.ravel_multi_index(tuple(digits[list(wires)]), wdims)
    for w, d in zip(wires, np.unravel_index(cols_arr[row], wdims)):
        digits[w] = d
    return np.ravel_multi_index(tuple(digits), dims), row


def _register_map(cols, vals, wires, dims):
    """Source row and phase per register row for a monomial gate on ``wires``."""
    src, row = _register_gather(cols.astype(np.intp).tobytes(), wires, dims)
    return src, vals[row]


def apply_operator(block: np.ndarray, matrix: np.ndarray, wires: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Left-multiply ``block`` (rows indexed by the register) by ``matrix`` on ``wires``."""
    return _apply(block, matrix, monomial_form(matrix), wires, dims)


def _apply(block, matrix, mono, wires, dims):
    dims = tuple(dims)
    n = len(dims)
    ncols = block.shape[1]
    k = len(wires)
    wdims = [dims[w] for w in wires]
    t = block.reshape(dims + (ncols,))
    if mono is not None:
        src, phase = _register_map(*mono, tuple(wires), dims)
        out = block[src]
        if not np.all(phase == 1):
            out *= phase[:, None]
        return out
    g = matrix.reshape(wdims + wdims)
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(wires)))
    # tensordot puts the gate's output axes first; move them back into place
    rest = [a for a in range(n) if a not in wires]
    order = list(wires) + rest + [n]
    t = np.moveaxis(t, list(range(n + 1)), order)
    return t.reshape(block.shape)


def circuit_action(c: Circuit, block: np.ndarray) -> np.ndarray:
    """Apply every gate of ``c`` in order to the columns of ``block``."""
    dims = c.dims
    out = np.array(block, dtype=complex)
    squeeze = out.ndim == 1
    if squeeze:
        out = out.reshape(-1, 1)
    if out.shape[0] != c.total_dim:
        raise SimulationError(f"block has {out.shape[0]} rows, circuit dimension is {c.total_dim}")
    for g in c.gates:
        m = gate_matrix(g, dims)
        out = _apply(out, m, g.monomial if g.matrix is not None else monomial_form(m), g.wires, dims)
    return out.reshape(-1) if squeeze else out


def circuit_unitary(c: Circuit) -> np.ndarray:
    if c.total_dim > MAX_SIM_DIM:
        raise SimulationError(f"total dimension {c.total_dim} exceeds simulation cap {MAX_SIM_DIM}")
    return circuit_action(c, np.eye(c.total_dim, dtype=complex))


def circuit_state(c: Circuit, initial: np.ndarray | None = None) -> StateVector:
    """Run ``c`` on ``initial`` (default all wires in level 0)."""
    if c.total_dim > MAX_SIM_DIM:
        raise SimulationError(f"total dimension {c.total_dim} exceeds simulation cap {MAX_SIM_DIM}")
    if initial is None:
        initial = np.zeros(c.total_dim, dtype=complex)
        initial[0] = 1
    return StateVector(c.dims, circuit_action(c, initial))


def encoding_rows(e: Encoding) -> np.ndarray:
    """Register index of the qudit basis state encoding each qubit basis state."""
    n = e.n_qubits
    x = np.arange(2**n)
    rows = np.zeros(2**n, dtype=np.int64)
    for g, d in zip(e.groups, e.qudit_dims):
        level = np.zeros(2**n, dtype=np.int64)
        for q in g:
            level = 2 * level + ((x >> (n - 1 - q)) & 1)
        rows = rows * d + level
    return rows


def encoding_isometry(e: Encoding) -> np.ndarray:
    """0/1 matrix mapping each qubit basis state to its qudit basis state.

    Qubit 0 is the most significant bit of the column index; qudit 0 is the
    most significant digit of the row index.
    """
    rows = encoding_rows(e)
    out = np.zeros((math.prod(e.qudit_dims), len(rows)))
    out[rows, np.arange(len(rows))] = 1
    return out


def phase_aligned_residual(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phi} b| with phi fixed by the largest-magnitude entry of ``a``."""
    if a.shape != b.shape:
        raise SimulationError(f"shape mismatch {a.shape} vs {b.shape}")
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    phase = 1.0 + 0j
    if abs(b[idx]) > 1e-12:
        phase = (a[idx] / abs(a[idx])) / (b[idx] / abs(b[idx]))
    return float(np.max(np.abs(a - phase * b)))


@dataclass(frozen=True)
class Equivalence:
    equal: bool
    residual: float


def verify_equivalence(u_qubit: np.ndarray, u_qudit: np.ndarray, e: Encoding, tol: float = 1e-9) -> Equivalence:
    """Check ``u_qudit @ E == e^{i phi} E @ u_qubit`` for the encoding isometry ``E``."""
    rows = encoding_rows(e)
    dim = math.prod(e.qudit_dims)
    if u_qudit.shape != (dim, dim) or u_qubit.shape != (len(rows), len(rows)):
        raise SimulationError(
            f"shapes {u_qubit.shape}, {u_qudit.shape} incompatible with encoding {(dim, len(rows))}"
        )
    # E has a single 1 per column, so both products are row/column selections
    rhs = np.zeros((dim, len(rows)), dtype=complex)
    rhs[rows] = u_qubit
    r = phase_aligned_residual(u_qudit[:, rows], rhs)
    return Equivalence(r < tol, r)


def verify_circuits(qubit_circuit: Circuit, qudit_circuit: Circuit, e: Encoding, tol: float = 1e-9) -> Equivalence:
    """Same check as :func:`verify_equivalence` without forming either full unitary."""
    iso = encoding_isometry(e)
    if qudit_circuit.total_dim != iso.shape[0] or qubit_circuit.total_dim != iso.shape[1]:
        raise SimulationError("circuit dimensions do not match the encoding")
    lhs = circuit_action(qudit_circuit, iso)
    rhs = iso @ circuit_action(qubit_circuit, np.eye(iso.shape[1], dtype=complex))
    r = phase_aligned_residual(lhs, rhs)
    return Equivalence(r < tol, r)


def operator_schmidt_coefficients(u: np.ndarray, cut: tuple[int, int]) -> np.ndarray:
    da, db = cut
    if da * db != u.shape[0] or u.shape[0] != u.shape[1]:
        raise SimulationError(f"cut {cut} does not match matrix of shape {u.shape}")
    # U[(a,b),(a',b')] -> R[(a,a'),(b,b')]
    r = u.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)
    return np.linalg.svd(r, compute_uv=False)


def operator_schmidt_rank(u: np.ndarray, cut: tuple[int, int], tol: float = RANK_TOL) -> int:
    s = operator_schmidt_coefficients(u, cut)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def reduced_density_matrix(psi: StateVector, keep: Sequence[int]) -> np.ndarray:
    keep = sorted(keep)
    n = len(psi.dims)
    if not keep or len(set(keep)) != len(keep) or not all(0 <= k < n for k in keep):
        raise SimulationError(f"invalid subsystem selection {keep}")
    traced = [a for a in range(n) if a not in keep]
    t = psi.amplitudes.reshape(psi.dims).transpose(keep + traced)
    dk = math.prod(psi.dims[k] for k in keep)
    m = t.reshape(dk, -1)
    return m @ m.conj().T


def state_entropy(psi: StateVector, subsystems: Sequence[int]) -> float:
    """Von Neumann entropy in bits of the subsystems listed in ``subsystems``."""
    if len(set(subsystems)) == len(psi.dims):
        return 0.0
    rho = reduced_density_matrix(psi, subsystems)
    ev = np.linalg.eigvalsh(rho)
    ev = ev[ev > EIGEN_CUTOFF]
    return float(-np.sum(ev * np.log2(ev)))
