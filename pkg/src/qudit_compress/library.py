"""Reference unitaries and benchmark circuits: CPF gates, cluster states, qudit controlled gates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, circuit_stats, is_unitary
from .simulator import circuit_unitary, phase_aligned_residual

MAX_CPF_QUBITS = 12
MAX_CLUSTER_SITES = 12
RECIPE_TOL = 1e-9

# Best known two-qubit-gate counts for CPF(N); only N=4 is rebuilt here.
BEST_KNOWN_CPF_COUNTS = {4: 13, 6: 61}


class LibraryError(ValueError):
    pass


def cpf_unitary(n: int) -> np.ndarray:
    """N-qubit controlled phase flip: identity except -1 on |1...1>."""
    if not 2 <= n <= MAX_CPF_QUBITS:
        raise LibraryError(f"cpf_unitary supports 2 <= N <= {MAX_CPF_QUBITS}, got {n}")
    diag = np.ones(2**n, dtype=complex)
    diag[-1] = -1
    return np.diag(diag)


def controlled_on_level_gate(d_c: int, level: int, v: np.ndarray) -> np.ndarray:
    """Apply ``v`` to the target iff the control qudit (dimension ``d_c``) is in ``|level>``."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise LibraryError(f"target operator must be square, got shape {v.shape}")
    if not 0 <= level < d_c:
        raise LibraryError(f"level {level} out of range for control dimension {d_c}")
    if not is_unitary(v):
        raise LibraryError("target operator is not unitary")
    proj = np.zeros((d_c, d_c))
    proj[level, level] = 1
    return np.kron(np.eye(d_c) - proj, np.eye(v.shape[0])) + np.kron(proj, v)


def cyclic_shift(d: int, s: int) -> np.ndarray:
    """Permutation |(n + s) mod d><n|."""
    if d < 2:
        raise LibraryError(f"dimension must be >= 2, got {d}")
    out = np.zeros((d, d), dtype=complex)
    n = np.arange(d)
    out[(n + s) % d, n] = 1
    return out


@dataclass(frozen=True)
class DecompositionRecipe:
    name: str
    target: str
    circuit: Circuit
    claimed_nonlocal_count: int

    def target_unitary(self) -> np.ndarray:
        kind, _, n = self.target.partition(":")
        if kind != "cpf":
            raise LibraryError(f"unknown target {self.target!r}")
        return cpf_unitary(int(n))

    def residual(self) -> float:
        return phase_aligned_residual(circuit_unitary(self.circuit), self.target_unitary())

    def verify(self, tol: float = RECIPE_TOL) -> None:
        count = circuit_stats(self.circuit).n_nonlocal
        if count != self.claimed_nonlocal_count:
            raise LibraryError(f"{self.name}: {count} non-local gates, claimed {self.claimed_nonlocal_count}")
        r = self.residual()
        if not r < tol:
            raise LibraryError(f"{self.name}: residual {r:.3e} against {self.target}")


def _cpf4_gates() -> list[Gate]:
    # Gray-code ladder over the controls 0,1,2 with the target on 3:
    # CT^(±1) between the parity-carrying control and the target, CNOTs
    # updating the parity.  T^4 = Z closes the phase on |1111>.
    t = 3
    seq = [
        ("CT", 0, t),
        ("CNOT", 0, 1), ("CTdag", 1, t), ("CNOT", 0, 1), ("CT", 1, t),
        ("CNOT", 1, 2), ("CTdag", 2, t), ("CNOT", 0, 2), ("CT", 2, t),
        ("CNOT", 1, 2), ("CTdag", 2, t), ("CNOT", 0, 2), ("CT", 2, t),
    ]
    return [Gate(kind, (a, b)) for kind, a, b in seq]


def cpf4_barenco_circuit() -> DecompositionRecipe:
    """Four-qubit CPF from 6 CNOTs and 7 controlled-T / controlled-T^dagger gates."""
    c = Circuit.qubits(4, _cpf4_gates(), {"name": "cpf4-barenco", "target": "cpf:4"})
    recipe = DecompositionRecipe("cpf4-barenco", "cpf:4", c, BEST_KNOWN_CPF_COUNTS[4])
    recipe.verify()
    return recipe


def cz_circuit() -> DecompositionRecipe:
    c = Circuit.qubits(2, [Gate("CZ", (0, 1))], {"name": "cpf2", "target": "cpf:2"})
    recipe = DecompositionRecipe("cpf2", "cpf:2", c, 1)
    recipe.verify()
    return recipe


def cluster_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    """Open-boundary grid edges: horizontal row-major, then vertical row-major."""
    horizontal = [(r * cols + j, r * cols + j + 1) for r in range(rows) for j in range(cols - 1)]
    vertical = [(r * cols + j, (r + 1) * cols + j) for r in range(rows - 1) for j in range(cols)]
    return horizontal + vertical


def graph_state_circuit(n: int, edges: list[tuple[int, int]], name: str = "graph-state") -> Circuit:
    gates = [Gate("H", (q,)) for q in range(n)] + [Gate("CZ", e) for e in edges]
    return Circuit.qubits(n, gates, {"name": name})


def cluster_state_circuit(rows: int, cols: int) -> Circuit:
    if rows < 1 or cols < 1 or rows * cols > MAX_CLUSTER_SITES:
        raise LibraryError(f"cluster size {rows}x{cols} outside 1..{MAX_CLUSTER_SITES} sites")
    return graph_state_circuit(rows * cols, cluster_edges(rows, cols), f"cluster-{rows}x{cols}")
