"""Hardware cost models: OAM beam-splitter counts for photonic qudits, trapped-ion error budgets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

PHOTONIC_SUCCESS = Fraction(1, 4)


class EstimatorError(ValueError):
    pass


def _floor_log2(x: int) -> int:
    return x.bit_length() - 1


def photonic_oam_bs_count(d1: int, d2: int) -> int:
    """Upper bound on OAM beam splitters for a two-qudit controlled phase gate."""
    if d1 < 2 or d2 < 2:
        raise EstimatorError(f"dimensions must be >= 2, got ({d1}, {d2})")
    return 2 * (_floor_log2(d1 - 1) + _floor_log2(d2 - 1)) + 2


def photonic_success_probability(d: int | None = None) -> Fraction:
    """Heralded success probability of one two-qudit gate; the same for every dimension."""
    if d is not None and d < 2:
        raise EstimatorError(f"dimension must be >= 2, got {d}")
    return PHOTONIC_SUCCESS


def photonic_compound_success(n_gates: int) -> Fraction:
    """Success probability of ``n_gates`` independent heralded gates."""
    if n_gates < 0:
        raise EstimatorError("gate count must be non-negative")
    return PHOTONIC_SUCCESS**n_gates


@dataclass(frozen=True)
class PhotonicEstimate:
    d1: int
    d2: int
    oam_bs_upper_bound: int
    success_probability: Fraction

    def to_json(self) -> dict[str, Any]:
        p = self.success_probability
        return {"photonic": {"d1": self.d1, "d2": self.d2, "oam_bs": self.oam_bs_upper_bound,
                             "p_success": [p.numerator, p.denominator]}}


def photonic_estimate(d1: int, d2: int) -> PhotonicEstimate:
    return PhotonicEstimate(d1, d2, photonic_oam_bs_count(d1, d2), photonic_success_probability())


@dataclass(frozen=True)
class IonErrorModel:
    """Per-gate error = base_error * angle_multiple * embed_factor.

    ``embed_factor`` applies to qubit gates embedded in a qudit register; the
    native two-level qudit gate of the ``qudit-1`` scenario runs at factor 1.
    """

    base_error: float = 0.01
    embed_factor: float = 2.0

    def __post_init__(self):
        if self.base_error <= 0 or self.embed_factor <= 0:
            raise EstimatorError("model parameters must be positive")

    def to_json(self) -> dict[str, float]:
        return {"base_error": self.base_error, "embed_factor": self.embed_factor}


@dataclass(frozen=True)
class IonGate:
    angle_multiple: float = 1.0
    embed_factor: float = 1.0


def ion_circuit_error(gates: Sequence[IonGate], model: IonErrorModel | None = None) -> float:
    """1 - prod(1 - eps_i) with independent per-gate errors, clamped to [0, 1]."""
    model = model or IonErrorModel()
    survive = 1.0
    for g in gates:
        if g.angle_multiple <= 0 or g.embed_factor <= 0:
            raise EstimatorError(f"gate parameters must be positive: {g}")
        eps = min(1.0, model.base_error * g.angle_multiple * g.embed_factor)
        survive *= 1.0 - eps
    return min(1.0, max(0.0, 1.0 - survive))


def embedded_gates(n: int, model: IonErrorModel | None = None, angle_multiple: float = 1.0) -> list[IonGate]:
    """``n`` qubit gates embedded in a qudit register, each paying the embedding penalty."""
    model = model or IonErrorModel()
    return [IonGate(angle_multiple, model.embed_factor) for _ in range(n)]


@dataclass(frozen=True)
class IonScenario:
    name: str
    description: str
    gates: tuple[IonGate, ...] | None
    nonlocal_count: int
    notes: tuple[str, ...] = field(default=())

    def error(self, model: IonErrorModel | None = None) -> float | None:
        if self.gates is None:
            return None
        return ion_circuit_error(self.gates, model)

    def to_json(self, model: IonErrorModel | None = None) -> dict[str, Any]:
        model = model or IonErrorModel()
        return {"ion": {
            "scenario": self.name,
            "gates": self.nonlocal_count,
            "error": self.error(model),
            "model": model.to_json(),
            "angle_multiples": None if self.gates is None else [g.angle_multiple for g in self.gates],
            "notes": list(self.notes),
        }}


def ion_scenarios(aux_angle_multiples: Sequence[float] | None = None) -> dict[str, IonScenario]:
    """Four-qubit CPF realizations on trapped ions.

    The five gates of the auxiliary-level qubit circuit need larger rotation
    angles than a CNOT, but no multiples are fixed; pass them explicitly to
    get an error figure for that scenario.
    """
    if aux_angle_multiples is not None and len(aux_angle_multiples) != 5:
        raise EstimatorError("aux-qubit-5 needs exactly five angle multiples")
    aux_gates = None if aux_angle_multiples is None else tuple(IonGate(a) for a in aux_angle_multiples)
    scenarios = [
        IonScenario("qubit-13", "two-level decomposition, 6 CNOT + 7 controlled-T",
                    tuple(IonGate() for _ in range(13)), 13),
        IonScenario("aux-qubit-5", "four qubits using an auxiliary level, 5 MS gates with larger angles",
                    aux_gates, 5,
                    () if aux_gates else ("angle multiples unassigned; error not estimated",)),
        IonScenario("qudit-1", "two 5-level qudits, one two-level entangling gate worth 4 qubit gates",
                    (IonGate(4.0),), 1,
                    ("native two-level qudit gate: no embedding penalty applied",)),
    ]
    return {s.name: s for s in scenarios}
