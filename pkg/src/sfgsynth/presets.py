"""Named two-qubit gate sets for the three-qubit register.

Each set assigns one gate to each interacting pair: (0, 1), (1, 2), (0, 2).
All SFG sets assume a static field of 0.136 meV.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .circuits import GateOp, cp_op, sfg_op
from .numerics import energy_to_frequency
from .sfg_gates import SfgGateSpec, sfg_params

PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (1, 2), (0, 2))

FIELD_MEV = 0.136
FIELD_GHZ = energy_to_frequency(FIELD_MEV)


@dataclass(frozen=True)
class GateLibrary:
    """Two-qubit gates available per qubit pair.

    ``refs`` maps each pair to an SFG reference name, or is empty for ideal CP.
    """

    name: str
    refs: Mapping[tuple[int, int], str] = field(default_factory=dict)
    bindings: Mapping[str, SfgGateSpec] = field(default_factory=dict)

    @property
    def is_ideal_cp(self) -> bool:
        return not self.refs

    def two_qubit_op(self, pair: tuple[int, int], reps: int = 1) -> GateOp:
        pair = tuple(sorted(pair))
        if self.is_ideal_cp:
            return cp_op(*pair, reps=reps)
        return sfg_op(self.refs[pair], *pair, reps=reps)


def _sfg_library(name: str, gates: list[tuple[int, int, str, Optional[float]]]) -> GateLibrary:
    refs, bindings = {}, {}
    for i, (pair, (M, N, branch, J)) in enumerate(zip(PAIRS, gates), start=1):
        ref = f"SFG{i}"
        spec = sfg_params(M, N, branch)
        # Without a quoted J, the field fixes it: J = B / f.
        spec = spec.bind(J if J is not None else FIELD_GHZ / spec.f, FIELD_GHZ)
        refs[pair] = ref
        bindings[ref] = spec
    return GateLibrary(name, refs, bindings)


def ideal_cp() -> GateLibrary:
    return GateLibrary("ideal_cp")


def slow_cp() -> GateLibrary:
    """High-accuracy CP approximations with gate times of 80-160 ns."""
    return _sfg_library("slow_cp", [
        (1595, 2137, "plus", None),
        (1584, 2177, "plus", None),
        (815, 904, "plus", None),
    ])


def fast_cp() -> GateLibrary:
    """CP approximations (AF > 0.99) with gate times under 3 ns."""
    return _sfg_library("fast_cp", [
        (124, 142, "minus", 51.93),
        (137, 156, "minus", 54.37),
        (143, 162, "minus", 56.77),
    ])


def fast_arbitrary() -> GateLibrary:
    """Fastest ideal SFG gates for J = 61.175, 66.175, 71.175 GHz."""
    return _sfg_library("fast_arbitrary", [
        (73, 82, "minus", 61.175),
        (79, 88, "minus", 66.175),
        (85, 94, "minus", 71.175),
    ])


LIBRARIES = {
    "ideal_cp": ideal_cp,
    "slow_cp": slow_cp,
    "fast_cp": fast_cp,
    "fast_arbitrary": fast_arbitrary,
}


def library_from_string(text: str) -> GateLibrary:
    """A preset name, or three ``M,N,branch,J`` groups separated by ``;``
    (assigned to pairs (0,1), (1,2), (0,2) in that order)."""
    text = text.strip()
    if text in LIBRARIES:
        return LIBRARIES[text]()
    groups = [g.strip() for g in text.split(";") if g.strip()]
    if len(groups) != 3:
        raise ValueError(
            f"gate library must be one of {sorted(LIBRARIES)} or three 'M,N,branch,J' groups; got {text!r}")
    gates = []
    for g in groups:
        parts = [p.strip() for p in g.split(",")]
        if len(parts) != 4:
            raise ValueError(f"bad gate group {g!r}; expected 'M,N,branch,J'")
        gates.append((int(parts[0]), int(parts[1]), parts[2], float(parts[3])))
    return _sfg_library("custom", gates)
