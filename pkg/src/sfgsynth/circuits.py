"""Gate sequences on the three-qubit register.

A :class:`Circuit` is an ordered list of :class:`GateOp`; the first op acts
first on the state.  Written operator products (``A B C``) apply their
rightmost factor first, so they map onto the list reversed.

Text format, one op per line, ``#`` starts a comment::

    GATE g1 M=124 N=142 BRANCH=minus J=51.93
    RZ 2 0.183
    SFG g1 0 1 x3
    CP 0 2
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import numerics as nx
from .sfg_gates import SfgError, SfgGateSpec, cp, hadamard, phi, rx, rz, sfg_params, sfg_unitary

ROTATIONS = ("RX", "RZ", "PHI")
SINGLE_QUBIT_KINDS = ROTATIONS + ("H",)
TWO_QUBIT_KINDS = ("CP", "SFG")
KINDS = SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS

_ZERO_ANGLE = 1e-12


class CircuitError(ValueError):
    pass


class UnresolvedGateRef(CircuitError):
    pass


class MissingBinding(CircuitError):
    pass


class CircuitSyntaxError(CircuitError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...]
    angle: Optional[float] = None
    gate_ref: Optional[str] = None
    reps: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        for q in self.qubits:
            if not 0 <= q < nx.NUM_QUBITS:
                raise CircuitError(f"qubit index {q} out of range")
        if self.kind in SINGLE_QUBIT_KINDS:
            if len(self.qubits) != 1 or self.reps != 1:
                raise CircuitError(f"{self.kind} takes exactly one qubit and no repetitions")
            if self.kind in ROTATIONS and self.angle is None:
                raise CircuitError(f"{self.kind} needs an angle")
        else:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise CircuitError(f"{self.kind} needs two distinct qubits")
            if self.reps < 1:
                raise CircuitError("repetition count must be positive")
            if self.kind == "SFG" and not self.gate_ref:
                raise CircuitError("SFG op needs a gate reference")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS


def rotation(kind: str, qubit: int, angle: float) -> GateOp:
    return GateOp(kind, (qubit,), angle=float(angle))


def cp_op(qa: int, qb: int, reps: int = 1) -> GateOp:
    return GateOp("CP", (qa, qb), reps=reps)


def sfg_op(ref: str, qa: int, qb: int, reps: int = 1) -> GateOp:
    return GateOp("SFG", (qa, qb), gate_ref=ref, reps=reps)


@dataclass(frozen=True)
class Circuit:
    ops: tuple[GateOp, ...] = ()
    bindings: Mapping[str, SfgGateSpec] = field(default_factory=dict, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def two_qubit_count(self) -> int:
        return sum(op.is_two_qubit for op in self.ops)

    def with_ops(self, ops: Iterable[GateOp]) -> "Circuit":
        return Circuit(tuple(ops), self.bindings)

    def __add__(self, other: "Circuit") -> "Circuit":
        merged = dict(self.bindings)
        merged.update(other.bindings)
        return Circuit(self.ops + other.ops, merged)


@lru_cache(maxsize=1 << 16)
def _op_matrix(op: GateOp, spec: Optional[SfgGateSpec]) -> np.ndarray:
    if op.kind == "SFG":
        m = nx.embed_pair(nx.mat_power(sfg_unitary(spec), op.reps), *op.qubits)
    elif op.kind == "CP":
        m = nx.embed_pair(nx.mat_power(cp(), op.reps), *op.qubits)
    else:
        q = op.qubits[0]
        if op.kind == "RX":
            m = nx.embed_single(rx(op.angle), q)
        elif op.kind == "RZ":
            m = nx.embed_single(rz(op.angle), q)
        elif op.kind == "PHI":
            m = nx.embed_single(phi(op.angle), q)
        else:
            m = nx.embed_single(hadamard(), q)
    m.setflags(write=False)
    return m


def _resolve(op: GateOp, bindings: Mapping[str, SfgGateSpec]) -> Optional[SfgGateSpec]:
    if op.kind != "SFG":
        return None
    try:
        # Physical binding does not change the unitary; share the cache entry.
        return bindings[op.gate_ref].unbound()
    except KeyError:
        raise UnresolvedGateRef(f"gate reference {op.gate_ref!r} is not bound") from None


def op_unitary(op: GateOp, bindings: Mapping[str, SfgGateSpec] = {}) -> np.ndarray:
    return _op_matrix(op, _resolve(op, bindings))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    u = np.eye(nx.DIM, dtype=complex)
    for op in circuit.ops:
        u = _op_matrix(op, _resolve(op, circuit.bindings)) @ u
    return u


def wrap_angle(theta: float) -> float:
    """Map to (-pi, pi]."""
    w = math.remainder(theta, 2 * math.pi)
    return math.pi if w <= -math.pi else w


def clean(circuit: Circuit) -> Circuit:
    """Condense adjacent repetitions.

    Same-kind rotations on the same qubit are summed and wrapped; zero
    rotations vanish.  Adjacent identical SFG ops become one op with summed
    reps, and adjacent identical CP pairs cancel.  The unitary is preserved up
    to a global phase.
    """
    out: list[GateOp] = []
    for op in circuit.ops:
        if op.kind in ROTATIONS:
            angle = wrap_angle(op.angle)
            prev = out[-1] if out else None
            if prev is not None and prev.kind == op.kind and prev.qubits == op.qubits:
                out.pop()
                angle = wrap_angle(prev.angle + angle)
            if abs(angle) > _ZERO_ANGLE:
                out.append(replace(op, angle=angle))
            continue
        prev = out[-1] if out else None
        if (
            prev is not None
            and prev.kind == op.kind
            and op.is_two_qubit
            and prev.gate_ref == op.gate_ref
            and set(prev.qubits) == set(op.qubits)
        ):
            out.pop()
            reps = prev.reps + op.reps
            if op.kind == "CP":
                # CP squares to the identity
                if reps % 2:
                    out.append(replace(prev, reps=1))
            else:
                out.append(replace(prev, reps=reps))
            continue
        out.append(op)
    return circuit.with_ops(out)


def two_qubit_time(circuit: Circuit) -> float:
    """Total time (ns) spent in two-qubit interactions: sum of reps * T_i."""
    total = 0.0
    for op in circuit.ops:
        if op.kind != "SFG":
            continue
        spec = circuit.bindings.get(op.gate_ref)
        if spec is None:
            raise UnresolvedGateRef(f"gate reference {op.gate_ref!r} is not bound")
        if spec.T is None:
            raise MissingBinding(f"gate {op.gate_ref!r} has no physical J bound")
        total += op.reps * spec.T
    return total


def average_fidelity(u_comp: np.ndarray, u_circ: np.ndarray) -> float:
    """|Tr(U_comp^dagger U_circ)| / d -- insensitive to global phase."""
    u_comp = np.asarray(u_comp)
    u_circ = np.asarray(u_circ)
    if u_comp.shape != u_circ.shape:
        raise ValueError(f"dimension mismatch: {u_comp.shape} vs {u_circ.shape}")
    return float(abs(np.vdot(u_comp, u_circ)) / u_comp.shape[0])


def squared_overlap(u_comp: np.ndarray, u_circ: np.ndarray) -> float:
    """|Tr(U_comp^dagger U_circ) / d|^2, the square of :func:`average_fidelity`."""
    return average_fidelity(u_comp, u_circ) ** 2


def state_fidelity(ideal: np.ndarray, actual: np.ndarray) -> float:
    return float(abs(np.vdot(ideal, actual)) ** 2)


# --- text format ---------------------------------------------------------


def _parse_qubit(tok: str, lineno: int) -> int:
    try:
        q = int(tok)
    except ValueError:
        raise CircuitSyntaxError(lineno, f"bad qubit index {tok!r}") from None
    if not 0 <= q < nx.NUM_QUBITS:
        raise CircuitSyntaxError(lineno, f"qubit index {q} out of range")
    return q


def _parse_angle(tok: str, lineno: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise CircuitSyntaxError(lineno, f"bad angle {tok!r}") from None
    if not math.isfinite(val):
        raise CircuitSyntaxError(lineno, f"angle must be finite, got {tok!r}")
    return val


def _parse_reps(tokens: Sequence[str], lineno: int) -> int:
    if not tokens:
        return 1
    if len(tokens) > 1 or not tokens[0].startswith("x"):
        raise CircuitSyntaxError(lineno, f"expected 'x<reps>', got {' '.join(tokens)!r}")
    try:
        reps = int(tokens[0][1:])
    except ValueError:
        raise CircuitSyntaxError(lineno, f"bad repetition count {tokens[0]!r}") from None
    if reps < 1:
        raise CircuitSyntaxError(lineno, "repetition count must be positive")
    return reps


def _parse_gate_header(tokens: Sequence[str], lineno: int) -> tuple[str, SfgGateSpec]:
    if len(tokens) < 2:
        raise CircuitSyntaxError(lineno, "GATE needs a reference name")
    ref = tokens[1]
    fields: dict[str, str] = {}
    for tok in tokens[2:]:
        key, sep, value = tok.partition("=")
        if not sep or key not in ("M", "N", "BRANCH", "J", "B"):
            raise CircuitSyntaxError(lineno, f"bad GATE field {tok!r}")
        fields[key] = value
    for key in ("M", "N", "BRANCH"):
        if key not in fields:
            raise CircuitSyntaxError(lineno, f"GATE {ref} is missing {key}=")
    try:
        spec = sfg_params(int(fields["M"]), int(fields["N"]), fields["BRANCH"])
        if "J" in fields:
            B = float(fields["B"]) if "B" in fields else None
            spec = spec.bind(float(fields["J"]), B)
    except (SfgError, ValueError) as exc:
        raise CircuitSyntaxError(lineno, f"GATE {ref}: {exc}") from None
    return ref, spec


def parse_circuit(text: str) -> Circuit:
    ops: list[GateOp] = []
    bindings: dict[str, SfgGateSpec] = {}
    refs_used: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0].upper()
        args = tokens[1:]
        if kind == "GATE":
            ref, spec = _parse_gate_header(tokens, lineno)
            if ref in bindings:
                raise CircuitSyntaxError(lineno, f"gate {ref!r} defined twice")
            bindings[ref] = spec
        elif kind in ROTATIONS:
            if len(args) != 2:
                raise CircuitSyntaxError(lineno, f"{kind} expects '<qubit> <angle>'")
            ops.append(rotation(kind, _parse_qubit(args[0], lineno), _parse_angle(args[1], lineno)))
        elif kind == "H":
            if len(args) != 1:
                raise CircuitSyntaxError(lineno, "H expects '<qubit>'")
            ops.append(GateOp("H", (_parse_qubit(args[0], lineno),)))
        elif kind == "CP":
            if len(args) < 2:
                raise CircuitSyntaxError(lineno, "CP expects '<qa> <qb>'")
            qa, qb = _parse_qubit(args[0], lineno), _parse_qubit(args[1], lineno)
            if qa == qb:
                raise CircuitSyntaxError(lineno, "CP needs two distinct qubits")
            ops.append(cp_op(qa, qb, _parse_reps(args[2:], lineno)))
        elif kind == "SFG":
            if len(args) < 3:
                raise CircuitSyntaxError(lineno, "SFG expects '<ref> <qa> <qb> [x<reps>]'")
            qa, qb = _parse_qubit(args[1], lineno), _parse_qubit(args[2], lineno)
            if qa == qb:
                raise CircuitSyntaxError(lineno, "SFG needs two distinct qubits")
            ops.append(sfg_op(args[0], qa, qb, _parse_reps(args[3:], lineno)))
            refs_used.append((args[0], lineno))
        else:
            raise CircuitSyntaxError(lineno, f"unknown gate kind {tokens[0]!r}")
    for ref, lineno in refs_used:
        if ref not in bindings:
            raise CircuitSyntaxError(lineno, f"SFG reference {ref!r} has no GATE header")
    return Circuit(tuple(ops), bindings)


def _serialize_op(op: GateOp) -> str:
    if op.kind in ROTATIONS:
        return f"{op.kind} {op.qubits[0]} {op.angle!r}"
    if op.kind == "H":
        return f"H {op.qubits[0]}"
    suffix = f" x{op.reps}" if op.reps != 1 else ""
    if op.kind == "CP":
        return f"CP {op.qubits[0]} {op.qubits[1]}{suffix}"
    return f"SFG {op.gate_ref} {op.qubits[0]} {op.qubits[1]}{suffix}"


def serialize(circuit: Circuit) -> str:
    lines = []
    for ref, spec in circuit.bindings.items():
        head = f"GATE {ref} M={spec.M} N={spec.N} BRANCH={spec.branch}"
        if spec.J is not None:
            head += f" J={spec.J!r}"
            if spec.B is not None and spec.B != spec.f * spec.J:
                head += f" B={spec.B!r}"
        lines.append(head)
    lines.extend(_serialize_op(op) for op in circuit.ops)
    return "\n".join(lines) + "\n"


def load_circuit(path: str | Path) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def save_circuit(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(serialize(circuit), encoding="utf-8")


def reference_circuit(name: str) -> Circuit:
    """Load a circuit shipped in the package data directory, e.g. ``"u17_fast_cp"``."""
    text = resources.files("sfgsynth").joinpath(f"data/{name}.circ").read_text(encoding="utf-8")
    return parse_circuit(text)
