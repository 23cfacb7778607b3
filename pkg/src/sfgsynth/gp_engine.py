"""Genetic-programming search for circuits that approximate a target unitary.

One generation: the best ``ceil(ElitProb * PopL)`` circuits are copied
unchanged; ``ceil(CrossProb * PopL)`` children come from crossover of two
SUS-selected parents; the rest are single mutations of one SUS-selected
parent.  Children are cleaned, then scored by average fidelity.

All randomness comes from a single ``numpy.random.Generator`` seeded from the
config and consumed in a fixed order, so a run is reproducible bit for bit.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from . import numerics as nx
from .circuits import Circuit, GateOp, average_fidelity, circuit_unitary, clean, rotation
from .presets import PAIRS, GateLibrary, library_from_string

ANGLE_MODES = ("grid_pi_over_8", "continuous")
MUTATIONS = ("remove", "insert", "exchange", "perturb")
_SINGLE_KINDS = ("RX", "RZ", "PHI")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GpConfig:
    PopL: int = 500
    CrossProb: float = 0.3
    MutProb: float = 0.69
    ElitProb: float = 0.01
    TQmax: int = 3
    max_generations: int = 300
    fitness_threshold: float = 1 - 1e-9
    angle_mode: str = "grid_pi_over_8"
    gate_library: str = "ideal_cp"
    rng_seed: int = 0

    def __post_init__(self):
        total = self.CrossProb + self.MutProb + self.ElitProb
        if abs(total - 1.0) > 1e-12:
            raise ConfigError(f"CrossProb + MutProb + ElitProb must be 1, got {total!r}")
        if min(self.CrossProb, self.MutProb, self.ElitProb) < 0:
            raise ConfigError("breeding fractions must be non-negative")
        if self.PopL < 2:
            raise ConfigError("PopL must be at least 2")
        if not 3 <= self.TQmax <= 20:
            raise ConfigError("TQmax must lie in [3, 20]")
        if self.max_generations < 0:
            raise ConfigError("max_generations must be non-negative")
        if not 0 < self.fitness_threshold <= 1:
            raise ConfigError("fitness_threshold must lie in (0, 1]")
        if self.angle_mode not in ANGLE_MODES:
            raise ConfigError(f"angle_mode must be one of {ANGLE_MODES}")

    @property
    def library(self) -> GateLibrary:
        return library_from_string(self.gate_library)

    def breeding_counts(self) -> tuple[int, int, int]:
        """(elite, crossover, mutation) children per generation."""
        n_elite = min(self.PopL, math.ceil(self.ElitProb * self.PopL - 1e-9))
        n_cross = min(self.PopL - n_elite, math.ceil(self.CrossProb * self.PopL - 1e-9))
        return n_elite, n_cross, self.PopL - n_elite - n_cross


def read_config_values(text: str) -> dict[str, object]:
    """Typed ``key = value`` pairs; keys must be GpConfig field names."""
    types = {f.name: f.type for f in dataclasses.fields(GpConfig)}
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        kind = types[key]
        try:
            values[key] = int(value) if kind == "int" else float(value) if kind == "float" else value
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return values


def make_config(values: dict[str, object]) -> GpConfig:
    try:
        cfg = GpConfig(**values)
        cfg.library  # fail early on a bad gate library
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def parse_config(text: str, **overrides) -> GpConfig:
    values = read_config_values(text)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return make_config(values)


def load_config(path: str | Path, **overrides) -> GpConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), **overrides)


@dataclass(frozen=True)
class Individual:
    circuit: Circuit
    fitness: float


def _draw_angle(mode: str, rng: np.random.Generator) -> float:
    if mode == "grid_pi_over_8":
        return int(rng.integers(-8, 9)) * math.pi / 8
    # uniform on (-pi, pi]
    return math.pi - float(rng.random()) * 2 * math.pi


def _draw_pair(rng: np.random.Generator, exclude: Optional[tuple[int, int]] = None) -> tuple[int, int]:
    choices = [p for p in PAIRS if p != exclude]
    return choices[int(rng.integers(len(choices)))]


def random_gate(cfg: GpConfig, library: GateLibrary, rng: np.random.Generator,
                allow_two_qubit: bool = True) -> GateOp:
    """One gate drawn uniformly from {RX, RZ, PHI, TQ1, TQ2, TQ3}."""
    menu = len(_SINGLE_KINDS) + (len(PAIRS) if allow_two_qubit else 0)
    pick = int(rng.integers(menu))
    if pick < len(_SINGLE_KINDS):
        qubit = int(rng.integers(nx.NUM_QUBITS))
        return rotation(_SINGLE_KINDS[pick], qubit, _draw_angle(cfg.angle_mode, rng))
    return library.two_qubit_op(PAIRS[pick - len(_SINGLE_KINDS)])


def random_circuit(cfg: GpConfig, library: GateLibrary, rng: np.random.Generator) -> Circuit:
    length = int(rng.integers(1, 2 * cfg.TQmax + 1))
    ops: list[GateOp] = []
    n_two = 0
    for _ in range(length):
        op = random_gate(cfg, library, rng, allow_two_qubit=n_two < cfg.TQmax)
        n_two += op.is_two_qubit
        ops.append(op)
    return Circuit(tuple(ops), library.bindings)


def _perturb(op: GateOp, cfg: GpConfig, library: GateLibrary, rng: np.random.Generator) -> GateOp:
    if op.is_two_qubit:
        pair = _draw_pair(rng, exclude=tuple(sorted(op.qubits)))
        return library.two_qubit_op(pair, reps=op.reps)
    if op.angle is None:
        return op
    return dataclasses.replace(op, angle=_draw_angle(cfg.angle_mode, rng))


def mutate_with_kind(circuit: Circuit, cfg: GpConfig, library: GateLibrary,
                     rng: np.random.Generator) -> tuple[Circuit, str]:
    ops = list(circuit.ops)
    kind = "insert" if not ops else MUTATIONS[int(rng.integers(len(MUTATIONS)))]
    n_two = sum(op.is_two_qubit for op in ops)
    if kind == "insert":
        pos = int(rng.integers(len(ops) + 1))
        ops.insert(pos, random_gate(cfg, library, rng, allow_two_qubit=n_two < cfg.TQmax))
    else:
        idx = int(rng.integers(len(ops)))
        if kind == "remove":
            del ops[idx]
        elif kind == "exchange":
            room = n_two - ops[idx].is_two_qubit < cfg.TQmax
            ops[idx] = random_gate(cfg, library, rng, allow_two_qubit=room)
        else:
            ops[idx] = _perturb(ops[idx], cfg, library, rng)
    return circuit.with_ops(ops), kind


def mutate(circuit: Circuit, cfg: GpConfig, library: GateLibrary, rng: np.random.Generator) -> Circuit:
    return mutate_with_kind(circuit, cfg, library, rng)[0]


def crossover_at(a: Circuit, b: Circuit, cut_a: int, cut_b: int, tq_max: int) -> Circuit:
    """Prefix of ``a`` before ``cut_a`` joined to the suffix of ``b`` from
    ``cut_b``; trailing ops are dropped while the two-qubit cap is exceeded."""
    ops = list(a.ops[:cut_a]) + list(b.ops[cut_b:])
    n_two = sum(op.is_two_qubit for op in ops)
    while n_two > tq_max:
        n_two -= ops.pop().is_two_qubit
    return a.with_ops(ops)


def crossover(a: Circuit, b: Circuit, cfg: GpConfig, rng: np.random.Generator) -> Circuit:
    cut_a = int(rng.integers(len(a) + 1))
    cut_b = int(rng.integers(len(b) + 1))
    return crossover_at(a, b, cut_a, cut_b, cfg.TQmax)


def sus_indices(fitness: Sequence[float], count: int, rng: np.random.Generator) -> np.ndarray:
    """Stochastic universal sampling: ``count`` equally spaced pointers with a
    single random offset over the cumulative fitness wheel."""
    w = np.asarray(fitness, dtype=float)
    if np.any(w < 0):
        raise ValueError("SUS needs non-negative fitness")
    if count <= 0:
        return np.zeros(0, dtype=int)
    if w.sum() <= 0:
        w = np.ones_like(w)
    cum = np.cumsum(w)
    step = cum[-1] / count
    pointers = float(rng.random()) * step + step * np.arange(count)
    return np.minimum(np.searchsorted(cum, pointers, side="right"), len(w) - 1)


def select_sus(pop: Sequence[Individual], count: int, rng: np.random.Generator) -> list[Individual]:
    return [pop[i] for i in sus_indices([ind.fitness for ind in pop], count, rng)]


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_length: int
    best_two_qubit_count: int


@dataclass
class EvolutionResult:
    best: Individual
    history: list[GenerationStats] = field(default_factory=list)
    population: list[Individual] = field(default_factory=list)

    @property
    def generations(self) -> int:
        return self.history[-1].generation if self.history else 0


def _rank_key(ind: Individual):
    return (-ind.fitness, len(ind.circuit), ind.circuit.two_qubit_count)


class _Scorer:
    def __init__(self, target: np.ndarray):
        target = np.asarray(target, dtype=complex)
        if target.shape != (nx.DIM, nx.DIM) or not nx.is_unitary(target, atol=1e-9):
            raise ValueError("target must be an 8x8 unitary")
        self._target = target

    def __call__(self, circuit: Circuit) -> Individual:
        return Individual(circuit, average_fidelity(self._target, circuit_unitary(circuit)))


def _stats(gen: int, pop: list[Individual]) -> GenerationStats:
    best = pop[0]
    return GenerationStats(gen, best.fitness, float(np.mean([i.fitness for i in pop])),
                           len(best.circuit), best.circuit.two_qubit_count)


def evolve(
    cfg: GpConfig,
    target: np.ndarray,
    library: Optional[GateLibrary] = None,
    on_generation: Optional[Callable[[GenerationStats], None]] = None,
) -> EvolutionResult:
    library = library or cfg.library
    score = _Scorer(target)
    rng = np.random.default_rng(cfg.rng_seed)
    n_elite, n_cross, n_mut = cfg.breeding_counts()

    pop = sorted((score(clean(random_circuit(cfg, library, rng))) for _ in range(cfg.PopL)), key=_rank_key)
    history = [_stats(0, pop)]
    if on_generation:
        on_generation(history[-1])

    gen = 0
    while pop[0].fitness < cfg.fitness_threshold and gen < cfg.max_generations:
        gen += 1
        parents = select_sus(pop, 2 * n_cross + n_mut, rng)
        parents = [parents[i] for i in rng.permutation(len(parents))]
        children = []
        for k in range(n_cross):
            children.append(crossover(parents[2 * k].circuit, parents[2 * k + 1].circuit, cfg, rng))
        for k in range(n_mut):
            children.append(mutate(parents[2 * n_cross + k].circuit, cfg, library, rng))
        pop = sorted(pop[:n_elite] + [score(clean(c)) for c in children], key=_rank_key)
        history.append(_stats(gen, pop))
        if on_generation:
            on_generation(history[-1])
    return EvolutionResult(pop[0], history, pop)


HISTORY_HEADER = ("generation", "best_fitness", "mean_fitness", "best_length", "best_two_qubit_count")


def write_history_csv(history: Sequence[GenerationStats], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(HISTORY_HEADER)
    for h in history:
        w.writerow([h.generation, f"{h.best_fitness:.9g}", f"{h.mean_fitness:.9g}",
                    h.best_length, h.best_two_qubit_count])


def history_csv_text(history: Sequence[GenerationStats]) -> str:
    buf = io.StringIO()
    write_history_csv(history, buf)
    return buf.getvalue()
