"""Entanglement geometry of SFG gates.

Nonlocal coordinates (c1, c2, c3) follow the convention in which the CP/CNOT
class sits at (pi/2, 0, 0) and the canonical chamber is
``c1 >= c2 >= c3 >= 0, c1 + c2 <= pi``, with ``c1 <= pi/2`` on the
``c3 = 0`` face.
"""
from __future__ import annotations

import cmath
import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence, TextIO

import numpy as np
from scipy.optimize import minimize

from .numerics import is_unitary
from .sfg_gates import BRANCHES, SfgGateSpec, is_valid_pair, sfg_params, sfg_unitary

PI = math.pi
# Width of the concurrence band that separates perfect entanglers from the rest.
PE_BAND = 1e-3
_EDGE_EPS = 1e-12


class WeylPoint(NamedTuple):
    c1: float
    c2: float
    c3: float

    def is_canonical(self, atol: float = 1e-12) -> bool:
        c1, c2, c3 = self
        return (
            c1 + atol >= c2 >= c3 - atol
            and c3 >= -atol
            and c1 < PI + atol
            and c1 + c2 <= PI + atol
        )


class MakhlinInvariants(NamedTuple):
    G1: complex
    G2: float


def weyl_raw(spec: SfgGateSpec) -> tuple[float, float, float]:
    """Closed-form coordinates of an SFG gate, before any reduction."""
    c1 = PI + (spec.M + spec.N) * PI / 2 - spec.JT
    c2 = spec.M * PI / 2 - spec.JT * (1.0 - spec.f) / 2
    return (c1, c2, c2)


def _mod_pi(x: float) -> float:
    r = math.fmod(x, PI)
    if r < 0:
        r += PI
    # fmod of a tiny negative can round back up to pi
    return 0.0 if r >= PI else r


def canonicalize(raw: Sequence[float]) -> WeylPoint:
    c = sorted((_mod_pi(x) for x in raw), reverse=True)
    if c[0] + c[1] > PI:
        c = sorted((PI - c[1], PI - c[0], c[2]), reverse=True)
    if c[2] < _EDGE_EPS and c[0] > PI / 2:
        c = sorted((PI - c[0], c[1], c[2]), reverse=True)
    return WeylPoint(*c)


def weyl_point(spec: SfgGateSpec) -> WeylPoint:
    return canonicalize(weyl_raw(spec))


def makhlin_from_c(c: Sequence[float]) -> MakhlinInvariants:
    c1, c2, c3 = c
    cc = math.cos(c1) ** 2 * math.cos(c2) ** 2 * math.cos(c3) ** 2
    ss = math.sin(c1) ** 2 * math.sin(c2) ** 2 * math.sin(c3) ** 2
    g1 = complex(cc - ss, 0.25 * math.sin(2 * c1) * math.sin(2 * c2) * math.sin(2 * c3))
    g2 = 4 * cc - 4 * ss - math.cos(2 * c1) * math.cos(2 * c2) * math.cos(2 * c3)
    return MakhlinInvariants(g1, g2)


def makhlin_sfg(spec: SfgGateSpec) -> MakhlinInvariants:
    """Closed-form Makhlin invariants of an SFG gate.

    G1 uses exp(-i*JT) as the first term (a unit-modulus phase); G2 carries no
    outer square, which is what makes it agree with cos 2c1 + cos 2c2 + cos 2c3.
    """
    sign_mn = (-1.0) ** (spec.M + spec.N)
    sign_n = (-1.0) ** spec.N
    mix = math.cos((1.0 - spec.f) * spec.JT)
    inner = np.exp(-1j * spec.JT) + sign_n * np.exp(1j * spec.JT) * mix
    g1 = complex(sign_mn * inner**2 / 4)
    g2 = sign_mn * (math.cos(2 * spec.JT) + 2 * sign_n * mix)
    return MakhlinInvariants(g1, g2)


def in_pe_region(c: Sequence[float], atol: float = _EDGE_EPS) -> bool:
    """Zhang's perfect-entangler polyhedron, tested over all index permutations."""
    for i, j, k in itertools.permutations(range(3)):
        lo, hi = c[i] + c[k], c[i] + c[j] + PI / 2
        for floor, ceil in ((PI / 2, PI), (3 * PI / 2, 2 * PI)):
            if floor - atol <= lo <= hi + atol and hi <= ceil + atol:
                return True
    return False


def _origin_in_hull(angles: np.ndarray) -> bool:
    # Unit-circle points enclose the origin iff no angular gap exceeds pi.
    a = np.sort(np.mod(angles, 2 * PI))
    gaps = np.diff(np.concatenate([a, [a[0] + 2 * PI]]))
    return float(gaps.max()) <= PI + _EDGE_EPS


def max_concurrence(c: Sequence[float]) -> float:
    """Largest concurrence the gate with coordinates ``c`` can create from a
    product state.

    Uses the eigenphases of the nonlocal part in the magic basis: the gate is a
    perfect entangler when the doubled phases enclose the origin; otherwise the
    maximum is the largest |sin| of a phase difference.
    """
    c1, c2, c3 = c
    lam = np.array([c1 - c2 + c3, -c1 + c2 + c3, c1 + c2 - c3, -c1 - c2 - c3]) / 2
    if _origin_in_hull(2 * lam):
        return 1.0
    diffs = lam[:, None] - lam[None, :]
    return float(np.max(np.abs(np.sin(diffs))))


def is_perfect_entangler(c: Sequence[float], band: float = PE_BAND) -> bool:
    """True inside the polyhedron, or close enough that the best reachable
    concurrence is within ``band`` of 1 (the numeric oracle's resolution)."""
    if in_pe_region(c):
        return True
    return band > 0 and max_concurrence(c) >= 1.0 - band


def _product_states(angles: np.ndarray) -> np.ndarray:
    t1, p1, t2, p2 = angles
    a = np.stack([np.cos(t1 / 2), np.exp(1j * p1) * np.sin(t1 / 2)], axis=-1)
    b = np.stack([np.cos(t2 / 2), np.exp(1j * p2) * np.sin(t2 / 2)], axis=-1)
    return (a[..., :, None] * b[..., None, :]).reshape(*a.shape[:-1], 4)


@lru_cache(maxsize=4)
def _grid_states(steps: int) -> tuple[np.ndarray, np.ndarray]:
    theta = np.linspace(0.0, PI, steps)
    phase = np.linspace(0.0, 2 * PI, steps, endpoint=False)
    grid = np.stack(np.meshgrid(theta, phase, theta, phase, indexing="ij")).reshape(4, -1)
    states = _product_states(grid)
    states.setflags(write=False)
    return grid, states


def _scalar_concurrence(rows: list[list[complex]], x: Sequence[float]) -> float:
    # plain-float version for the optimiser; numpy overhead dominates at this size
    t1, p1, t2, p2 = x
    c1, s1 = math.cos(t1 / 2), cmath.exp(1j * p1) * math.sin(t1 / 2)
    c2, s2 = math.cos(t2 / 2), cmath.exp(1j * p2) * math.sin(t2 / 2)
    v = (c1 * c2, c1 * s2, s1 * c2, s1 * s2)
    o = [r[0] * v[0] + r[1] * v[1] + r[2] * v[2] + r[3] * v[3] for r in rows]
    return 2 * abs(o[0] * o[3] - o[1] * o[2])


def pe_oracle(u4: np.ndarray, steps: int = 16, restarts: int = 4) -> float:
    """Numerically maximise the output concurrence over product inputs.

    A coarse grid over the two Bloch spheres seeds a few Nelder-Mead polishes.
    """
    u4 = np.asarray(u4, dtype=complex)
    if u4.shape != (4, 4) or not is_unitary(u4, atol=1e-9):
        raise ValueError("pe_oracle needs a 4x4 unitary")
    grid, states = _grid_states(steps)
    psi = states @ u4.T
    values = 2 * np.abs(psi[:, 0] * psi[:, 3] - psi[:, 1] * psi[:, 2])
    best = float(values.max())
    if best >= 1.0 - 1e-12:
        return 1.0
    rows = u4.tolist()
    for idx in np.argsort(values)[-restarts:]:
        res = minimize(
            lambda x: -_scalar_concurrence(rows, x),
            grid[:, idx],
            method="Nelder-Mead",
            options={"xatol": 1e-7, "fatol": 1e-10, "maxiter": 2000},
        )
        best = max(best, float(-res.fun))
        if best >= 1.0 - 1e-12:
            break
    return min(best, 1.0)


class SweepRow(NamedTuple):
    M: int
    N: int
    branch: str
    f: float
    JT: float
    c1: float
    c2: float
    c3: float
    G1_re: float
    G1_im: float
    G2: float
    perfect_entangler: bool


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    skipped: int = 0

    @property
    def gate_count(self) -> int:
        return len(self.rows)

    @property
    def pe_count(self) -> int:
        return sum(r.perfect_entangler for r in self.rows)

    @property
    def pe_fraction(self) -> float:
        return self.pe_count / self.gate_count if self.rows else 0.0


def sweep_chamber(M_max: int, N_max: int, band: float = PE_BAND) -> SweepResult:
    """All valid SFG gates with 1 <= M <= M_max, 1 <= N <= N_max, both branches.

    Rows come out in (M, N, branch) lexicographic order. Pairs without a real
    f are skipped and counted; M == N is not counted.
    """
    if M_max < 1 or N_max < 1:
        raise ValueError("sweep bounds must be >= 1")
    out = SweepResult()
    for M in range(1, M_max + 1):
        for N in range(1, N_max + 1):
            if M == N:
                continue
            if not is_valid_pair(M, N):
                out.skipped += 1
                continue
            for branch in sorted(BRANCHES):
                spec = sfg_params(M, N, branch)
                c = weyl_point(spec)
                g = makhlin_sfg(spec)
                out.rows.append(SweepRow(
                    M, N, branch, spec.f, spec.JT, *c,
                    g.G1.real, g.G1.imag, g.G2, is_perfect_entangler(c, band),
                ))
    return out


SWEEP_HEADER = ("M", "N", "branch", "f", "JT", "c1", "c2", "c3",
                "G1_re", "G1_im", "G2", "perfect_entangler")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_sweep_csv(rows: Iterable[SweepRow], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([r.M, r.N, r.branch, *(_fmt(v) for v in r[3:11]), int(r.perfect_entangler)])


def sweep_csv_text(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()
