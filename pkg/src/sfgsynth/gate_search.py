"""Searches for SFG gates realisable at a given field and exchange strength.

``fastest_gates`` walks continued-fraction convergents of the M/N ratio that
a given f = B/J demands; ``cp_approx_search`` scans an (M, N) grid for short
gates close to CP.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, TextIO

import numpy as np

from .circuits import average_fidelity
from .sfg_gates import BRANCHES, SfgGateSpec, cp, is_valid_pair, match_branch, sfg_params, sfg_unitary
from .weyl import WeylPoint, weyl_point


class NoCandidate(LookupError):
    pass


class Convergent(NamedTuple):
    p: int
    q: int

    @property
    def value(self) -> float:
        return self.p / self.q


@dataclass(frozen=True)
class GateCandidate:
    spec: SfgGateSpec
    delta_f_rel: float
    weyl: WeylPoint
    af_vs_cp: float


def target_ratio(f: float) -> float:
    """M/N required by f, from equating the two JT expressions."""
    return math.sqrt((f - 1.0) ** 2 + 8.0) / math.sqrt((f + 1.0) ** 2 + 8.0)


def continued_fraction(x: float, max_terms: int = 32, eps: float = 1e-12) -> list[int]:
    if x <= 0:
        raise ValueError("continued fraction expansion needs x > 0")
    coeffs = []
    for _ in range(max_terms):
        a = math.floor(x)
        coeffs.append(a)
        frac = x - a
        if frac < eps:
            break
        x = 1.0 / frac
    return coeffs


def convergents(coeffs: Sequence[int]) -> list[Convergent]:
    out = []
    p_prev, p = 1, coeffs[0] if coeffs else 0
    q_prev, q = 0, 1
    if coeffs:
        out.append(Convergent(p, q))
    for a in coeffs[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append(Convergent(p, q))
    return out


def af_vs_cp(spec: SfgGateSpec) -> float:
    return average_fidelity(cp(), sfg_unitary(spec))


def _candidate(spec: SfgGateSpec, delta: float) -> GateCandidate:
    return GateCandidate(spec, delta, weyl_point(spec), af_vs_cp(spec))


def fastest_gates(
    J: float,
    B: float,
    f_tol: float = 1e-3,
    count: int = 1,
    max_terms: int = 32,
) -> list[GateCandidate]:
    """Shortest ideal SFG gates for exchange ``J`` and field ``B`` (both GHz).

    Convergents p/q of the required M/N are tried in order of increasing q.
    Each keeps the f that (M, N) defines exactly; the relative mismatch to B/J
    must be within ``f_tol``.
    """
    if J <= 0 or B <= 0:
        raise ValueError("J and B must be positive")
    found = []
    for conv in convergents(continued_fraction(target_ratio(B / J), max_terms)):
        M, N = conv.p, conv.q
        if not is_valid_pair(M, N):
            continue
        spec, delta = match_branch(M, N, J, B)
        if delta <= f_tol:
            found.append(_candidate(spec, delta))
            if len(found) == count:
                break
    if not found:
        raise NoCandidate(f"no convergent within f_tol={f_tol:g} for J={J:g} GHz, B={B:g} GHz")
    return found


def best_cp_branch(M: int, N: int) -> tuple[SfgGateSpec, float]:
    """Branch whose unitary is closest to CP, with that AF."""
    scored = [(af_vs_cp(s), s) for s in (sfg_params(M, N, b) for b in BRANCHES)]
    af, spec = max(scored, key=lambda t: t[0])
    return spec, af


def cp_approx_search(
    B: float,
    T_max: float,
    af_min: float,
    M_max: int = 500,
    N_max: int = 500,
) -> list[GateCandidate]:
    """Gates with T <= T_max (ns) and AF vs CP >= af_min, where each gate's J
    is whatever makes f(M, N) = B/J.  Sorted by T."""
    if B <= 0:
        raise ValueError("field B must be positive")
    M, N = np.meshgrid(np.arange(1, M_max + 1), np.arange(1, N_max + 1), indexing="ij")
    lo, hi = np.minimum(M, N), np.maximum(M, N)
    # J = B/f must be positive; f > 0 only for M < N.
    valid = (M < N) & (2 * lo * lo >= hi * hi)
    M, N = M[valid].astype(float), N[valid].astype(float)
    A = -(M * M + N * N) / (M * M - N * N)
    root = np.sqrt(np.maximum(A * A - 9.0, 0.0))
    hits = []
    for branch, f in (("plus", A + root), ("minus", A - root)):
        JT = M * np.pi / np.sqrt((f - 1.0) ** 2 + 8.0)
        T = JT * f / B
        a = (-1.0) ** M
        b = np.exp(-1j * (1.0 - f) * JT)
        d00 = np.exp(-1j * ((3.0 - f) * JT + 2.0 * f * JT))
        d11 = (-1.0) ** N * np.exp(2j * f * JT)
        af = np.abs(d00 + (a + b) - d11) / 4.0
        # coarse screen; every survivor is re-checked through the scalar path
        keep = (T <= T_max * (1 + 1e-12)) & (af >= af_min - 1e-9)
        hits.extend((int(m), int(n), branch) for m, n in zip(M[keep], N[keep]))
    out = []
    for m, n, branch in hits:
        spec = sfg_params(m, n, branch)
        spec = spec.bind(B / spec.f, B)
        cand = _candidate(spec, 0.0)
        if spec.T <= T_max and cand.af_vs_cp >= af_min:
            out.append(cand)
    if not out:
        raise NoCandidate(f"no gate with T <= {T_max:g} ns and AF vs CP >= {af_min:g}")
    out.sort(key=lambda c: (c.spec.T, c.spec.M, c.spec.N, c.spec.branch))
    return out


REPORT_HEADER = ("M", "N", "branch", "f", "delta_f_rel", "J_GHz", "T_ns", "c1", "c2", "c3", "AF_vs_CP")


def write_report_csv(cands: Iterable[GateCandidate], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for c in cands:
        s = c.spec
        w.writerow([s.M, s.N, s.branch, *(f"{v:.9g}" for v in (
            s.f, c.delta_f_rel, s.J, s.T, *c.weyl, c.af_vs_cp))])


def report_csv_text(cands: Iterable[GateCandidate]) -> str:
    buf = io.StringIO()
    write_report_csv(cands, buf)
    return buf.getvalue()
