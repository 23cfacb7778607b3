"""SFG two-qubit gates parameterised by the integers (M, N), plus the fixed gate set.

An SFG gate leaves the control particle unentangled only for the discrete
interaction times picked out by (M, N).  Everything here is dimensionless
(f = B/J, JT, BT) until a physical exchange strength J in GHz is bound,
at which point T = JT / J in ns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Literal, Optional

import numpy as np

Branch = Literal["plus", "minus"]
BRANCHES: tuple[Branch, Branch] = ("plus", "minus")


class SfgError(ValueError):
    pass


class DegenerateGate(SfgError):
    """M == N: the f quadratic divides by zero."""


class NoRealSolution(SfgError):
    """|A| < 3: no real f exists for this (M, N)."""


def _quadratic_centre(M: int, N: int) -> float:
    if M == N:
        raise DegenerateGate(f"SFG({M},{N}) is degenerate: M must differ from N")
    return -(M * M + N * N) / (M * M - N * N)


def is_valid_pair(M: int, N: int) -> bool:
    """Exact integer test for a real f: 2*min(M,N)^2 >= max(M,N)^2."""
    if M <= 0 or N <= 0 or M == N:
        return False
    lo, hi = min(M, N), max(M, N)
    return 2 * lo * lo >= hi * hi


@dataclass(frozen=True)
class SfgGateSpec:
    """Identity of one SFG gate.

    ``J``, ``B`` (GHz) and ``T`` (ns) are only set once the gate is bound to a
    physical exchange strength with :meth:`bind`.
    """

    M: int
    N: int
    branch: Branch
    f: float
    JT: float
    BT: float
    J: Optional[float] = None
    B: Optional[float] = None
    T: Optional[float] = None

    @property
    def label(self) -> str:
        return f"SFG({self.M},{self.N},{self.branch})"

    @property
    def JT_from_N(self) -> float:
        return self.N * math.pi / math.sqrt((self.f + 1.0) ** 2 + 8.0)

    def bind(self, J: float, B: Optional[float] = None) -> "SfgGateSpec":
        """Attach a physical J (GHz).  ``B`` defaults to the ideal f*J."""
        if J <= 0:
            raise SfgError(f"exchange strength J must be positive, got {J}")
        return replace(self, J=J, B=self.f * J if B is None else B, T=self.JT / J)

    def unbound(self) -> "SfgGateSpec":
        return replace(self, J=None, B=None, T=None)


def sfg_params(M: int, N: int, branch: Branch = "minus") -> SfgGateSpec:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    if M <= 0 or N <= 0:
        raise SfgError(f"M and N must be positive integers, got ({M}, {N})")
    A = _quadratic_centre(M, N)
    disc = A * A - 9.0
    if not is_valid_pair(M, N):
        raise NoRealSolution(f"SFG({M},{N}) has |A| = {abs(A):.6g} < 3; no real f")
    root = math.sqrt(max(disc, 0.0))
    f = A + root if branch == "plus" else A - root
    JT = M * math.pi / math.sqrt((f - 1.0) ** 2 + 8.0)
    return SfgGateSpec(M=M, N=N, branch=branch, f=f, JT=JT, BT=f * JT)


def match_branch(M: int, N: int, J: float, B: float) -> tuple[SfgGateSpec, float]:
    """Pick the branch whose f best matches B/J; return the bound spec and the
    relative residual |f - B/J| / |B/J|."""
    target = B / J
    best = min((sfg_params(M, N, b) for b in BRANCHES), key=lambda s: abs(s.f - target))
    return best.bind(J, B), abs(best.f - target) / abs(target)


@lru_cache(maxsize=4096)
def _unitary_cached(M: int, N: int, f: float, JT: float, BT: float) -> np.ndarray:
    a = (-1.0) ** M
    b = np.exp(-1j * (1.0 - f) * JT)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = np.exp(-1j * ((3.0 - f) * JT + 2.0 * BT))
    u[1, 1] = u[2, 2] = (a + b) / 2
    u[1, 2] = u[2, 1] = (a - b) / 2
    u[3, 3] = (-1.0) ** N * np.exp(2j * BT)
    u *= np.exp(1j * (JT - BT))
    u.setflags(write=False)
    return u


def sfg_unitary(spec: SfgGateSpec) -> np.ndarray:
    """4x4 SFG unitary in the basis |00>, |01>, |10>, |11>.

    Depends only on (M, N, branch); a bound J merely sets the duration.
    """
    return _unitary_cached(spec.M, spec.N, spec.f, spec.JT, spec.BT).copy()


def physical_time(spec: SfgGateSpec, J: float) -> float:
    if J <= 0:
        raise SfgError(f"exchange strength J must be positive, got {J}")
    return spec.JT / J


def cp() -> np.ndarray:
    return np.diag([1, 1, 1, -1]).astype(complex)


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def phi(theta: float) -> np.ndarray:
    return np.exp(-0.5j * theta) * np.eye(2, dtype=complex)


def hadamard() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
