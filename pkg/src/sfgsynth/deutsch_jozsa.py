"""Refined Deutsch-Jozsa on three qubits: oracles, the full pipeline, and the
catalog of exact CP-based circuits for all 35 balanced functions."""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, TextIO

import numpy as np

from . import numerics as nx
from .circuits import Circuit, cp_op, rotation
from .sfg_gates import hadamard

# Functions with f(0) = 0, grouped by the number of CP gates in their circuit.
CATALOG_CODES = (
    0x0F, 0x33, 0x3C, 0x55, 0x5A, 0x66, 0x69,
    0x1E, 0x2D, 0x36, 0x39, 0x4B, 0x56, 0x59, 0x63, 0x65, 0x6A, 0x6C, 0x78,
    0x1B, 0x1D, 0x27, 0x2E, 0x35, 0x3A, 0x47, 0x4E, 0x53, 0x5C, 0x72, 0x74,
    0x17, 0x2B, 0x4D, 0x71,
)


class UnknownFunction(KeyError):
    pass


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class BalancedFunction:
    hex_code: int

    def __post_init__(self):
        if not 0 <= self.hex_code < 0x80:
            raise ValueError(f"canonical codes have f(0) = 0, so must be < 0x80; got {self.hex_code:#x}")
        if bin(self.hex_code).count("1") != 4:
            raise ValueError(f"{self.hex_code:#04x} is not balanced")

    @property
    def name(self) -> str:
        return f"{self.hex_code:02X}"

    @property
    def outputs(self) -> tuple[int, ...]:
        """f(0) .. f(7), read from the byte most significant bit first."""
        return tuple((self.hex_code >> (7 - x)) & 1 for x in range(8))

    @property
    def diagonal(self) -> np.ndarray:
        return np.array([(-1) ** b for b in self.outputs], dtype=float)


def parse_code(code: str | int) -> int:
    if isinstance(code, int):
        return code
    text = code.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    return int(text, 16)


def function_catalog() -> list[BalancedFunction]:
    return [BalancedFunction(c) for c in CATALOG_CODES]


def get_function(code: str | int) -> BalancedFunction:
    value = parse_code(code)
    if value not in CATALOG_CODES:
        raise UnknownFunction(f"{value:#04x} is not one of the 35 catalog functions")
    return BalancedFunction(value)


def oracle_unitary(fn: Optional[BalancedFunction]) -> np.ndarray:
    """Diagonal oracle diag((-1)^f(x)); ``None`` stands for the constant function."""
    if fn is None:
        return np.eye(nx.DIM, dtype=complex)
    return np.diag(fn.diagonal).astype(complex)


@lru_cache(maxsize=1)
def _h3() -> np.ndarray:
    h = hadamard()
    return nx.kron(nx.kron(h, h), h)


def dj_run(u_f: np.ndarray) -> np.ndarray:
    """Output state H^3 . U_f . H^3 |000>."""
    h3 = _h3()
    return h3 @ (np.asarray(u_f, dtype=complex) @ (h3 @ nx.basis_state(0)))


def classify(psi: np.ndarray) -> tuple[str, float]:
    p000 = float(abs(psi[0]) ** 2)
    return ("constant" if p000 > 0.5 else "balanced"), p000


# --- catalog circuits ------------------------------------------------------

_TOKEN = re.compile(r"R(?P<q>[0-2])z\((?P<sign>[-+]?)pi\)|CP(?P<a>[0-2])(?P<b>[0-2])")


def parse_product(expr: str) -> Circuit:
    """Parse a product like ``R0z(-pi) CP01 R2z(pi)`` (rightmost applied first)."""
    ops = []
    pos = 0
    text = expr.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CorpusError(f"cannot parse {text[pos:]!r}")
        if m.group("q") is not None:
            angle = -np.pi if m.group("sign") == "-" else np.pi
            ops.append(rotation("RZ", int(m.group("q")), angle))
        else:
            a, b = int(m.group("a")), int(m.group("b"))
            if a == b:
                raise CorpusError(f"CP{a}{b} needs two distinct qubits")
            ops.append(cp_op(a, b))
        pos = m.end()
    return Circuit(tuple(reversed(ops)))


def parse_corpus(text: str) -> dict[int, Circuit]:
    corpus: dict[int, Circuit] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        code, sep, expr = line.partition(":")
        try:
            if not sep:
                raise CorpusError("expected '<hex>: <product>'")
            value = parse_code(code)
            if value in corpus:
                raise CorpusError(f"duplicate entry {value:02X}")
            corpus[value] = parse_product(expr)
        except (CorpusError, ValueError) as exc:
            raise CorpusError(f"line {lineno}: {exc}") from None
    return corpus


def load_corpus(path: Optional[str | Path] = None) -> dict[int, Circuit]:
    if path is None:
        text = resources.files("sfgsynth").joinpath("data/balanced_circuits.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_corpus(text)


@lru_cache(maxsize=1)
def _default_corpus() -> dict[int, Circuit]:
    return load_corpus()


def catalog_circuit(code: str | int) -> Circuit:
    """Exact ideal-CP circuit for a catalog function."""
    value = get_function(code).hex_code
    return _default_corpus()[value]


def write_catalog_csv(fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["hex", *(f"f{x}" for x in range(8)), "two_qubit_gate_count"])
    for fn in function_catalog():
        w.writerow([fn.name, *fn.outputs, catalog_circuit(fn.hex_code).two_qubit_count])


def catalog_csv_text() -> str:
    buf = io.StringIO()
    write_catalog_csv(buf)
    return buf.getvalue()
