"""Command-line entry point: ``sfgsynth <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
Fields are given in meV and exchange strengths in GHz; every number is
printed with 9 significant digits.
"""
from __future__ import annotations

import argparse
import collections
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from . import numerics as nx
from .circuits import (CircuitError, MissingBinding, average_fidelity, circuit_unitary, load_circuit,
                       save_circuit, state_fidelity, two_qubit_time)
from .deutsch_jozsa import (CorpusError, UnknownFunction, catalog_csv_text, classify, dj_run,
                            function_catalog, get_function, load_corpus, oracle_unitary)
from .gate_search import (NoCandidate, af_vs_cp, cp_approx_search, fastest_gates, report_csv_text)
from .gp_engine import (ConfigError, EvolutionResult, evolve, history_csv_text, make_config,
                        read_config_values)
from .presets import FIELD_MEV
from .sfg_gates import BRANCHES, SfgError, match_branch, sfg_params, sfg_unitary
from .weyl import is_perfect_entangler, makhlin_sfg, max_concurrence, sweep_chamber, sweep_csv_text, weyl_point

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
AF_EXACT_TOL = 1e-9


def g(x: float) -> str:
    return f"{x:.9g}"


def _cplx(z: complex) -> str:
    return f"{g(z.real)}{'+' if z.imag >= 0 else '-'}{g(abs(z.imag))}j"


@dataclass
class RunReport:
    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    outputs: dict[str, Any] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    seed: Optional[int] = None
    wall_time_s: float = 0.0

    def validate(self) -> None:
        for key, value in self.outputs.items():
            if key.startswith(("af", "fidelity")) and isinstance(value, float) and not 0 <= value <= 1 + 1e-12:
                raise ValueError(f"fidelity {key} = {value} outside [0, 1]")
            if key.startswith("time") and isinstance(value, float) and value < 0:
                raise ValueError(f"time {key} = {value} is negative")


def _field_ghz(b_mev: float) -> float:
    if not b_mev > 0:
        raise SfgError(f"field B must be positive, got {b_mev} meV")
    return nx.energy_to_frequency(b_mev)


def _write(path: str, text: str, report: RunReport) -> None:
    Path(path).write_text(text, encoding="utf-8")
    report.artifacts.append(str(path))


# --- commands -----------------------------------------------------------------

def cmd_gate(args, report: RunReport) -> int:
    B = _field_ghz(args.B) if args.B is not None else None
    if args.branch is None and args.J is not None and B is not None:
        spec, delta = match_branch(args.M, args.N, args.J, B)
        report.outputs["delta_f_rel"] = delta
    else:
        spec = sfg_params(args.M, args.N, args.branch or "minus")
        if args.J is not None:
            spec = spec.bind(args.J, B)
    u = sfg_unitary(spec)
    c = weyl_point(spec)
    inv = makhlin_sfg(spec)
    print(f"gate     {spec.label}")
    print(f"f        {g(spec.f)}")
    print(f"JT       {g(spec.JT)}")
    print(f"BT       {g(spec.BT)}")
    if spec.J is not None:
        print(f"J_GHz    {g(spec.J)}")
        print(f"B_GHz    {g(spec.B)}")
        print(f"T_ns     {g(spec.T)}")
    print("unitary")
    for row in u:
        print("  " + "  ".join(_cplx(z) for z in row))
    print(f"weyl     {g(c.c1)} {g(c.c2)} {g(c.c3)}")
    print(f"G1       {_cplx(inv.G1)}")
    print(f"G2       {g(inv.G2)}")
    pe = is_perfect_entangler(c)
    print(f"perfect_entangler {str(pe).lower()}")
    print(f"max_concurrence   {g(max_concurrence(c))}")
    af = af_vs_cp(spec)
    print(f"AF_vs_CP {g(af)}")
    report.outputs.update(f=spec.f, JT=spec.JT, BT=spec.BT, weyl=list(c), G1=[inv.G1.real, inv.G1.imag],
                          G2=inv.G2, perfect_entangler=pe, af_vs_cp=af, branch=spec.branch)
    if spec.T is not None:
        report.outputs["time_ns"] = spec.T
    return EXIT_OK


def cmd_sweep(args, report: RunReport) -> int:
    res = sweep_chamber(args.M_max, args.N_max if args.N_max is not None else args.M_max)
    if args.out:
        _write(args.out, sweep_csv_text(res.rows), report)
    print(f"gates        {res.gate_count}")
    print(f"skipped      {res.skipped}")
    print(f"pe_count     {res.pe_count}")
    print(f"pe_fraction  {g(res.pe_fraction)}")
    report.outputs.update(gates=res.gate_count, skipped=res.skipped, pe_count=res.pe_count,
                          pe_fraction=res.pe_fraction)
    return EXIT_OK


def cmd_search(args, report: RunReport) -> int:
    B = _field_ghz(args.B)
    if args.fast:
        if args.J is None:
            raise SfgError("--fast needs --J")
        cands = fastest_gates(args.J, B, f_tol=args.f_tol, count=args.count)
    else:
        cands = cp_approx_search(B, args.Tmax, args.af_min, M_max=args.M_max, N_max=args.M_max)
    text = report_csv_text(cands)
    if args.out:
        _write(args.out, text, report)
    sys.stdout.write(text)
    report.outputs.update(candidates=len(cands), first=[cands[0].spec.M, cands[0].spec.N, cands[0].spec.branch],
                          time_ns=cands[0].spec.T, af_vs_cp=cands[0].af_vs_cp)
    return EXIT_OK


def cmd_verify_catalog(args, report: RunReport) -> int:
    corpus = load_corpus(args.corpus)
    failures = 0
    hist: collections.Counter[int] = collections.Counter()
    for fn in function_catalog():
        circ = corpus.get(fn.hex_code)
        if circ is None:
            print(f"{fn.name}  missing  FAIL")
            failures += 1
            continue
        af = average_fidelity(oracle_unitary(fn), circuit_unitary(circ))
        ok = abs(af - 1.0) <= AF_EXACT_TOL
        failures += not ok
        hist[circ.two_qubit_count] += 1
        print(f"{fn.name}  {g(af)}  {'PASS' if ok else 'FAIL'}")
    counts = [hist.get(k, 0) for k in range(max(hist, default=0) + 1)]
    print("histogram " + " ".join(f"{k}:{n}" for k, n in enumerate(counts)))
    print(f"{'all pass' if not failures else f'{failures} failures'}")
    report.outputs.update(failures=failures, histogram=counts)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_catalog(args, report: RunReport) -> int:
    text = catalog_csv_text()
    if args.out:
        _write(args.out, text, report)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _target_unitary(target: str) -> np.ndarray:
    path = Path(target)
    if path.suffix == ".circ" or path.is_file():
        return circuit_unitary(load_circuit(path))
    if target.lower() == "constant":
        return oracle_unitary(None)
    return oracle_unitary(get_function(target))


def cmd_synthesize(args, report: RunReport) -> int:
    values = read_config_values(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    cli = {"gate_library": args.library, "angle_mode": args.angle_mode, "rng_seed": args.seed,
           "PopL": args.pop, "TQmax": args.tqmax, "max_generations": args.generations,
           "fitness_threshold": args.threshold}
    values.update({k: v for k, v in cli.items() if v is not None})
    if "fitness_threshold" not in values and values.get("gate_library", "ideal_cp") != "ideal_cp":
        # exact solutions exist only for ideal CP
        values["fitness_threshold"] = 0.99
    cfg = make_config(values)
    target = _target_unitary(args.target)

    def progress(s):
        if args.verbose:
            print(f"gen {s.generation}  best {g(s.best_fitness)}  mean {g(s.mean_fitness)}", file=sys.stderr)

    res: EvolutionResult = evolve(cfg, target, on_generation=progress)
    best = res.best
    out = Path(args.out or "best.circ")
    save_circuit(best.circuit, out)
    report.artifacts.append(str(out))
    hist_path = args.history or str(out.with_suffix(".history.csv"))
    _write(hist_path, history_csv_text(res.history), report)
    print(f"af           {g(best.fitness)}")
    print(f"generations  {res.generations}")
    print(f"length       {len(best.circuit)}")
    print(f"two_qubit    {best.circuit.two_qubit_count}")
    report.outputs.update(af=best.fitness, generations=res.generations, length=len(best.circuit),
                          two_qubit_count=best.circuit.two_qubit_count)
    if not cfg.library.is_ideal_cp:
        t = two_qubit_time(best.circuit)
        print(f"time_ns      {g(t)}")
        report.outputs["time_ns"] = t
    report.seed = cfg.rng_seed
    report.parameters["config"] = asdict(cfg)
    return EXIT_OK


def cmd_dj(args, report: RunReport) -> int:
    fn = None if args.function.lower() == "constant" else get_function(args.function)
    ideal = dj_run(oracle_unitary(fn))
    if args.circuit:
        circ = load_circuit(args.circuit)
        psi = dj_run(circuit_unitary(circ))
    else:
        circ, psi = None, ideal
    verdict, p000 = classify(psi)
    fid = state_fidelity(ideal, psi)
    print(f"p000            {g(p000)}")
    print(f"classification  {verdict}")
    print(f"fidelity        {g(fid)}")
    report.outputs.update(p000=p000, classification=verdict, fidelity=fid)
    if circ is not None:
        report.outputs["af"] = average_fidelity(oracle_unitary(fn), circuit_unitary(circ))
        print(f"af              {g(report.outputs['af'])}")
        try:
            t = two_qubit_time(circ)
        except MissingBinding:
            t = None
        if t is not None:
            print(f"time_ns         {g(t)}")
            report.outputs["time_ns"] = t
    return EXIT_OK


def cmd_reps(args, report: RunReport) -> int:
    """U(M, N)^k against the gate for (kM, kN) on the same branch."""
    base = sfg_params(args.M, args.N, args.branch)
    lhs = nx.mat_power(sfg_unitary(base), args.k)
    rhs = sfg_unitary(sfg_params(args.k * args.M, args.k * args.N, args.branch))
    diff = float(np.abs(lhs - rhs).max())
    ok = diff <= 1e-9
    print(f"power        {args.k}")
    print(f"max_abs_diff {g(diff)}")
    print("match" if ok else "MISMATCH")
    report.outputs.update(max_abs_diff=diff, match=ok)
    return EXIT_OK if ok else EXIT_FAIL


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sfgsynth", description="SFG gate analysis and circuit synthesis.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--report", metavar="PATH", help="write a JSON run report")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gate", help="parameters, unitary and geometry of one SFG gate")
    s.add_argument("M", type=int)
    s.add_argument("N", type=int)
    s.add_argument("--branch", choices=BRANCHES)
    s.add_argument("--J", type=float, help="exchange strength, GHz")
    s.add_argument("--B", type=float, help="field, meV (default: ideal f*J)")
    s.set_defaults(func=cmd_gate)

    s = sub.add_parser("sweep", help="Weyl-chamber sweep over (M, N)")
    s.add_argument("M_max", type=int)
    s.add_argument("N_max", type=int, nargs="?")
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("search", help="find fast or CP-like gates")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--fast", action="store_true", help="shortest ideal gates for J and B")
    mode.add_argument("--cp", action="store_true", help="gates close to CP under a time limit")
    s.add_argument("--J", type=float, help="exchange strength, GHz")
    s.add_argument("--B", type=float, default=FIELD_MEV, help="field, meV")
    s.add_argument("--f-tol", type=float, default=1e-3)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--Tmax", type=float, default=10.0, help="ns")
    s.add_argument("--af-min", type=float, default=0.99)
    s.add_argument("--M-max", type=int, default=500)
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("verify-catalog", help="replay the balanced-function circuits")
    s.add_argument("--corpus", help="alternative corpus file")
    s.set_defaults(func=cmd_verify_catalog)

    s = sub.add_parser("catalog", help="export the balanced-function catalog as CSV")
    s.add_argument("--out")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("synthesize", help="evolve a circuit for a target")
    s.add_argument("target", help="function hex code, 'constant', or a .circ file")
    s.add_argument("--library", help="ideal_cp, slow_cp, fast_cp, fast_arbitrary or 'M,N,branch,J;...'")
    s.add_argument("--config", help="key = value GP configuration file")
    s.add_argument("--seed", type=int)
    s.add_argument("--angle-mode", choices=("grid_pi_over_8", "continuous"))
    s.add_argument("--pop", type=int)
    s.add_argument("--tqmax", type=int)
    s.add_argument("--generations", type=int)
    s.add_argument("--threshold", type=float)
    s.add_argument("--out", help="best circuit path (default best.circ)")
    s.add_argument("--history", help="history CSV path")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("dj", help="run the Deutsch-Jozsa pipeline")
    s.add_argument("function", help="hex code or 'constant'")
    s.add_argument("--circuit", help="circuit file used as the oracle")
    s.set_defaults(func=cmd_dj)

    s = sub.add_parser("reps", help="check U(M,N)^k against the (kM, kN) gate")
    s.add_argument("M", type=int)
    s.add_argument("N", type=int)
    s.add_argument("k", type=int)
    s.add_argument("--branch", choices=BRANCHES, default="minus")
    s.set_defaults(func=cmd_reps)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    params = {k: v for k, v in vars(args).items() if k not in ("func", "report")}
    report = RunReport(args.command, params, seed=getattr(args, "seed", None))
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except NoCandidate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SfgError, CircuitError, ConfigError, CorpusError, UnknownFunction, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    report.wall_time_s = time.perf_counter() - start
    if args.report:
        report.validate()
        Path(args.report).write_text(json.dumps(asdict(report), indent=2, default=str) + "\n", encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
