"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or
``python3 tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from sfgsynth import numerics as nx
from sfgsynth.circuits import (average_fidelity, circuit_unitary, reference_circuit, squared_overlap,
                               state_fidelity, two_qubit_time)
from sfgsynth.deutsch_jozsa import (CATALOG_CODES, catalog_circuit, classify, dj_run, get_function,
                                   oracle_unitary)
from sfgsynth.gate_search import af_vs_cp, best_cp_branch, fastest_gates
from sfgsynth.gp_engine import GpConfig, evolve
from sfgsynth.presets import FIELD_GHZ, fast_arbitrary, fast_cp
from sfgsynth.sfg_gates import BRANCHES, is_valid_pair, sfg_params, sfg_unitary
from sfgsynth.weyl import (is_perfect_entangler, makhlin_from_c, makhlin_sfg, pe_oracle, sweep_chamber,
                           weyl_point, weyl_raw)

RESULTS: dict[int, str] = {}
U17 = oracle_unitary(get_function("17"))


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def within(x, target, tol):
    return abs(x - target) <= tol


def test_criterion_01_cp_like_gates():
    t0 = time.perf_counter()
    rows, ok = [], True
    for (M, N, J, T) in [(124, 142, 51.93, 2.63), (137, 156, 54.37, 2.77), (143, 162, 56.77, 2.77)]:
        spec = sfg_params(M, N, "minus").bind(J, FIELD_GHZ)
        af = af_vs_cp(spec)
        ok &= within(spec.T, T, 0.01) and af >= 0.99
        rows.append(f"({M},{N}) T={spec.T:.4f} AF={af:.5f}")
    dt = time.perf_counter() - t0
    report(1, ok and dt < 1.0, "; ".join(rows) + f"; {dt:.3f}s")


def test_criterion_02_fastest_gates():
    t0 = time.perf_counter()
    expect = [(61.175, (73, 82), 1.308), (66.175, (79, 88), 1.3055), (71.175, (85, 94), 1.3031)]
    rows, ok, weyl = [], True, []
    for J, pq, T in expect:
        c = fastest_gates(J, FIELD_GHZ, f_tol=1e-3)[0]
        ok &= (c.spec.M, c.spec.N) == pq and within(c.spec.T, T, 0.002)
        weyl.append(c.weyl)
        rows.append(f"{pq} T={c.spec.T:.4f}")
    ok &= all(within(a, b, 0.01) for a, b in zip(weyl[0], (1.22, 1.22, 0.094)))
    ok &= all(within(a, b, 0.01) for a, b in zip(weyl[1][:2], (1.311, 1.311)))
    ok &= all(within(a, b, 0.01) for a, b in zip(weyl[2][:2], (1.754, 1.387)))
    dt = time.perf_counter() - t0
    smallest = ", ".join(f"{w[2]:.4f}" for w in weyl[1:])
    report(2, ok and dt < 1.0, "; ".join(rows) + f"; c3 of last two (not asserted) = {smallest}; {dt:.3f}s")


def test_criterion_03_catalog_replay():
    t0 = time.perf_counter()
    worst, hist = 0.0, {}
    for code in CATALOG_CODES:
        circ = catalog_circuit(code)
        af = average_fidelity(oracle_unitary(get_function(code)), circuit_unitary(circ))
        worst = max(worst, abs(af - 1))
        hist[circ.two_qubit_count] = hist.get(circ.two_qubit_count, 0) + 1
    counts = tuple(hist.get(k, 0) for k in range(4))
    dt = time.perf_counter() - t0
    report(3, worst <= 1e-9 and counts == (7, 12, 12, 4) and dt < 1.0,
           f"max |AF-1| = {worst:.2e}; histogram {counts}; {dt:.3f}s")


def _fast_circuit_metrics(circ):
    u = circuit_unitary(circ)
    bare = circ.with_ops([op for op in circ.ops if op.kind != "RZ"])
    ub = circuit_unitary(bare)
    fid = state_fidelity(dj_run(U17), dj_run(u))
    return (average_fidelity(U17, u), fid, average_fidelity(U17, ub),
            squared_overlap(U17, u), squared_overlap(U17, ub))


def test_criterion_04_fast_cp_circuit():
    t0 = time.perf_counter()
    circ = reference_circuit("u17_fast_cp")
    af, fid, af_bare, sq, sq_bare = _fast_circuit_metrics(circ)
    forward = [within(af, 0.9888, 0.002), within(fid, 0.987, 0.003), within(af_bare, 0.979, 0.002)]
    rev = circ.with_ops(reversed(circ.ops))
    r_af, r_fid, r_bare, _, _ = _fast_circuit_metrics(rev)
    backward = [within(r_af, 0.9888, 0.002), within(r_fid, 0.987, 0.003), within(r_bare, 0.979, 0.002)]
    if all(forward):
        ok, used = True, "rightmost-first"
    elif not any(forward):
        ok, used = all(backward), "reversed"
    else:
        ok, used = False, "rightmost-first"
    dt = time.perf_counter() - t0
    report(4, ok and dt < 1.0,
           f"order={used}; AF={af:.5f} (target 0.9888), DJ fidelity={fid:.5f} (0.987), "
           f"AF without RZ={af_bare:.5f} (0.979); reversed: {r_af:.5f}/{r_fid:.5f}/{r_bare:.5f}; "
           f"squared overlaps {sq:.5f}/{sq_bare:.5f}; {dt:.3f}s")


def test_criterion_05_geometry_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    n = worst = disagree = 0
    while n < 500:
        M, N = (int(x) for x in rng.integers(1, 1001, 2))
        if M == N or not is_valid_pair(M, N):
            continue
        spec = sfg_params(M, N, BRANCHES[int(rng.integers(2))])
        a, b = makhlin_sfg(spec), makhlin_from_c(weyl_raw(spec))
        worst = max(worst, abs(a.G1 - b.G1), abs(a.G2 - b.G2))
        oracle = pe_oracle(sfg_unitary(spec)) >= 1 - 1e-3
        disagree += is_perfect_entangler(weyl_point(spec)) != oracle
        n += 1
    dt = time.perf_counter() - t0
    report(5, worst <= 1e-9 and disagree == 0 and dt < 30,
           f"500 gates; max invariant gap {worst:.2e}; PE disagreements {disagree}; {dt:.1f}s")


def test_criterion_06_pe_fraction():
    t0 = time.perf_counter()
    res = sweep_chamber(200, 200)
    dt = time.perf_counter() - t0
    report(6, 0.20 <= res.pe_fraction <= 0.30 and dt < 30,
           f"{res.gate_count} gates, PE fraction {res.pe_fraction:.4f}; {dt:.1f}s")


def test_criterion_07_dj_correctness():
    t0 = time.perf_counter()
    worst, verdicts = 0.0, set()
    for code in CATALOG_CODES:
        verdict, p = classify(dj_run(oracle_unitary(get_function(code))))
        worst = max(worst, p)
        verdicts.add(verdict)
    const, p_const = classify(dj_run(oracle_unitary(None)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and verdicts == {"balanced"} and const == "constant" and within(p_const, 1, 1e-12)
    report(7, ok and dt < 1.0, f"max balanced p000 {worst:.1e}; identity -> {const} p000={p_const:.3f}; {dt:.3f}s")


def _monotone(res):
    best = [h.best_fitness for h in res.history]
    return all(b >= a for a, b in zip(best, best[1:]))


@pytest.mark.slow
def test_criterion_08_gp_synthesis():
    t0 = time.perf_counter()
    common = dict(PopL=500, TQmax=3, max_generations=200)
    runs = {
        "ideal_cp": dict(common, gate_library="ideal_cp", angle_mode="grid_pi_over_8", fitness_threshold=1 - 1e-9),
        "fast_cp": dict(common, gate_library="fast_cp", angle_mode="continuous", fitness_threshold=0.99),
    }
    bests, ok_props = {}, True
    for name, kw in runs.items():
        scores = []
        for seed in range(1, 11):
            cfg = GpConfig(rng_seed=seed, **kw)
            res = evolve(cfg, U17)
            again = evolve(cfg, U17)
            ok_props &= _monotone(res) and res.history == again.history and res.best == again.best
            ok_props &= all(i.circuit.two_qubit_count <= cfg.TQmax for i in res.population)
            scores.append(res.best.fitness)
        bests[name] = max(scores)
    dt = time.perf_counter() - t0
    ok = bests["ideal_cp"] >= 1 - 1e-9 and bests["fast_cp"] >= 0.985 and ok_props and dt < 600
    report(8, ok, f"ideal CP best AF {bests['ideal_cp']:.10f}; fast SFG best AF {bests['fast_cp']:.5f}; "
                  f"monotone+deterministic {ok_props}; {dt:.1f}s")


@pytest.mark.slow
def test_criterion_09_time_accounting():
    t0 = time.perf_counter()
    shipped = two_qubit_time(reference_circuit("u17_fast_cp"))
    lib = fast_arbitrary()
    hit = None
    for seed in range(1, 11):
        cfg = GpConfig(PopL=5000, TQmax=20, max_generations=300, angle_mode="continuous",
                       gate_library="fast_arbitrary", fitness_threshold=0.90, rng_seed=seed)
        res = evolve(cfg, U17, library=lib)
        if res.best.fitness >= 0.90:
            hit = (seed, res)
            break
    dt = time.perf_counter() - t0
    if hit is None:
        report(9, False, f"shipped time {shipped:.4f} ns; no seed in 1..10 reached AF 0.90; {dt:.1f}s")
        return
    seed, res = hit
    circ = res.best.circuit
    manual = sum(op.reps * circ.bindings[op.gate_ref].T for op in circ.ops if op.kind == "SFG")
    t = two_qubit_time(circ)
    ok = within(shipped, 8.17, 0.05) and math.isclose(t, manual, rel_tol=1e-12)
    reps = [op.reps for op in circ.ops if op.kind == "SFG"]
    report(9, ok, f"shipped time {shipped:.4f} ns; seed {seed} AF {res.best.fitness:.4f} with "
                  f"{len(reps)} two-qubit ops (reps {reps}), time {t:.3f} ns; {dt:.1f}s")


def test_criterion_10_slow_cp_circuit():
    circ = reference_circuit("u17_slow_cp")
    chosen = all(best_cp_branch(s.M, s.N)[0].branch == s.branch for s in circ.bindings.values())
    af = average_fidelity(U17, circuit_unitary(circ))
    report(10, chosen and af >= 0.999, f"branches per AF-vs-CP rule: {chosen}; AF={af:.6f} "
                                       f"(squared {af * af:.6f}); gate times "
                                       + "/".join(f"{s.T:.1f}" for s in circ.bindings.values()) + " ns")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
