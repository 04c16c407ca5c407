"""Acceptance criteria, one test per criterion (split where a criterion has independent parts).

Each test records one PASS/FAIL line; the lines are printed as they run
and again in the terminal summary.  Run directly with
``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from spstruct import (
    ClassicalModel,
    HilbertModel,
    SectoredModel,
    cascade_o_project,
    complement,
    continuity_bound,
    continuity_family,
    hermitian_to_observable,
    intersection,
    load_matrix_model,
    mean_continuity_slack,
    mean_value,
    mean_value_from_basis,
    o_project,
    ortho_sum,
    phase_context,
    quantities,
    span,
    states_equivalent,
)
from spstruct.checker import STRUCTURE_AXIOMS, CheckConfig, run_suite
from spstruct.cli import EXIT_FAIL, main
from spstruct.geometry import same_subspace
from spstruct.models import haar_unitary
from spstruct.observables import transition_defect

import conftest
from conftest import haar, oracle_projector

FIXTURES = Path(__file__).parent / "fixtures"
MARGIN = -1e-9


def record(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _worst(reports, axioms):
    reps = [r for r in reports if r.axiom in axioms and r.verdict != "not-applicable"]
    return min(reps, key=lambda r: r.worst_margin + r.tolerance) if reps else None


# 1 ---------------------------------------------------------------------------

def test_criterion_01_spin_half():
    t0 = time.perf_counter()
    m = HilbertModel(2)
    p = m.similarity(m.state([1, 0]), m.state([1 / math.sqrt(2), 1 / math.sqrt(2)]))
    dt = time.perf_counter() - t0
    record("1 spin-1/2", abs(p - 0.5) <= 1e-12 and dt < 1.0, f"p(+z,+x) = {p:.15f}, {dt * 1e3:.1f} ms")


# 2 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def hilbert_suite():
    t0 = time.perf_counter()
    cfg = CheckConfig(samples=1000, seed=0, axioms=STRUCTURE_AXIOMS)
    reports = {d: run_suite(HilbertModel(d), cfg) for d in range(1, 9)}
    return reports, time.perf_counter() - t0


def test_criterion_02a_hilbert_properties_and_inequality(hilbert_suite):
    reports, dt = hilbert_suite
    axioms = STRUCTURE_AXIOMS[:-1]
    worst = {d: _worst(reps, axioms) for d, reps in reports.items()}
    bad = [d for d, r in worst.items() if r.worst_margin < MARGIN and r.failed]
    lowest = min(r.worst_margin for r in worst.values())
    ok = not bad and dt < 30
    record("2a Hilbert d=1..8, Properties 1-5 + Inequality", ok,
           f"worst margin {lowest:+.2e}, failing d {bad or 'none'}, suite runtime {dt:.1f} s")


def test_criterion_02b_hilbert_continuity(hilbert_suite):
    reports, _ = hilbert_suite
    reps = {d: next(r for r in rs if r.axiom == "Continuity") for d, rs in reports.items()}
    bad = {d: r.worst_margin for d, r in reps.items() if r.failed}
    detail = ", ".join(f"d={d} {v:+.2e}" for d, v in bad.items()) or "all pass"
    record("2b Hilbert d=1..8, Continuity with coefficient 1/2", not bad,
           f"{detail} (the 1/2 bound is false; coefficient 1 passes)")


# 3 ---------------------------------------------------------------------------

def _classical_alpha_rho(n, rng):
    m = ClassicalModel(n)
    states = list(range(n))
    worst = 0.0
    configs = 0
    for _ in range(60):
        perm = rng.permutation(n)
        kx = int(rng.integers(1, n)) if n > 1 else 1
        ky = int(rng.integers(0, n - kx + 1))
        X, Y = [int(i) for i in perm[:kx]], [int(i) for i in perm[kx:kx + ky]]
        ctx = phase_context(m, X, Y)
        for a in states:
            for b in X + Y:
                q = quantities(ctx, a, b) if ctx.Z.weight(a) > 0 else None
                if q is not None:
                    worst = max(worst, abs(q.alpha), abs(q.rho))
                    configs += 1
    return worst, configs


def test_criterion_03_classical(rng):
    failing, worst_ar, configs = [], 0.0, 0
    cfg = CheckConfig(samples=1000, seed=0, axioms=STRUCTURE_AXIOMS)
    for n in range(1, 11):
        reps = run_suite(ClassicalModel(n), cfg)
        failing += [f"n={n} {r.axiom}" for r in reps if r.failed]
        ineq = next(r for r in reps if r.axiom == "Inequality")
        if ineq.worst_margin != 0.0:
            failing.append(f"n={n} Inequality margin {ineq.worst_margin}")
        w, c = _classical_alpha_rho(n, rng)
        worst_ar, configs = max(worst_ar, w), configs + c
    ok = not failing and worst_ar == 0.0
    record("3 classical n=1..10", ok,
           f"failing {failing or 'none'}, max |alpha|,|rho| = {worst_ar} over {configs} configurations")


# 4 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def sectored_suite():
    return run_suite(SectoredModel([2, 3]), CheckConfig(samples=1000, seed=0, axioms=STRUCTURE_AXIOMS))


def test_criterion_04a_sectored(sectored_suite, rng):
    m = SectoredModel([2, 3])
    cross = 0.0
    pairs = 0
    for _ in range(1000):
        x, y = m.random_state(rng), m.random_state(rng)
        if x.sector != y.sector:
            cross = max(cross, m.similarity(x, y))
            pairs += 1
    failing = [r.axiom for r in sectored_suite if r.axiom != "Continuity" and r.failed]
    record("4a sectored [2,3], Properties 1-5 + Inequality", not failing and cross == 0.0,
           f"failing {failing or 'none'}, max cross-sector p = {cross} over {pairs} pairs")


def test_criterion_04b_sectored_continuity(sectored_suite):
    rep = next(r for r in sectored_suite if r.axiom == "Continuity")
    record("4b sectored [2,3], Continuity with coefficient 1/2", not rep.failed,
           f"worst margin {rep.worst_margin:+.2e} (inherits the false 1/2 bound)")


# 5 ---------------------------------------------------------------------------

GRID = [(r, eps) for r in (0.2, 0.5, 0.8) for eps in (1e-2, 1e-3)]


def test_criterion_05a_expansion():
    ratios = []
    for r, eps in GRID:
        fam = continuity_family(r, eps)
        q = 1 - fam.model.similarity(fam.x, fam.y)
        ratios.append(q / (eps ** 2 / (r * (1 - r))))
    ok = all(abs(x - 1) <= 0.05 for x in ratios)
    record("5a 1-p(x,y) vs eps^2/(r(1-r))", ok,
           f"measured/stated ratio in [{min(ratios):.4f}, {max(ratios):.4f}] "
           f"(the expansion gives eps^2/(4r(1-r)))")


def test_criterion_05b_first_term():
    slacks, ok = [], True
    for r, eps in GRID:
        fam = continuity_family(r, eps)
        m = fam.model
        q = 1 - m.similarity(fam.x, fam.y)
        s = continuity_bound(m, fam.x, fam.y, fam.u)
        slacks.append(s)
        ok &= s < 2 * 0.5 * math.sqrt(q)
    record("5b slack at z=u below 2*(1/2 sqrt(1-p))", ok,
           f"slack in [{min(slacks):+.2e}, {max(slacks):+.2e}]; holds because the slack is negative")


# 6 ---------------------------------------------------------------------------

def test_criterion_06_cascade():
    m = HilbertModel(6)
    agree = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        F = m.random_frame(rng)
        x = m.random_state(rng)
        agree += states_equivalent(m, cascade_o_project(m, x, F[:4]), o_project(m, x, F[:4]))
    record("6 cascade o-projection, d=6, |A|=4", agree == 100, f"{agree}/100 seeds equivalent")


# 7 ---------------------------------------------------------------------------

def _random_hermitian(d, rng):
    if rng.random() < 0.5:
        lam = rng.integers(-2, 4, d).astype(float)
    else:
        lam = rng.standard_normal(d) * 2
    U = haar_unitary(d, rng)
    H = U @ np.diag(lam) @ U.conj().T
    return (H + H.conj().T) / 2


def test_criterion_07_hermitian_bridge():
    rng = np.random.default_rng(7)
    failing, item3, omegas = [], 0.0, 0
    for k in range(100):
        d = int(rng.integers(1, 7))
        m = HilbertModel(d)
        r = hermitian_to_observable(_random_hermitian(d, rng), m)
        for _ in range(10):
            item3 = max(item3, transition_defect(r, m.random_state(rng)))
        cfg = CheckConfig(samples=30, seed=k, axioms=("ObservableLaws",))
        rep = run_suite(m, cfg, r)[0]
        if rep.failed:
            failing.append((k, d, rep.witness.get("check")))
        omegas += 1
    ok = not failing and item3 <= 1e-9
    record("7 Hermitian bridge, 100 matrices d<=6", ok,
           f"item-3 defect max {item3:.1e}, ObservableLaws failures {failing or 'none'}")


# 8 ---------------------------------------------------------------------------

def _observable_pairs(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.integers(2, 7))
        m = HilbertModel(d)
        r = hermitian_to_observable(_random_hermitian(d, rng), m)
        yield rng, m, r


def test_criterion_08a_mean_basis():
    worst = 0.0
    for rng, m, r in _observable_pairs(500, 81):
        x = m.random_state(rng)
        worst = max(worst, abs(mean_value(r, x) - mean_value_from_basis(r, x)))
    record("8a mean value from an eigenbasis", worst <= 1e-10, f"max difference {worst:.1e} over 500 pairs")


def test_criterion_08b_mean_continuity():
    literal, sound = math.inf, math.inf
    for rng, m, r in _observable_pairs(1000, 82):
        x = m.random_state(rng)
        y = m.state(m.embed(x) + 10 ** rng.uniform(-3, 0) * haar(m.d, rng))
        literal = min(literal, mean_continuity_slack(r, x, y))
        sound = min(sound, mean_continuity_slack(r, x, y, coefficient=1.0, absolute=True))
    record("8b mean continuity slack", literal >= MARGIN,
           f"worst slack {literal:+.3f} with signed sum and 1/2; "
           f"{sound:+.2e} with sum |lambda| and coefficient 1")


# 9 ---------------------------------------------------------------------------

def _lattice_config(d, rng):
    kx = int(rng.integers(1, d))
    c = int(rng.integers(0, kx + 1))
    extra = int(rng.integers(1, d - kx + 1))
    F = np.column_stack([haar(d, rng) for _ in range(d)])
    F = np.linalg.qr(F)[0]
    X = [F[:, j] for j in range(kx)]
    G = np.column_stack(X[:c] + [haar(d, rng) for _ in range(min(extra, d - c))])
    G = np.linalg.qr(G)[0]
    Y = [G[:, j] for j in range(G.shape[1])]
    return F, X, Y, c


def _member(P, x):
    return np.vdot(x, P @ x).real >= 1 - 1e-9


def test_criterion_09_lattice():
    rng = np.random.default_rng(9)
    mismatches, checks, worst_sum = 0, 0, 0.0
    for d in range(2, 7):
        m = HilbertModel(d)
        for _ in range(3):
            F, Xv, Yv, c = _lattice_config(d, rng)
            X, Y = span(m, [m.state(v) for v in Xv]), span(m, [m.state(v) for v in Yv])
            Xp = complement(m, X)
            inv = same_subspace(m, complement(m, Xp), X)
            mismatches += not inv
            rest = [m.state(F[:, j]) for j in range(len(Xv), d)]
            S = ortho_sum(m, X, span(m, rest[:1]))
            W = intersection(m, X, Y)
            PX, PY = oracle_projector(Xv), oracle_projector(Yv)
            PS = oracle_projector(Xv + [F[:, len(Xv)]])
            PW = PX @ PY if c else None
            inside = [Xv, Yv, Xv[:c] or Xv, Xv + [F[:, len(Xv)]]]
            for i in range(500):
                pool = inside[i % 4] if i % 5 else None
                x = m.state(sum(haar(1, rng)[0] * v for v in pool) if pool else haar(d, rng))
                worst_sum = max(worst_sum, abs(X.weight(x) + Xp.weight(x) - 1))
                in_w = _member(PX, x) and _member(PY, x)
                mismatches += W.contains(x) != in_w
                mismatches += S.contains(x) != _member(PS, x)
                if PW is not None:
                    mismatches += (np.vdot(x, PW @ x).real >= 1 - 1e-9) != in_w
                checks += 1
    ok = mismatches == 0 and worst_sum <= 1e-9
    record("9 subspace lattice, d=2..6", ok,
           f"{mismatches} mismatches over {checks} states, max |p(x,X)+p(x,X')-1| = {worst_sum:.1e}")


# 10 --------------------------------------------------------------------------

def test_criterion_10_negative_controls(capsys):
    details, ok = [], True
    expected = {
        "asymmetric.json": ("Symmetry", lambda w: {w["x"], w["y"]} == {0, 1}),
        "no_oprojection.json": ("OProjection", lambda w: w["x"] == 0 and w["A"] == [1]),
    }
    for name, (axiom, witness_ok) in expected.items():
        path = FIXTURES / name
        rep = next(r for r in run_suite(load_matrix_model(path.read_bytes())) if r.axiom == axiom)
        code = main(["check", "--model", str(path)])
        capsys.readouterr()
        good = rep.failed and witness_ok(rep.witness) and code == EXIT_FAIL
        ok &= good
        details.append(f"{name}: {axiom} {rep.verdict} witness {rep.witness}, exit {code}")
    record("10 negative controls", ok, "; ".join(details))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
