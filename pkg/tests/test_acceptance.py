"""Acceptance criteria 1-10, all at zero tolerance.

Each criterion prints one ``[criterion N] PASS|FAIL ...`` line.  Run with
``pytest tests/test_acceptance.py -v -s`` to see them inline; they are also
repeated in the terminal summary.  ``python tests/test_acceptance.py`` runs
the criteria without pytest.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import CASES  # noqa: E402
from oracles import (  # noqa: E402
    brute_dual_classes,
    brute_members,
    gram_det,
    partitions_into,
    series_parts,
    trace_multiplicities,
)
from twistlat.catalog import isometry_from_name, lattice_from_name  # noqa: E402
from twistlat.classification import (  # noqa: E402
    compute_p_and_q_sigma,
    compute_z_sigma,
    defect,
    oscillator_series,
    sigma_lift_order,
)
from twistlat.exact import RootOfUnity  # noqa: E402
from twistlat.fock.laws import LAWS, Grid, LawContext, negative_controls, verify_law  # noqa: E402
from twistlat.fock.mstate import build_engine, generated_counts  # noqa: E402
from twistlat.fock.vstate import VState, apply_sigma_lift  # noqa: E402
from twistlat.lattice import fixed_and_perp, quotient  # noqa: E402
from twistlat.twist import _B_product, _B_ratio, _C_orbit, _C_split, twist_data  # noqa: E402

RESULTS: list[str] = []

SMALL_CASES = [
    ("A:1", "identity"),
    ("A:2", "identity"),
    ("Z:1", "identity"),
    ("A:1", "negation"),
    ("Z:2", "negation"),
    ("A:2", "coxeter"),
    ("Z:2", "perm:(1 2)"),
]
LAW_CASES = [("A:1", "negation"), ("Z:2", "perm:(1 2)"), ("A:2", "coxeter")]


def report(n: int, ok: bool, detail: str) -> None:
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS.append(line)
    print(line)


def fresh(lattice: str, sigma: str):
    # timing includes construction, so bypass the shared cache
    lat = lattice_from_name(lattice)
    return twist_data(lat, isometry_from_name(sigma, lat))


# -- 1 ------------------------------------------------------------------------------


def test_criterion_1_untwisted_reduction():
    expected = {"A:1": 2, "A:2": 3, "Z:1": 1}
    ok, notes = True, []
    for name, want in expected.items():
        t0 = time.perf_counter()
        t = fresh(name, "identity")
        z = compute_z_sigma(t)
        d = defect(t).defect
        dt = time.perf_counter() - t0
        oracle = brute_dual_classes(t.lattice) if t.lattice.is_even else len(brute_members(t))
        good = z.order == want == oracle and d == 1 and dt < 1.0
        ok &= good
        notes.append(f"{name}: |Z|={z.order} oracle={oracle} d={d} {dt:.3f}s")
    report(1, ok, "; ".join(notes))
    assert ok


# -- 2 ------------------------------------------------------------------------------


def test_criterion_2_a1_negation():
    t0 = time.perf_counter()
    t = fresh("A:1", "negation")
    z = compute_z_sigma(t)
    _, q = compute_p_and_q_sigma(t, z)
    d = defect(t).defect
    dt = time.perf_counter() - t0
    oracle = brute_members(t)
    ok = (z.order == 2 == len(oracle)
          and sorted(z.coset_reps) == [(Fraction(0),), (Fraction(1, 2),)]
          and sorted(oracle) == sorted(z.coset_reps)
          and q == t.lattice.full() and d == 1 and dt < 1.0)
    report(2, ok, f"|Z|={z.order} reps={[str(r[0]) for r in z.coset_reps]} Q_sigma=Q:{q == t.lattice.full()} d={d} {dt:.3f}s")
    assert ok


# -- 3 ------------------------------------------------------------------------------


def test_criterion_3_z2_negation():
    t0 = time.perf_counter()
    t = fresh("Z:2", "negation")
    z = compute_z_sigma(t)
    _, q = compute_p_and_q_sigma(t, z)
    d = defect(t).defect
    dt = time.perf_counter() - t0
    oracle = brute_members(t)
    ok = z.order == 1 == len(oracle) and q.basis == ((2, 0), (0, 2)) and d == 2 and dt < 1.0
    report(3, ok, f"|Z|={z.order} oracle={len(oracle)} Q_sigma={[list(map(int, r)) for r in q.basis]} d={d} {dt:.3f}s")
    assert ok


# -- 4 ------------------------------------------------------------------------------


def test_criterion_4_a2_coxeter():
    t0 = time.perf_counter()
    t = fresh("A:2", "coxeter")
    z = compute_z_sigma(t)
    d = defect(t).defect
    dt = time.perf_counter() - t0
    oracle = brute_members(t)
    mult = trace_multiplicities(t)
    ok = (t.order == 3 and z.order == 3 == len(oracle) and d == 1
          and t.multiplicities == (0, 1, 1) == mult and dt < 1.0)
    report(4, ok, f"N={t.order} |Z|={z.order} oracle={len(oracle)} d={d} m={t.multiplicities} trace-oracle={mult} {dt:.3f}s")
    assert ok


# -- 5 ------------------------------------------------------------------------------


def _b_eigen_sum(t, a):
    out = 0
    for j in range(1, t.order):
        out = out + t.pi_j_pairing(j, a, a) * Fraction(j, t.order)
    return out


def test_criterion_5_two_formula_agreement():
    t0 = time.perf_counter()
    checks = bad = 0
    for case in SMALL_CASES:
        t = fresh(*case)
        lat = t.lattice
        pts = list(product(range(-3, 4), repeat=lat.rank))
        basis = [lat.basis_vector(i) for i in range(lat.rank)]
        for a in pts:
            b_dal = Fraction(lat.norm(t.project0(a)) - lat.norm(a), 2)
            checks += 1
            bad += _b_eigen_sum(t, a) != -b_dal
        for a, b in list(product(pts, pts)) + list(product(basis, basis)):
            checks += 2
            bad += _B_product(t, a, b) != _B_ratio(t, a, b)
            bad += _C_orbit(t, a, b) != _C_split(t, a, b)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 10.0
    report(5, ok, f"{checks} comparisons (b, B, C) on {len(SMALL_CASES)} inputs, box [-3,3]^l: {bad} discrepancies, {dt:.2f}s")
    assert ok


# -- 6 ------------------------------------------------------------------------------


def _cocycle_failures(t, triples):
    lat, eps, eta, s = t.lattice, t.epsilon, t.eta, t.sigma
    bad = 0
    for a, b, c in triples:
        na = lat.norm(a)
        bad += eps(a, a) != (-1) ** ((na * (na + 1) // 2) % 2)
        bad += eps(a, b) * eps(b, a) != (-1) ** ((lat.pairing(a, b) + na * lat.norm(b)) % 2)
        ab = tuple(x + y for x, y in zip(a, b))
        bc = tuple(x + y for x, y in zip(b, c))
        bad += eps(ab, c) != eps(a, c) * eps(b, c)
        bad += eps(a, bc) != eps(a, b) * eps(a, c)
        bad += eta(a) * eta(b) * eps(a, b) != eta(ab) * eps(s.apply(a), s.apply(b))
    return bad


def test_criterion_6_cocycle_suite():
    t0 = time.perf_counter()
    total = bad = 0
    for case in SMALL_CASES:
        t = fresh(*case)
        pts = list(product(range(-3, 4), repeat=t.lattice.rank))
        triples = list(product(pts, repeat=3))
        total += len(triples)
        bad += _cocycle_failures(t, triples)
        fixed, _ = fixed_and_perp(t.sigma)
        for f in fixed.basis:
            bad += t.eta(tuple(int(x) for x in f)) != 1
    rng = random.Random(20261015)
    for sigma in ("negation", "coxeter"):
        t = fresh("E8", sigma)
        triples = [tuple(tuple(rng.randint(-3, 3) for _ in range(8)) for _ in range(3)) for _ in range(10_000)]
        total += len(triples)
        bad += _cocycle_failures(t, triples)
        fixed, _ = fixed_and_perp(t.sigma)
        for f in fixed.basis:
            bad += t.eta(tuple(int(x) for x in f)) != 1
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30.0
    report(6, ok, f"{total} triples (rank<=2 exhaustive on [-3,3]^l, E8 2x10^4 sampled): {bad} failures, {dt:.2f}s")
    assert ok


# -- 7 ------------------------------------------------------------------------------


def test_criterion_7_defect_cross_validation():
    t0 = time.perf_counter()
    ok = True
    notes = []
    for case in CASES:
        t = fresh(*case)
        _, q_sigma = compute_p_and_q_sigma(t)
        _, perp = fixed_and_perp(t.sigma)
        img = perp.image(t.sigma.one_minus)
        a = quotient(perp, img)
        reps = [tuple(int(x) for x in r) for r in a.coset_reps]
        one = RootOfUnity(1, 0)
        radical = {a.digits(x) for x in reps if all(_C_orbit(t, x, y) == one for y in reps)}
        image = {a.digits(x) for x in quotient(q_sigma, img).coset_reps}
        res = defect(t)
        # defect squared from Gram determinants, independent of the quotient code
        ratio = Fraction(gram_det(t.lattice, q_sigma.basis)) / Fraction(gram_det(t.lattice, perp.basis))
        good = (radical == image
                and res.defect_square * len(image) == len(reps)
                and res.defect_square ** 2 == ratio)
        ok &= good
        notes.append(f"{case[0]}/{case[1]}: d={res.defect} |A|={len(reps)} |rad|={len(radical)}")
    dt = time.perf_counter() - t0
    ok &= dt < 5.0
    report(7, ok, "; ".join(notes) + f"; {dt:.2f}s")
    assert ok


# -- 8 ------------------------------------------------------------------------------


def test_criterion_8_law_suite():
    t0 = time.perf_counter()
    ok = True
    notes = []
    for case in LAW_CASES:
        t = fresh(*case)
        ctx = LawContext(t, grid=Grid(degree=Fraction(4)))
        reps = [verify_law(law, ctx) for law in LAWS]
        failed = [r.law for r in reps if not r.passed]
        vacuous = [r.law for r in reps if r.nonzero == 0]
        controls = {r.law: r for r in negative_controls(ctx)}
        b_ctrl = controls["L13"]
        eta_ctrl = controls["L8"]
        eta_trivial = all(t.eta(a) == 1 for a in product(range(-3, 4), repeat=t.lattice.rank))
        # dropping a factor that is identically 1 cannot change anything, so the eta
        # control is only required to fail where eta is nontrivial
        eta_ok = (not eta_ctrl.passed and eta_ctrl.witness) if not eta_trivial else eta_ctrl.passed
        good = not failed and not vacuous and not b_ctrl.passed and bool(b_ctrl.witness) and bool(eta_ok)
        ok &= good
        checks = sum(r.checks for r in reps)
        notes.append(
            f"{case[0]}/{case[1]}: {len(reps)} laws, {checks} checks, failed={failed or 'none'}, "
            f"B-control {'FAIL(witness)' if not b_ctrl.passed else 'pass'}, "
            f"eta-control {'FAIL(witness)' if not eta_ctrl.passed else 'pass (eta==1)' if eta_trivial else 'pass'}"
        )
    dt = time.perf_counter() - t0
    ok &= dt < 300.0
    report(8, ok, "; ".join(notes) + f"; {dt:.1f}s")
    assert ok


# -- 9 ------------------------------------------------------------------------------


def test_criterion_9_graded_dimension():
    t0 = time.perf_counter()
    ok = True
    notes = []
    a1 = fresh("A:1", "negation")
    start = oscillator_series(a1.multiplicities, 6)
    part = tuple(partitions_into(series_parts(a1, 5), 5))
    ok &= start == (1, 1, 1, 2, 2, 3) == part
    for case in LAW_CASES:
        t = fresh(*case)
        eng = build_engine(t)
        r0 = eng.omega.reps(window=0)[0]
        fiber = eng.omega.fiber_reps(r0)
        counts = generated_counts(eng, fiber, 4)
        series = oscillator_series(t.multiplicities, len(counts))
        size = eng.omega.size
        good = counts == [c * len(fiber) for c in series] and (size is None or size == len(fiber))
        ok &= good
        notes.append(f"{case[0]}/{case[1]}: |R|={size if size is not None else 'inf'} fiber={len(fiber)} counts={counts}")
    dt = time.perf_counter() - t0
    ok &= dt < 30.0
    report(9, ok, f"A1 series {start}; " + "; ".join(notes) + f"; {dt:.2f}s")
    assert ok


# -- 10 -----------------------------------------------------------------------------


def _degree_two_basis(lat, radius=1):
    n = lat.rank
    oscs = [()]
    oscs += [((i, 1),) for i in range(n)] + [((i, 2),) for i in range(n)]
    oscs += [tuple(sorted(((i, 1), (k, 1)))) for i in range(n) for k in range(i, n)]
    out = []
    for alpha in product(range(-radius, radius + 1), repeat=n):
        for osc in oscs:
            out.append(VState({(osc, tuple(alpha)): Fraction(1)}))
    return out


def test_criterion_10_lift_order():
    t0 = time.perf_counter()
    ok = True
    notes = []
    for case in CASES:
        t = fresh(*case)
        lift = sigma_lift_order(t)
        good = lift in (t.order, 2 * t.order)
        basis = _degree_two_basis(t.lattice, 1 if t.lattice.rank <= 3 else 0)
        moved_early = False
        for v in basis:
            w = v
            for _ in range(lift):
                w = apply_sigma_lift(t, w)
            good &= w == v
            # the order is exact: half the lift order is not the identity when the lift doubles
            if lift == 2 * t.order:
                h = v
                for _ in range(t.order):
                    h = apply_sigma_lift(t, h)
                moved_early |= h != v
        if lift == 2 * t.order:
            good &= moved_early
        ok &= good
        notes.append(f"{case[0]}/{case[1]}: N={t.order} lift={lift}")
    dt = time.perf_counter() - t0
    ok &= dt < 10.0
    report(10, ok, "; ".join(notes) + f"; {dt:.2f}s")
    assert ok


if __name__ == "__main__":
    failures = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
