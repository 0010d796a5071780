"""The thirteen acceptance criteria, each checked exactly and summarised on one line.

Per-twist checks run once per twist in `test_twist_battery` and are aggregated by the
criterion tests that follow, so the file must run in order (the default).
"""

from __future__ import annotations

import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE, make_case
from qtwist import cartan as C
from qtwist import coadjoint as CA
from qtwist import radford as RD
from qtwist import twist as TW
from qtwist import uq_engine as U
from qtwist.cli import default_modules
from qtwist.scalars import span_mod

L3 = 3


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[n])


def admissible_twists(rank: int) -> list[tuple]:
    rs = C.build_root_system("A", rank)
    out = []
    for t in C.enumerate_bd_triples(rs):
        if C.check_l_admissible(rs, t, L3):
            n = len(C.solve_eqs(C.compute_lattices(rs, t, L3)))
            out += [("A", rank, dict(t.tmap), i) for i in range(n)]
    return out


def label(p) -> str:
    typ, rank, pairs, i = p
    arrows = ",".join(f"{a + 1}->{b + 1}" for a, b in sorted(pairs.items())) or "empty"
    return f"{typ}{rank}[{arrows}]#{i}"


ALL = [("A", 1, {}, 0)] + admissible_twists(2) + admissible_twists(3)
# the 27 pure-bicharacter A3 twists get the cocycle check; three of them, spread over the
# solution set, also get the expensive per-twist battery
_a3_empty = [p for p in ALL if p[1] == 3 and not p[2]]
FULL = [p for p in ALL if not (p[1] == 3 and not p[2])] + [_a3_empty[i] for i in (0, 13, 26)]
COCYCLE_ONLY = [p for p in ALL if p not in FULL]

BATTERY: dict[str, dict[str, bool]] = {}
COCYCLES: dict[str, bool] = {}


def build(p):
    typ, rank, pairs, i = p
    return make_case(typ, rank, L3, pairs, i)


# -- per-twist work ----------------------------------------------------------------------


@pytest.mark.parametrize("p", COCYCLE_ONLY, ids=label)
def test_cocycle_only(p):
    tc = build(p)
    rep = TW.verify_twist(tc.J)
    COCYCLES[label(p)] = rep.ok
    assert rep.ok


@pytest.mark.parametrize("p", FULL, ids=label)
def test_twist_battery(p):
    tc = build(p)
    res = {}
    res["cocycle"] = TW.verify_twist(tc.J).ok
    res["abrr"] = TW.abrr_check(tc.td, tc.J).ok
    if tc.alg.r == 1:
        res["quasitriangular"] = TW.twisted_quasitriangular(tc.H)["ok"]
    else:
        res["quasitriangular"] = TW.module_quasitriangular(tc.H, default_modules(tc.alg))["ok"]
    res["grouplikes"] = RD.grouplikes_of_twist(tc.H, tc.ld) == RD.l_characters(tc.ld)
    res["drinfeld"] = TW.verify_drinfeld_invariance(tc.H)["ok"]
    t = tc.ld.triple
    res["wedge"] = RD.wedge_certificate(tc.H, t.gamma1, t.gamma2).ok
    BATTERY[label(p)] = res
    COCYCLES[label(p)] = res["cocycle"]
    assert all(res.values()), res


def battery(key: str) -> tuple[bool, int]:
    assert len(BATTERY) == len(FULL), "per-twist battery did not run first"
    return all(r[key] for r in BATTERY.values()), len(BATTERY)


# -- criteria ------------------------------------------------------------------------------


def test_criterion_01_pbw_dimension():
    got = {}
    for rank, l in ((1, 3), (2, 3), (2, 5)):
        t = time.time()
        alg = U.algebra_for("A", rank, l)
        got[(rank, l)] = (alg.dim(), time.time() - t)
    ok = [d for d, _ in got.values()] == [27, 6561, 390625] and all(s < 60 for _, s in got.values())
    record(1, ok, "dims " + ", ".join(f"A{r} l={l}: {d}" for (r, l), (d, _) in got.items()))
    assert ok


def test_criterion_02_eqs_counts():
    counts = {}
    residual_free = True
    for rank, pairs in ((2, {0: 1}), (3, {0: 2})):
        ld = C.compute_lattices(C.build_root_system("A", rank), C.make_triple(pairs), L3)
        sols = C.solve_eqs(ld)
        counts[rank] = len(sols)
        residual_free &= all(not any(C.eqs_residual(ld, s.s)) and C.is_antisymmetric(s.s, L3) for s in sols)
    ok = counts == {2: 1, 3: 3} and residual_free
    record(2, ok, f"maximal A2: {counts[2]} solution, A3 a1->a3: {counts[3]} solutions, EQ-S residuals zero")
    assert ok


def test_criterion_03_worked_a3_table():
    ld = C.compute_lattices(C.build_root_system("A", 3), C.make_triple({0: 2}), L3)
    sols = {s.value((1, 0, 1), (0, 1, 0), L3): s for s in C.solve_eqs(ld)}
    h = RD._lattice_vec(ld, (0, 1, Fraction(1, 2)))
    pairs = [((1, 0, 1), (1, 0, 0)), ((0, 1, 0), (1, 0, 0)), ((1, 1, 0), h), ((0, 1, 0), h)]
    checks = {
        "L": ld.elements("L") == span_mod([(0, 1, 0), (1, 0, 1)], L3, 3),
        "G2perp": ld.elements("G2perp") == span_mod([(1, 0, 0), (0, 1, 2)], L3, 3),
        "s2omega": RD.s2omega_values(sols[1], ld, pairs) == [1, 2, 2, 1],
        "G_r orders": (len(RD.g_lr(sols[1], ld)[0]), len(RD.g_lr(sols[0], ld)[0])) == (9, 27),
    }
    ok = all(checks.values())
    record(3, ok, "; ".join(f"{k} {'ok' if v else 'MISMATCH'}" for k, v in checks.items()))
    assert ok


def test_criterion_04_cocycle():
    assert len(COCYCLES) == len(ALL), "per-twist checks did not run first"
    ok = all(COCYCLES.values())
    n23 = sum(1 for p in ALL if p[1] > 1)
    record(4, ok, f"dual cocycle and counit exact on all {n23} A2/A3 twists at l=3 (plus the A1 unit twist)")
    assert ok


def test_criterion_05_abrr():
    ok, n = battery("abrr")
    record(5, ok, f"A_L^2(J) = J and A_R^2(J) = J on {n} twists")
    assert ok


def test_criterion_06_quasitriangular(a1, a2):
    plain = {r: TW.untwisted_quasitriangular(alg)["ok"] for r, alg in ((1, a1), (2, a2))}
    twisted, n = battery("quasitriangular")
    ok = all(plain.values()) and twisted
    record(6, ok, f"untwisted A1, A2 at algebra level; R^J on {n} twists (A1 algebra level, A2/A3 on simple modules)")
    assert ok


def test_criterion_07_radford():
    a2 = {}
    for pairs in ({0: 1}, {1: 0}, {}):
        tc = make_case("A", 2, L3, pairs)
        a2[label(("A", 2, pairs, 0))] = RD.verify_radford_description(tc.H, tc.ld, tc.sol).ok
    # A3: the group parts through the Cartan component of R^J, the rest by the dimension formula
    ld = C.compute_lattices(C.build_root_system("A", 3), C.make_triple({0: 2}), L3)
    alg = U.algebra_for("A", 3, L3)
    a3 = {}
    orders = {}
    for sol in C.solve_eqs(ld):
        H = TW.TwistedHopf(TW.twist_for(alg, ld, sol)[1])
        T = RD.twisted_r_cartan_part(H)
        gr, gl = RD.g_lr(sol, ld)
        key = sol.value((1, 0, 1), (0, 1, 0), L3)
        a3[key] = (RD.cartan_image_characters(T, "right") == gr and RD.cartan_image_characters(T, "left") == gl
                   and RD.g2_in_gr(sol, ld))
        orders[key] = len(gr)
    n_pos, n_g2 = len(alg.roots), 1
    dim_r = {k: g * L3 ** (n_pos + n_g2) for k, g in orders.items()}
    dim_p2 = alg.G * L3 ** (n_pos + n_g2)
    strict_q = dim_r[1] < dim_p2
    full_trivial = orders[0] == alg.G
    ok = all(a2.values()) and all(a3.values()) and strict_q and full_trivial
    record(7, ok, f"A2 spans equal both ways ({len(a2)} twists); A3 group parts via R^J; "
                  f"q-solution dim {dim_r[1]} < dim p2 {dim_p2}; trivial-value G_(r) = G ({orders[0]})")
    assert ok


def test_criterion_08_grouplikes():
    ok, n = battery("grouplikes")
    max_a2 = make_case("A", 2, L3, {0: 1})
    a3 = make_case("A", 3, L3, {0: 2}, 1)
    c2 = len(RD.grouplikes_of_twist(max_a2.H, max_a2.ld))
    c3 = len(RD.grouplikes_of_twist(a3.H, a3.ld))
    ok = ok and (c2, c3) == (3, 9)
    record(8, ok, f"grouplikes = L on {n} twists; maximal A2: {c2}, worked A3: {c3}")
    assert ok


def test_criterion_09_drinfeld(a1):
    inv, n = battery("drinfeld")
    rep = TW.drinfeld_report(a1)
    corrected = rep["K_rho_u"]["central"] and rep["K_rho_u"]["ribbon_identity"]
    literal = rep["K_rho_inv_u"]["central"] and rep["K_rho_inv_u"]["ribbon_identity"]
    record(9, inv and corrected and literal,
           f"Q^-1 S(Q) = 1 and u^J = u on {n} twists: {inv}; K_rho u central + ribbon at A1: {corrected}; "
           f"literal K_rho^-1 u central + ribbon: {literal} (unattainable with S^2 = Ad K_rho^-1)")
    assert inv and corrected


@pytest.mark.xfail(strict=True, reason="with S^2(x) = K_rho^-1 x K_rho the central element is K_rho u")
def test_criterion_09_literal_ribbon_form(a1):
    rep = TW.drinfeld_report(a1)
    assert rep["K_rho_inv_u"]["central"] and rep["K_rho_inv_u"]["ribbon_identity"]


def test_criterion_10_antipode_traces(a2):
    order = TW.antipode_order(a2, a2.antipode_raw, 4 * L3)
    base = TW.antipode_traces(a2, a2.antipode_raw, order)
    rows = []
    for p in [q for q in ALL if q[1] == 2]:
        tc = build(p)
        order_j = TW.antipode_order(a2, tc.H.antipode_raw, 4 * L3)
        rows.append(order_j == order and TW.antipode_traces(a2, tc.H.antipode_raw, order) == base)
    ok = all(rows)
    record(10, ok, f"ord(S) = {order}; Tr(S_J^m) = Tr(S^m), m <= {order}, on {len(rows)} A2 twists")
    assert ok


def test_criterion_11_dual_factorization(a1):
    wedge, n = battery("wedge")
    unit = make_case("A", 1, L3, {})
    steps = RD.wedge_filtration_steps(unit.H, [], [])
    explicit = 1 < steps <= RD.wedge_certificate(unit.H, [], []).steps_bound
    a2_cases = (build(p) for p in ALL if p[1] == 2)
    index_product = all(RD.lattice_counts(tc.alg, tc.ld, tc.sol).index_product for tc in a2_cases)
    max_a2 = C.compute_lattices(C.build_root_system("A", 2), C.make_triple({0: 1}), L3)
    census = RD.irrep_census(max_a2)
    oracle = RD.semisimple_quotient(a1)
    ok = wedge and explicit and index_product and census.predicted_count == 9 and oracle.irreps == 3
    record(11, ok, f"wedge certificate on {n} twists; A1 filtration exhausts in {steps} steps; "
                   f"|Lambda||C| = |L| on A2; census maximal A2 l=3: {census.predicted_count} "
                   f"(dims {census.predicted_dims}); l=5 coradical figure not asserted")
    assert ok


COADJOINT_LAMBDAS = [1, 2, -1, Fraction(1, 2)]


def test_criterion_12_coadjoint(a1, a1_l5, a2):
    t = time.time()
    failures = []
    for alg in (a1, a1_l5, a2):
        for a in range(alg.r):
            for sign in (1, -1):
                O = CA.o_element(alg, a, sign)
                if not ((O * O).is_zero() and CA.counit_vanishes(O)):
                    failures.append(("O", alg.l, a, sign))
            comm = CA.commutation_check(alg, a, 1)
            if not (comm["left"] and comm["right"]):
                failures.append(("commutator", alg.l, a))
            for lam in COADJOINT_LAMBDAS:
                if not CA.coadjoint_report(alg, a, 1, lam).ok:
                    failures.append(("report", alg.l, a, lam))
            for x, y in ((1, 2), (2, -1), (Fraction(1, 2), Fraction(1, 2))):
                if CA.exp_twist(alg, a, 1, x) * CA.exp_twist(alg, a, 1, y) != CA.exp_twist(alg, a, 1, x + y):
                    failures.append(("additivity", alg.l, a, x, y))
    elapsed = time.time() - t
    ok = not failures and elapsed < 120
    record(12, ok, f"A1 l=3, A1 l=5, A2 l=3, lambda in {{1, 2, -1, 1/2}}: "
                   f"{'all checks exact' if not failures else failures} in {elapsed:.0f}s")
    assert ok


def test_criterion_13_negative_controls(a1):
    perturbed = U.tensor_one(a1) + U.tensor(U.E(a1, 0), U.F(a1, 0))
    rejects_perturbed = not TW.verify_twist(perturbed).ok
    tc = make_case("A", 2, L3, {0: 1})
    s = [list(row) for row in tc.sol.s]
    s[0][1], s[1][0] = (s[0][1] + 1) % L3, (s[1][0] - 1) % L3
    bad = C.BicharSolution(tuple(tuple(row) for row in s))
    violates = any(C.eqs_residual(tc.ld, bad.s))
    residual = TW.verify_twist(TW.build_twist(TW.TwistData(tc.alg, tc.ld, bad))).cocycle_residual
    ok = rejects_perturbed and violates and not residual.is_zero()
    record(13, ok, f"1(x)1 + E(x)F rejected: {rejects_perturbed}; EQ-S-violating bicharacter gives "
                   f"{len(residual.terms)} nonzero cocycle residual terms")
    assert ok
