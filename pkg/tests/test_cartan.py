import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtwist import cartan as C
from qtwist.scalars import span_mod


def _reflection_closure(cartan):
    """Positive roots by closing the simple roots under simple reflections."""
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(r):
                pairing = sum(v[j] * cartan[j][i] for j in range(r))
                w = tuple(v[j] - (pairing if j == i else 0) for j in range(r))
                if w not in roots and all(x >= 0 for x in w) and any(w):
                    roots.add(w)
                    nxt.append(w)
        frontier = nxt
    return roots


@pytest.mark.parametrize("typ,rank,count", [("A", 1, 1), ("A", 2, 3), ("A", 3, 6), ("D", 4, 12)])
def test_positive_root_counts(typ, rank, count):
    rs = C.build_root_system(typ, rank)
    assert len(rs.positive_roots) == count
    assert set(map(tuple, rs.positive_roots)) == _reflection_closure(rs.cartan)


def test_a2_positive_roots():
    rs = C.build_root_system("A", 2)
    assert set(map(tuple, rs.positive_roots)) == {(1, 0), (0, 1), (1, 1)}


def _brute_triples(rs):
    """Every partial injective, form-preserving, nilpotent map on the simple roots."""
    r = rs.rank
    found = set()
    for images in itertools.product([None, *range(r)], repeat=r):
        T = {a: b for a, b in enumerate(images) if b is not None}
        if len(set(T.values())) != len(T):
            continue
        if any(rs.cartan[T[a]][T[b]] != rs.cartan[a][b] for a in T for b in T):
            continue
        power = dict(T)
        for _ in range(r):
            power = {a: T[b] for a, b in power.items() if b in T}
        if power:
            continue
        found.add(tuple(sorted(T.items())))
    return found


@pytest.mark.parametrize("typ,rank", [("A", 1), ("A", 2), ("A", 3), ("D", 4)])
def test_triple_enumeration_matches_brute_force(typ, rank):
    rs = C.build_root_system(typ, rank)
    got = {tuple(sorted(t.tmap.items())) for t in C.enumerate_bd_triples(rs)}
    assert got == _brute_triples(rs)


def test_a1_has_only_empty_triple():
    ts = C.enumerate_bd_triples(C.build_root_system("A", 1))
    assert len(ts) == 1 and ts[0].is_empty


def test_named_triples_present():
    a3 = C.build_root_system("A", 3)
    maps = [t.tmap for t in C.enumerate_bd_triples(a3)]
    assert {0: 2} in maps
    assert C.maximal_triple(3).tmap == {0: 1, 1: 2} and {0: 1, 1: 2} in maps


def test_nilpotence_degrees():
    assert C.nilpotence_degree(C.make_triple({})) == 1
    assert C.nilpotence_degree(C.maximal_triple(2)) == 2
    assert C.nilpotence_degree(C.make_triple({0: 2})) == 2
    assert C.nilpotence_degree(C.maximal_triple(3)) == 3


def test_admissibility():
    a1, a2, a3 = (C.build_root_system("A", r) for r in (1, 2, 3))
    assert C.check_l_admissible(a3, C.make_triple({0: 2}), 3)
    assert not C.check_l_admissible(a1, C.make_triple({}), 2)
    assert C.check_l_admissible(a2, C.maximal_triple(2), 3)
    bad = C.check_l_admissible(a1, C.make_triple({}), 2)
    assert any("even" in r for r in bad.reasons)


def test_a3_example_lattices(a3_lattices):
    ld = a3_lattices
    assert ld.elements("L") == span_mod([(0, 1, 0), (1, 0, 1)], 3, 3)
    # 1/2 = 2 mod 3, so a2 + a3/2 = (0, 1, 2)
    assert ld.elements("G2perp") == span_mod([(1, 0, 0), (0, 1, 2)], 3, 3)


def test_maximal_a2_extension():
    rs = C.build_root_system("A", 2)
    ld = C.compute_lattices(rs, C.maximal_triple(2), 3)
    assert ld.apply(ld.T_ext, (1, 0)) == (0, 1)
    assert ld.apply(ld.T_ext, (0, 1)) == (1, 0)
    assert ld.apply(ld.T_ext, (1, 1)) == (1, 1)


def _all_lattices(l=3):
    for typ, rank in (("A", 1), ("A", 2), ("A", 3)):
        rs = C.build_root_system(typ, rank)
        for t in C.enumerate_bd_triples(rs):
            if C.check_l_admissible(rs, t, l):
                yield C.compute_lattices(rs, t, l)


def test_lattice_invariants_everywhere():
    for ld in _all_lattices():
        C.verify_lattices(ld)
        r, l = ld.rank, ld.l
        vecs = list(itertools.product(range(l), repeat=r))
        for x in vecs:
            for y in vecs:
                assert ld.form(ld.apply(ld.T_ext, x), ld.apply(ld.T_ext, y)) == ld.form(x, y)
        assert ld.rho in ld.elements("L")


def test_solution_counts_follow_wedge_square_of_l():
    for ld in _all_lattices():
        k = len(ld.L)
        sols = C.solve_eqs(ld)
        assert len(sols) == ld.l ** (k * (k - 1) // 2)
        for s in sols:
            assert C.is_antisymmetric(s.s, ld.l)
            assert not any(C.eqs_residual(ld, s.s))


def test_solution_counts_named(a3_lattices):
    rs = C.build_root_system("A", 2)
    assert len(C.solve_eqs(C.compute_lattices(rs, C.maximal_triple(2), 3))) == 1
    assert len(C.solve_eqs(C.compute_lattices(C.build_root_system("A", 1), C.make_triple({}), 3))) == 1
    sols = C.solve_eqs(a3_lattices)
    assert sorted(s.value((1, 0, 1), (0, 1, 0), 3) for s in sols) == [0, 1, 2]


def test_eqs_residual_detects_violation():
    rs = C.build_root_system("A", 2)
    ld = C.compute_lattices(rs, C.maximal_triple(2), 3)
    sol = C.solve_eqs(ld)[0]
    bumped = [list(row) for row in sol.s]
    bumped[0][1] = (bumped[0][1] + 1) % 3
    bumped[1][0] = (bumped[1][0] - 1) % 3
    assert any(C.eqs_residual(ld, bumped))


def test_bichar_assoc_map_examples():
    omega = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    assert C.bichar_assoc_map(omega, omega, 5) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert C.bichar_assoc_map([[0] * 3] * 3, omega, 5) == [[0] * 3] * 3


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=9, max_size=9),
       st.tuples(*[st.integers(0, 4)] * 3), st.tuples(*[st.integers(0, 4)] * 3))
def test_bichar_assoc_map_property(entries, mu, nu):
    omega = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    b = [entries[0:3], entries[3:6], entries[6:9]]
    M = C.bichar_assoc_map(b, omega, 5)
    Mmu = [sum(M[i][j] * mu[j] for j in range(3)) for i in range(3)]
    lhs = sum(Mmu[i] * omega[i][j] * nu[j] for i in range(3) for j in range(3)) % 5
    rhs = sum(mu[i] * b[i][j] * nu[j] for i in range(3) for j in range(3)) % 5
    assert lhs == rhs
