from fractions import Fraction

import pytest

from conftest import make_case
from qtwist.cartan import solve_eqs
from qtwist import modules as MD
from qtwist import radford as RD
from qtwist import twist as TW
from qtwist import uq_engine as U


A1, A2, A3, A1A2, H = (1, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 0), (0, 1, Fraction(1, 2))


def test_t_map_image_of_unit(a1):
    V = RD.t_map_image(U.tensor_one(a1))
    assert V.dim == 1 and V.contains(U.one(a1).terms)


def test_t_map_image_of_r_is_borel(a1):
    R = U.r_matrix(a1)
    right = RD.t_map_image(R, "right")
    left = RD.t_map_image(R, "left")
    # negative Borel: |G| * l^{|Phi+|} = 9, every vector free of E
    assert right.dim == 9 and all(k[2] == 0 for v in right.vectors() for k in v)
    assert left.dim == 9 and all(k[1] == 0 for v in left.vectors() for k in v)
    for a in (U.F(a1, 0), U.K(a1, (1,))):
        assert right.contains(a.terms)


def test_t_map_image_of_omega_is_group_algebra(a1):
    V = RD.t_map_image(U.omega_tensor(a1))
    assert V.dim == a1.G
    assert all(k[1] == 0 and k[2] == 0 for v in V.vectors() for k in v)


def test_untwisted_radford_product_spans_everything(a1):
    left, right = RD.radford_subalgebras(U.r_matrix(a1))
    products = RD.Subspace(a1, [a1.mul_raw(x, y) for x in left.vectors() for y in right.vectors()])
    assert products.dim == a1.dim()


def test_subspace_equality_is_order_free(a1):
    xs = [U.E(a1, 0).terms, U.F(a1, 0).terms, U.K(a1, (1,)).terms]
    assert RD.Subspace(a1, xs) == RD.Subspace(a1, xs[::-1])
    assert RD.Subspace(a1, xs[:2]) != RD.Subspace(a1, xs)


def test_g_lr_examples(a3_lattices, a2_empty):
    sols = {s.value(A3, A2, 3): s for s in solve_eqs(a3_lattices)}
    gr_q, gl_q = RD.g_lr(sols[1], a3_lattices)
    assert len(gr_q) == len(gl_q) == 9
    assert len(RD.g_lr(sols[0], a3_lattices)[0]) == 27
    # the A2 Cartan pairing has determinant 3, so mod 3 its image is a single line
    assert len(RD.g_lr(a2_empty.sol, a2_empty.ld)[0]) == 3
    for s in sols.values():
        assert RD.g2_in_gr(s, a3_lattices)


def test_s2omega_values(a3_lattices, a2_empty):
    q_sol = next(s for s in solve_eqs(a3_lattices) if s.value(A3, A2, 3) == 1)
    assert RD.s2omega_values(q_sol, a3_lattices, [(A3, A1), (A2, A1), (A1A2, H), (A2, H)]) == [1, 2, 2, 1]
    # with s = 0 the value is the Cartan entry (a2, a1) = -1
    assert RD.s2omega_values(a2_empty.sol, a2_empty.ld, [((0, 1), (1, 0))]) == [2]


def test_parabolic_dimensions(a2_max):
    alg, ld = a2_max.alg, a2_max.ld
    for sigma in ([], [0], [1], [0, 1]):
        for sign in (1, -1):
            P = RD.parabolic(alg, ld, sigma, sign)
            assert P.dims["parabolic"] == P.dims["parabolic_formula"]
    full = RD.parabolic(alg, ld, [0, 1], 1)
    assert full.dims["parabolic"] == alg.dim()
    empty = RD.parabolic(alg, ld, [], -1)
    assert empty.dims["quotient"] == alg.G


def test_parabolic_quotient_is_an_algebra_map(a2_max):
    alg, ld = a2_max.alg, a2_max.ld
    P = RD.parabolic(alg, ld, [1], -1)
    gens = [U.F(alg, 0), U.F(alg, 1), U.E(alg, 1), U.K(alg, (1, 0))]
    assert RD.quotient_is_multiplicative(alg, P, gens)
    with pytest.raises(ValueError):
        RD.quotient_map(P, U.E(alg, 0).terms)


@pytest.mark.parametrize("case", ["a2_max", "a2_empty"])
def test_radford_description_at_a2(case, request):
    tc = request.getfixturevalue(case)
    rep = RD.verify_radford_description(tc.H, tc.ld, tc.sol)
    assert rep.ok, rep.to_json()


def test_maximal_a2_radford_is_full_parabolic(a2_max):
    alg, ld = a2_max.alg, a2_max.ld
    _, right = RD.radford_subalgebras(a2_max.H.r_matrix())
    assert right.dim == RD.parabolic(alg, ld, ld.triple.gamma2, -1).dims["parabolic"]


def test_cartan_route_matches_group_at_a2(a2_max):
    T = RD.twisted_r_cartan_part(a2_max.H)
    assert T == TW.cartan_component(a2_max.H.r_matrix())
    gr, gl = RD.g_lr(a2_max.sol, a2_max.ld)
    assert RD.cartan_image_characters(T, "right") == gr
    assert RD.cartan_image_characters(T, "left") == gl


def test_grouplikes(a2_max, a2_empty):
    assert RD.grouplikes_of_twist(a2_empty.H, a2_empty.ld) == RD.all_characters(a2_empty.ld)
    found = RD.grouplikes_of_twist(a2_max.H, a2_max.ld)
    assert len(found) == 3 and found == RD.l_characters(a2_max.ld)


def test_wedge_filtration_a1():
    tc = make_case("A", 1, 3, {})
    steps = RD.wedge_filtration_steps(tc.H, [], [])
    assert 1 < steps <= RD.wedge_certificate(tc.H, [], []).steps_bound


def test_wedge_certificate_a2(a2_max, a2_empty):
    for tc in (a2_max, a2_empty):
        t = tc.ld.triple
        assert RD.wedge_certificate(tc.H, t.gamma1, t.gamma2).ok


def test_wedge_certificate_rejects_wrong_int(a2_max):
    # Int built from the untwisted C[G], or with the roles of Gamma_1 and Gamma_2 swapped,
    # is not a subcoalgebra for the maximal twist
    assert not RD.wedge_certificate(a2_max.H, [], []).ok
    assert not RD.wedge_certificate(a2_max.H, [1], [0]).ok


def test_lattice_counts(a2_max, a2_empty):
    for tc in (a2_max, a2_empty):
        counts = RD.lattice_counts(tc.alg, tc.ld, tc.sol)
        assert counts.index_product and counts.int_factorizes


def test_semisimple_quotient_sl2(a1):
    sq = RD.semisimple_quotient(a1)
    assert (sq.irreps, sq.dims) == (3, [1, 2, 3])
    assert sq.dim - sq.radical_dim == sum(d * d for d in sq.dims)


def test_semisimple_quotient_against_simple_modules(a1):
    # independent route: the simple heads of the baby Verma modules
    dims = sorted(MD.simple_socle(a1, mu).dim for mu in range(a1.G))
    sq = RD.semisimple_quotient(a1)
    assert sorted(set(dims)) == sq.dims and len(set(dims)) == sq.irreps


def test_census(a2_max, a2_empty):
    got = RD.irrep_census(a2_max.ld)
    assert got.predicted_count == 9 and got.predicted_dims == [1, 1, 1, 2, 2, 2, 3, 3, 3]
    plain = RD.irrep_census(a2_empty.ld)
    assert plain.predicted_count == plain.untwisted_count == 9


def test_census_a3(a3_lattices):
    assert RD.irrep_census(a3_lattices).predicted_count == 27
