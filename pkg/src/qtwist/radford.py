"""Radford subalgebras of twisted R-matrices, parabolics, grouplikes and the dual census.

Group elements of the Cartan part are handled as characters chi of the lattice G: the
element sum_nu q^{chi(nu)} P_nu.  When the form is nondegenerate the character (gamma, .)
is K_gamma; at degenerate (l, type) pairs the characters still give every grouplike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .cartan import BicharSolution, LatticeData, row_space, s2omega_exponent
from .scalars import CycScalar, half_exponent, span_mod
from . import twist as TW
from . import uq_engine as U
from .uq_engine import AlgElement, TensorElement, UqAlgebra, _acc


# -- subspaces ---------------------------------------------------------------------


class Subspace:
    """Echelonised span of sparse P-basis vectors; pivots are the smallest keys."""

    def __init__(self, alg: UqAlgebra, vectors=()):
        self.alg = alg
        self.basis: dict = {}
        for v in vectors:
            self.add(v)

    def reduce(self, vec: dict) -> dict:
        v = {k: x for k, x in vec.items() if x}
        while v:
            lead = min(v)
            b = self.basis.get(lead)
            if b is None:
                # lead is not a pivot: reduce the remaining keys only
                rest = {k: x for k, x in v.items() if k != lead}
                red = self.reduce(rest)
                red[lead] = v[lead]
                return red
            f = v[lead]
            for k, x in b.items():
                y = v.get(k)
                y = -(f * x) if y is None else y - f * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        lead = min(v)
        inv = v[lead].inverse()
        self.basis[lead] = {k: x * inv for k, x in v.items()}
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis.values())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[dict]:
        return list(self.basis.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.dim == other.dim and self.contains_space(other)


@dataclass
class MonomialSpace:
    """Span of a set of P-basis keys (c, f, e)."""

    keys: frozenset

    def contains(self, vec: dict) -> bool:
        return all(k in self.keys for k, x in vec.items() if x)

    @property
    def dim(self) -> int:
        return len(self.keys)


def t_map_image(Q: TensorElement, side: str = "right") -> Subspace:
    """Image of f -> (f (x) 1)(Q) (right) or f -> (1 (x) f)(Q) (left)."""
    fixed, free = (0, 1) if side == "right" else (1, 0)
    coeffs: dict = {}
    for keys, v in Q.terms.items():
        _acc(coeffs.setdefault(keys[fixed], {}), keys[free], v)
    return Subspace(Q.alg, coeffs.values())


def radford_subalgebras(R: TensorElement) -> tuple[Subspace, Subspace]:
    """(R_(l), R_(r))."""
    return t_map_image(R, "left"), t_map_image(R, "right")


def generated_subalgebra(alg: UqAlgebra, gens: list[AlgElement], limit: int | None = None) -> Subspace:
    """Subalgebra generated by gens: close span{1} under right multiplication."""
    V = Subspace(alg, [U.one(alg).terms])
    queue = list(V.vectors())
    while queue:
        v = queue.pop()
        for g in gens:
            w = alg.mul_raw(v, g.terms)
            if w and V.add(w):
                queue.append(w)
                if limit is not None and V.dim > limit:
                    raise OverflowError("generated subalgebra exceeds the size limit")
    return V


def closed_under_products(V: Subspace, gens: list[AlgElement]) -> bool:
    """V g in V for every generator (enough when V contains 1 and lies in <gens>)."""
    alg = V.alg
    return all(V.contains(alg.mul_raw(v, g.terms)) for v in V.vectors() for g in gens)


def tensor_in(V1, V2, X: TensorElement) -> bool:
    """X in V1 (x) V2, tested through the coefficient vectors of both legs."""
    left: dict = {}
    right: dict = {}
    for (k1, k2), v in X.terms.items():
        _acc(right.setdefault(k1, {}), k2, v)
        _acc(left.setdefault(k2, {}), k1, v)
    return all(V2.contains(c) for c in right.values()) and all(V1.contains(c) for c in left.values())


# -- characters and subgroups ---------------------------------------------------------


def character_element(alg: UqAlgebra, chi) -> AlgElement:
    """sum_nu q^{chi(nu)} P_nu."""
    terms = {}
    for c in range(alg.G):
        x = sum(a * b for a, b in zip(chi, alg.cvec[c]))
        terms[(c, 0, 0)] = alg.q(x)
    return AlgElement(alg, terms)


def form_character(ld: LatticeData, gamma) -> tuple[int, ...]:
    """The character (gamma, .) of K_gamma."""
    r = ld.rank
    return tuple(ld.form(gamma, tuple(1 if j == i else 0 for j in range(r))) % ld.l for i in range(r))


def all_characters(ld: LatticeData) -> frozenset:
    return frozenset(product(range(ld.l), repeat=ld.rank))


def kgroup(ld: LatticeData, vectors) -> frozenset:
    """Characters of the K_gamma for gamma in the span of vectors."""
    return span_mod([form_character(ld, v) for v in vectors], ld.l, ld.rank)


def characters_killing(ld: LatticeData, vectors) -> frozenset:
    """Characters vanishing on every given lattice vector."""
    l = ld.l
    return frozenset(
        chi for chi in all_characters(ld) if all(sum(a * b for a, b in zip(chi, v)) % l == 0 for v in vectors)
    )


def simple_vec(r: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(r))


def l_characters(ld: LatticeData) -> frozenset:
    """The grouplike characters predicted by the lattice L: chi(alpha - T alpha) = 0."""
    r = ld.rank
    vecs = [tuple(a - b for a, b in zip(simple_vec(r, i), simple_vec(r, j))) for i, j in ld.triple.tmap.items()]
    return characters_killing(ld, vecs)


def g_lr(sol: BicharSolution, ld: LatticeData) -> tuple[frozenset, frozenset]:
    """(G_(r), G_(l)) as character groups: the images mu -> B(mu, .) and mu -> B(., mu) of S^{-2} Omega."""
    b = s2omega_exponent(ld, sol)
    gr, gl = row_space(b, ld.l, "right"), row_space(b, ld.l, "left")
    if len(gr) != len(gl):
        raise AssertionError("left and right subgroups differ in order")
    return gr, gl


def g2_in_gr(sol: BicharSolution, ld: LatticeData) -> bool:
    gr, _ = g_lr(sol, ld)
    g2 = kgroup(ld, [simple_vec(ld.rank, j) for j in ld.triple.gamma2])
    return g2 <= gr


def _lattice_vec(ld: LatticeData, v) -> tuple[int, ...]:
    """Coordinates mod l, with Fractions (such as 1/2) read through the inverse of 2."""
    out = []
    for x in v:
        if hasattr(x, "denominator") and x.denominator != 1:
            h = half_exponent(1, ld.l) if x.denominator == 2 else pow(x.denominator, -1, ld.l)
            out.append((x.numerator * h) % ld.l)
        else:
            out.append(int(x) % ld.l)
    return tuple(out)


def s2omega_values(sol: BicharSolution, ld: LatticeData, pairs) -> list[int]:
    """Exponents of S^{-2} Omega on the given argument pairs (q-powers mod l)."""
    b = s2omega_exponent(ld, sol)
    out = []
    for x, y in pairs:
        xv, yv = _lattice_vec(ld, x), _lattice_vec(ld, y)
        out.append(sum(xv[i] * b[i][j] * yv[j] for i in range(ld.rank) for j in range(ld.rank)) % ld.l)
    return out


# -- parabolics ------------------------------------------------------------------------


def _root_in_span(root, sigma) -> bool:
    return all(c == 0 or i in sigma for i, c in enumerate(root))


@dataclass
class ParabolicDescriptor:
    sigma: frozenset
    sign: int
    space: MonomialSpace
    quotient_keys: frozenset
    sub_roots: list
    perp_group: frozenset
    dims: dict = field(default_factory=dict)


def _mono_support(alg: UqAlgebra, m: int) -> list[int]:
    return [k for k, x in enumerate(alg.mexp[m]) if x]


def parabolic(alg: UqAlgebra, ld: LatticeData, sigma, sign: int) -> ParabolicDescriptor:
    """u_q(p) for the subdiagram sigma: sign +1 keeps all E and the F in Z sigma; -1 mirrors."""
    sigma = frozenset(sigma)
    inside = [_root_in_span(b, sigma) for b in alg.roots]
    keys = []
    qkeys = []
    for c in range(alg.G):
        for f in range(alg.nmono):
            f_in = all(inside[k] for k in _mono_support(alg, f))
            for e in range(alg.nmono):
                e_in = all(inside[k] for k in _mono_support(alg, e))
                if (sign > 0 and f_in) or (sign < 0 and e_in):
                    keys.append((c, f, e))
                    if f_in and e_in:
                        qkeys.append((c, f, e))
    r = ld.rank
    g_sigma = kgroup(ld, [simple_vec(r, i) for i in sigma])
    perp = characters_killing(ld, [simple_vec(r, i) for i in sigma])
    n_sub = sum(inside)
    d = {
        "parabolic": len(keys),
        "parabolic_formula": alg.G * alg.l ** alg.N * alg.l**n_sub,
        "quotient": len(qkeys),
        "target": len(perp) * len(g_sigma) * alg.l ** (2 * n_sub) if len(perp) * len(g_sigma) == alg.G else None,
        "complement": len(perp) * len(g_sigma) == alg.G and len(perp & g_sigma) == 1,
    }
    return ParabolicDescriptor(sigma, sign, MonomialSpace(frozenset(keys)), frozenset(qkeys),
                               [b for b, ok in zip(alg.roots, inside) if ok], perp, d)


def quotient_map(P: ParabolicDescriptor, x: dict) -> dict:
    """The surjection u_q(p) -> u_q(p)/N on P-basis vectors (drops monomials in N)."""
    if not P.space.contains(x):
        raise ValueError("element is not in the parabolic")
    return {k: v for k, v in x.items() if k in P.quotient_keys}


def quotient_is_multiplicative(alg: UqAlgebra, P: ParabolicDescriptor, gens: list[AlgElement]) -> bool:
    """pi(x g) = pi(pi(x) g) for basis monomials x of u_q(p) and generators g in u_q(p).

    This is the statement that N is a two-sided ideal of u_q(p) closed under the generators,
    which makes the monomial projection an algebra map.
    """
    one = alg.F.one
    for k in P.space.keys:
        x = {k: one}
        for g in gens:
            if not P.space.contains(g.terms):
                raise ValueError("generator outside the parabolic")
            lhs = quotient_map(P, alg.mul_raw(x, g.terms))
            rhs = quotient_map(P, alg.mul_raw(quotient_map(P, x), g.terms))
            if lhs != rhs:
                return False
    return True


# -- Radford description ---------------------------------------------------------------


def described_span(alg: UqAlgebra, ld: LatticeData, group: frozenset, e_roots, f_roots, sign: int = 1) -> Subspace:
    """C<group, bold E_b (b in e_roots), bold F_b (b in f_roots)> with simple-root indices."""
    bold = U.bold_generators(alg, ld, sign)
    pos = {alg.rs.simple(i): k for k, b in enumerate(alg.roots) for i in range(alg.r) if b == alg.rs.simple(i)}
    gens = [character_element(alg, chi) for chi in _group_generators(group, ld.l)]
    gens += [bold[("E", pos[alg.rs.simple(i)])] for i in e_roots]
    gens += [bold[("F", pos[alg.rs.simple(i)])] for i in f_roots]
    return generated_subalgebra(alg, gens)


def _group_generators(group: frozenset, l: int) -> list:
    gens: list = []
    span: frozenset = frozenset([tuple(0 for _ in next(iter(group)))])
    for g in sorted(group):
        if g not in span:
            gens.append(g)
            span = span_mod(gens, l, len(g))
    return gens


@dataclass
class RadfordReport:
    dim_right: int
    dim_left: int
    formula_right: int
    formula_left: int
    right_equal: bool
    left_equal: bool
    right_in_parabolic: bool
    left_in_parabolic: bool
    right_closed: bool
    left_closed: bool
    group_right: int
    group_left: int

    @property
    def ok(self) -> bool:
        return (self.right_equal and self.left_equal and self.right_in_parabolic and self.left_in_parabolic
                and self.dim_right == self.formula_right and self.dim_left == self.formula_left
                and self.right_closed and self.left_closed)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def _positive_roots_in(alg: UqAlgebra, sigma) -> int:
    return sum(1 for b in alg.roots if _root_in_span(b, frozenset(sigma)))


def verify_radford_description(H: TW.TwistedHopf, ld: LatticeData, sol: BicharSolution, bold_sign: int = 1) -> RadfordReport:
    """Compute R^J_(r), R^J_(l) from the expanded R^J and compare with the generated spans."""
    alg = H.alg
    RJ = H.r_matrix()
    left, right = radford_subalgebras(RJ)
    gr, gl = g_lr(sol, ld)
    g1, g2 = ld.triple.gamma1, ld.triple.gamma2
    allg = range(alg.r)
    want_r = described_span(alg, ld, gr, g2, allg, bold_sign)
    want_l = described_span(alg, ld, gl, allg, g1, bold_sign)
    p2 = parabolic(alg, ld, g2, -1)
    p1 = parabolic(alg, ld, g1, +1)
    fr = len(gr) * alg.l ** alg.N * alg.l ** _positive_roots_in(alg, g2)
    fl = len(gl) * alg.l ** alg.N * alg.l ** _positive_roots_in(alg, g1)
    return RadfordReport(
        dim_right=right.dim, dim_left=left.dim, formula_right=fr, formula_left=fl,
        right_equal=right == want_r, left_equal=left == want_l,
        right_in_parabolic=all(p2.space.contains(v) for v in right.vectors()),
        left_in_parabolic=all(p1.space.contains(v) for v in left.vectors()),
        right_closed=_closed(right), left_closed=_closed(left),
        group_right=len(gr), group_left=len(gl),
    )


def _closed(V: Subspace) -> bool:
    """Closure of V under multiplication by its own algebra generators of degree <= 1."""
    alg = V.alg
    low = [v for v in V.vectors() if all(sum(alg.mexp[f]) + sum(alg.mexp[e]) <= 1 for (_, f, e) in v)]
    return closed_under_products(V, [AlgElement(alg, v) for v in low])


# -- the group part at scale ---------------------------------------------------------


def twisted_r_cartan_part(H: TW.TwistedHopf) -> TensorElement:
    """Cartan component of R^J, from the Cartan components of J_21^{-1}, R and J.

    A product b r j of nilpotent parts has degree zero only when every factor does:
    the J-legs carry degrees in N Gamma_1 on one side and their T-images on the other,
    and T has no nonzero fixed vector there.
    """
    alg = H.alg
    C = TW.cartan_component
    return C(H.Jinv).flip() * U.omega_tensor(alg, -1) * C(H.J)


def cartan_image_characters(T: TensorElement, side: str = "right") -> frozenset:
    """Characters whose group element lies in the span of the right (or left) legs of T.

    For the Cartan part of an R-matrix that span is a group algebra, so the result is the
    group itself, found without reference to any bicharacter.
    """
    alg = T.alg
    V = t_map_image(T, side)
    found = frozenset(
        chi for chi in product(range(alg.l), repeat=alg.r) if V.contains(character_element(alg, chi).terms)
    )
    if len(found) != V.dim:
        raise ValueError("leg span is not a group algebra")
    return found


# -- grouplikes ----------------------------------------------------------------------


def grouplikes_of_twist(H: TW.TwistedHopf, ld: LatticeData) -> frozenset:
    """Characters chi with Delta^J(g_chi) = g_chi (x) g_chi."""
    alg = H.alg
    out = []
    for chi in sorted(all_characters(ld)):
        g = character_element(alg, chi)
        gg = U.tensor(g, g)
        if gg * H.J == H.J * gg:
            out.append(chi)
    return frozenset(out)


# -- Int, the wedge filtration and lattice bookkeeping ------------------------------------


def _outside_degree(alg: UqAlgebra, m: int, keep) -> int:
    return sum(x * sum(c for i, c in enumerate(alg.roots[k]) if i not in keep) for k, x in enumerate(alg.mexp[m]))


def filtration_degree(alg: UqAlgebra, key, g1, g2) -> int:
    """Number of simple letters outside Int: F-letters off Gamma_1, E-letters off Gamma_2."""
    _, f, e = key
    return _outside_degree(alg, f, g1) + _outside_degree(alg, e, g2)


def int_space(alg: UqAlgebra, g1, g2) -> MonomialSpace:
    keys = [
        (c, f, e)
        for c in range(alg.G)
        for f in range(alg.nmono)
        if _outside_degree(alg, f, g1) == 0
        for e in range(alg.nmono)
        if _outside_degree(alg, e, g2) == 0
    ]
    return MonomialSpace(frozenset(keys))


@dataclass
class WedgeCertificate:
    generators_filtered: bool
    int_is_subcoalgebra: bool
    max_degree: int
    steps_bound: int

    @property
    def ok(self) -> bool:
        return self.generators_filtered and self.int_is_subcoalgebra

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def wedge_certificate(H: TW.TwistedHopf, g1, g2) -> WedgeCertificate:
    """Certify that the wedge filtration from Int exhausts u_q^J.

    Give E_a degree 0 for a in Gamma_2 and 1 otherwise, F_b degree 0 for b in Gamma_1 and
    1 otherwise, the Cartan part degree 0.  The span H_n of words of degree <= n is the span
    of PBW monomials with at most n outside letters, H_0 = Int, and H_n H_m lies in H_{n+m}.
    If Delta^J of every generator has total degree at most its own, Delta^J is filtered and
    H_n lies in the (n+1)-fold wedge of Int, so the filtration reaches u_q after at most
    max_degree + 1 steps.
    """
    alg = H.alg
    g1, g2 = frozenset(g1), frozenset(g2)
    gens = []
    for a in range(alg.r):
        gens.append((U.E(alg, a), 0 if a in g2 else 1))
        gens.append((U.F(alg, a), 0 if a in g1 else 1))
    for c in range(alg.G):
        gens.append((AlgElement(alg, {(c, 0, 0): alg.F.one}), 0))
    filtered = True
    sub = True
    for x, d in gens:
        D = H.coproduct(x)
        for (k1, k2) in D.terms:
            d1 = filtration_degree(alg, k1, g1, g2)
            d2 = filtration_degree(alg, k2, g1, g2)
            if d1 + d2 > d:
                filtered = False
            if d == 0 and (d1 or d2):
                sub = False
    top = filtration_degree(alg, (0, alg.nmono - 1, alg.nmono - 1), g1, g2)
    return WedgeCertificate(filtered, sub, top, top + 1)


def wedge_filtration_steps(H: TW.TwistedHopf, g1, g2, max_steps: int = 64) -> int:
    """Run the wedge filtration X_{k+1} = Delta^J^{-1}(X_k (x) H + H (x) Int) explicitly.

    Only for small algebras: every basis monomial's twisted coproduct is expanded.  Returns
    the number of steps until X_k is everything.
    """
    alg = H.alg
    Int = int_space(alg, frozenset(g1), frozenset(g2))
    one = alg.F.one
    basis = [(c, f, e) for c in range(alg.G) for f in range(alg.nmono) for e in range(alg.nmono)]
    D = {k: H.coproduct(AlgElement(alg, {k: one})).terms for k in basis}
    current = Subspace(alg, [{k: one} for k in Int.keys])
    steps = 1
    total = len(basis)
    while current.dim < total:
        if steps > max_steps:
            raise RuntimeError("wedge filtration did not exhaust the algebra")
        # h in X_{k+1} iff (pi_k (x) pi_Int)(Delta^J h) = 0; solve the linear system on the basis
        images = []
        for k in basis:
            img: dict = {}
            for (k1, k2), v in D[k].items():
                if k2 in Int.keys:
                    continue
                r1 = current.reduce({k1: one})
                for a, x in r1.items():
                    _acc(img, (a, k2), v * x)
            images.append(img)
        nxt = Subspace(alg, _kernel(images, basis, alg))
        steps += 1
        if nxt.dim <= current.dim:
            raise RuntimeError("wedge filtration stalled")
        current = nxt
    return steps


def _kernel(images: list[dict], basis: list, alg: UqAlgebra) -> list[dict]:
    """Kernel of the linear map basis[i] -> images[i], as sparse vectors over basis keys."""
    ech: dict = {}
    kernel = []
    for i, img in enumerate(images):
        v = dict(img)
        combo = {basis[i]: alg.F.one}
        while v:
            lead = min(v)
            hit = ech.get(lead)
            if hit is None:
                inv = v[lead].inverse()
                ech[lead] = ({k: x * inv for k, x in v.items()}, {k: x * inv for k, x in combo.items()})
                break
            bv, bc = hit
            f = v[lead]
            for k, x in bv.items():
                y = v.get(k)
                y = -(f * x) if y is None else y - f * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
            for k, x in bc.items():
                y = combo.get(k)
                y = -(f * x) if y is None else y - f * x
                if y:
                    combo[k] = y
                else:
                    combo.pop(k, None)
        else:
            kernel.append(combo)
    return kernel


@dataclass
class LatticeCounts:
    L: int
    Lambda: int
    C: int
    G: int
    G_l: int
    int_dim: int
    a_dim: int

    @property
    def index_product(self) -> bool:
        return self.Lambda * self.C == self.L

    @property
    def int_factorizes(self) -> bool:
        return self.int_dim == self.C * self.a_dim

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d.update(index_product=self.index_product, int_factorizes=self.int_factorizes)
        return d


def lattice_counts(alg: UqAlgebra, ld: LatticeData, sol: BicharSolution) -> LatticeCounts:
    """|Lambda| |C| = |L| with Lambda = G_(r) meet G_2^perp and C = L / (G_(l) meet L),
    and dim Int = |C| dim A for A = C<G_(l), E_Gamma2, F_Gamma1>."""
    r = ld.rank
    gr, gl = g_lr(sol, ld)
    L = l_characters(ld)
    g2perp = characters_killing(ld, [simple_vec(r, j) for j in ld.triple.gamma2])
    lam = gr & g2perp
    c_order = len(L) // len(gl & L)
    n1 = _positive_roots_in(alg, ld.triple.gamma1)
    n2 = _positive_roots_in(alg, ld.triple.gamma2)
    int_dim = alg.G * alg.l ** (n1 + n2)
    a_dim = len(gl) * alg.l ** (n1 + n2)
    return LatticeCounts(len(L), len(lam), c_order, alg.G, len(gl), int_dim, a_dim)


# -- irreducible representations via the radical quotient ----------------------------------


def _structure(alg: UqAlgebra):
    one = alg.F.one
    basis = [(c, f, e) for c in range(alg.G) for f in range(alg.nmono) for e in range(alg.nmono)]
    index = {k: i for i, k in enumerate(basis)}
    table = {}
    for a in basis:
        for b in basis:
            table[(a, b)] = {index[k]: v for k, v in alg.mul_raw({a: one}, {b: one}).items()}
    return basis, index, table


def _mat_nullspace(rows: list[list[CycScalar]], ncols: int, F) -> list[list[CycScalar]]:
    """Right null space of a dense matrix."""
    m = [list(r) for r in rows]
    piv_cols = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in piv_cols]
    out = []
    for fc in free:
        v = [F.zero] * ncols
        v[fc] = F.one
        for i, pc in enumerate(piv_cols):
            v[pc] = -m[i][fc]
        out.append(v)
    return out


def _poly_trim(p):
    while p and not p[-1]:
        p = p[:-1]
    return p


def _poly_divmod(a, b, F):
    a = list(a)
    b = _poly_trim(list(b))
    q = [F.zero] * max(len(a) - len(b) + 1, 1)
    inv = b[-1].inverse()
    while len(_poly_trim(a)) >= len(b):
        a = _poly_trim(a)
        shift = len(a) - len(b)
        f = a[-1] * inv
        q[shift] = f
        for i, x in enumerate(b):
            a[i + shift] = a[i + shift] - f * x
        a = _poly_trim(a)
    return q, _poly_trim(a)


def _poly_gcd(a, b, F):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        _, r = _poly_divmod(a, b, F)
        a, b = b, r
    inv = a[-1].inverse()
    return [x * inv for x in a]


def _poly_deriv(p, F):
    return _poly_trim([p[i] * F.from_int(i) for i in range(1, len(p))])


def _charpoly(M: list[list[CycScalar]], F) -> list[CycScalar]:
    """Characteristic polynomial (coefficients low to high) by Faddeev-LeVerrier."""
    n = len(M)
    I = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]

    def mul(A, B):
        return [[sum((A[i][k] * B[k][j] for k in range(n) if A[i][k] and B[k][j]), F.zero) for j in range(n)]
                for i in range(n)]

    coeffs = [F.zero] * (n + 1)
    coeffs[n] = F.one
    Mk = [[F.zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        Mk = [[Mk[i][j] + (I[i][j] * coeffs[n - k + 1]) for j in range(n)] for i in range(n)]
        Mk = mul(M, Mk)
        tr = sum((Mk[i][i] for i in range(n)), F.zero)
        coeffs[n - k] = -(tr / F.from_int(k))
    return coeffs


def _squarefree_multiplicities(p, F) -> dict[int, int]:
    """{multiplicity: number of distinct roots} by Yun's algorithm."""
    out: dict[int, int] = {}
    a = _poly_trim(list(p))
    d = _poly_deriv(a, F)
    g = _poly_gcd(a, d, F)
    b, _ = _poly_divmod(a, g, F)
    c, _ = _poly_divmod(d, g, F)
    i = 1
    while len(_poly_trim(b)) > 1:
        bd = _poly_deriv(b, F)
        diff = _poly_trim([x - y for x, y in _zip_pad(c, bd, F)])
        ai = _poly_gcd(b, diff, F) if diff else _poly_trim(list(b))
        deg = len(ai) - 1
        if deg:
            out[i] = deg
        b, _ = _poly_divmod(b, ai, F)
        c, _ = _poly_divmod(diff, ai, F) if diff else ([F.zero], [])
        i += 1
    return out


def _zip_pad(a, b, F):
    n = max(len(a), len(b))
    a = list(a) + [F.zero] * (n - len(a))
    b = list(b) + [F.zero] * (n - len(b))
    return zip(a, b)


@dataclass
class SemisimpleQuotient:
    dim: int
    radical_dim: int
    irreps: int
    dims: list[int]

    def to_json(self) -> dict:
        return dict(self.__dict__)


def semisimple_quotient(alg: UqAlgebra, generic_seed: int = 1) -> SemisimpleQuotient:
    """Jacobson radical via the trace form, the center of A/rad, and simple dimensions from
    the multiplicities of a generic central element's characteristic polynomial."""
    F = alg.F
    basis, index, table = _structure(alg)
    n = len(basis)

    # trace form T_ij = tr(L_{b_i b_j})
    tr_basis = []
    for i in range(n):
        t = F.zero
        for j in range(n):
            t = t + table[(basis[i], basis[j])].get(j, F.zero)
        tr_basis.append(t)
    T = [[sum((v * tr_basis[k] for k, v in table[(basis[i], basis[j])].items()), F.zero) for j in range(n)]
         for i in range(n)]
    rad = _mat_nullspace(T, n, F)
    # quotient coordinates: complement of the radical by echelon pivots
    radsp = Subspace(alg, [{basis[i]: x for i, x in enumerate(v) if x} for v in rad])
    comp = [i for i in range(n) if basis[i] not in radsp.basis]
    qdim = len(comp)

    def qcoords(vec: dict) -> list[CycScalar]:
        red = radsp.reduce(vec)
        return [red.get(basis[i], F.zero) for i in comp]

    # center of the quotient: z with [z, b] in rad for all b
    rows = []
    for j in comp:
        # map z -> z b_j - b_j z, z ranging over comp basis
        cols = []
        for i in comp:
            zb = table[(basis[i], basis[j])]
            bz = table[(basis[j], basis[i])]
            diff: dict = {}
            for k, v in zb.items():
                _acc(diff, basis[k], v)
            for k, v in bz.items():
                _acc(diff, basis[k], -v)
            cols.append(qcoords(diff))
        for r in range(qdim):
            rows.append([cols[c][r] for c in range(qdim)])
    center = _mat_nullspace(rows, qdim, F)
    n_irr = len(center)
    # generic central element and its action on the quotient
    z = {}
    for t, v in enumerate(center):
        w = F.from_int(generic_seed + 3 * t + 1) + F.q(t + 1)
        for c, x in enumerate(v):
            if x:
                _acc(z, basis[comp[c]], w * x)
    M = []
    for i in comp:
        img: dict = {}
        for k, v in z.items():
            for kk, vv in table[(k, basis[i])].items():
                _acc(img, basis[kk], v * vv)
        M.append(qcoords(img))
    Mt = [[M[j][i] for j in range(qdim)] for i in range(qdim)]
    mult = _squarefree_multiplicities(_charpoly(Mt, F), F)
    dims = []
    for m, count in sorted(mult.items()):
        d = int(round(m**0.5))
        if d * d != m:
            raise ArithmeticError("central element is not generic enough: non-square multiplicity")
        dims += [d] * count
    if len(dims) != n_irr:
        raise ArithmeticError("central element does not separate the blocks")
    return SemisimpleQuotient(n, n - qdim, n_irr, sorted(dims))


@dataclass
class Census:
    lattice_L: int
    pss_irreps: int
    pss_dims: list[int]
    predicted_count: int
    predicted_dims: list[int]
    untwisted_count: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def gamma1_components(ld: LatticeData) -> list[list[int]]:
    """Connected components of the subdiagram Gamma_1."""
    nodes = set(ld.triple.gamma1)
    rs = ld.rs
    comps = []
    while nodes:
        stack = [nodes.pop()]
        comp = []
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in list(nodes):
                if rs.form(rs.simple(i), rs.simple(j)) != 0:
                    nodes.discard(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return sorted(comps)


def irrep_census(ld: LatticeData, factor_oracle=None) -> Census:
    """#Irrep((u_q^J)^*) = |L| #Irrep(u_q(p^ss)), p^ss the semisimple algebra on Gamma_1.

    Each connected component of Gamma_1 contributes a tensor factor; components of rank one
    go through the radical-quotient oracle on u_q(sl_2).  Larger components are beyond the
    dense linear algebra used here.
    """
    comps = gamma1_components(ld)
    if any(len(c) > 1 for c in comps):
        raise NotImplementedError("census oracle only handles rank-one components of Gamma_1")
    if factor_oracle is None and comps:
        factor_oracle = semisimple_quotient(U.algebra_for("A", 1, ld.l))
    count, dims = 1, [1]
    for _ in comps:
        count *= factor_oracle.irreps
        dims = sorted(a * b for a in dims for b in factor_oracle.dims)
    L = l_characters(ld)
    return Census(
        lattice_L=len(L),
        pss_irreps=count,
        pss_dims=dims,
        predicted_count=len(L) * count,
        predicted_dims=sorted(dims * len(L)),
        untwisted_count=ld.l**ld.rank,
    )
