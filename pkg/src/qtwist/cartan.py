"""Root systems, Belavin-Drinfeld triples, lattice data over Z/lZ and the EQ-S solver."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd

from .scalars import (
    ConfigError,
    canonical_generators,
    det_int,
    inverse_mod,
    matmul_mod,
    smith_normal_form,
    solve_mod_l,
    span_mod,
)

Vec = tuple[int, ...]

MAX_RANK = {"A": 4, "D": 4}


def cartan_matrix(typ: str, rank: int) -> tuple[tuple[int, ...], ...]:
    typ = typ.upper()
    C = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        C[i][i] = 2
    if typ == "A":
        for i in range(rank - 1):
            C[i][i + 1] = C[i + 1][i] = -1
    elif typ == "D":
        if rank < 4:
            raise ConfigError("type D needs rank >= 4")
        for i in range(rank - 2):
            C[i][i + 1] = C[i + 1][i] = -1
        C[rank - 3][rank - 1] = C[rank - 1][rank - 3] = -1
    elif typ == "E":
        if rank not in (6, 7, 8):
            raise ConfigError("type E needs rank 6, 7 or 8")
        # Bourbaki labelling: 1-3-4-5-6(-7-8), 2 attached to 4
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(i, i + 1) for i in range(4, rank - 1)]
        for i, j in edges:
            C[i][j] = C[j][i] = -1
    else:
        raise ConfigError(f"unsupported type {typ!r}; only simply laced A/D/E")
    return tuple(tuple(r) for r in C)


@dataclass(frozen=True)
class RootSystem:
    type: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    positive_roots: tuple[Vec, ...]
    reduced_word: tuple[int, ...]
    convex_order: tuple[Vec, ...]

    def form(self, x, y) -> int:
        """Integer value of the symmetric form (x, y) in simple-root coordinates."""
        C = self.cartan
        return sum(x[i] * C[i][j] * y[j] for i in range(self.rank) if x[i] for j in range(self.rank) if y[j])

    def reflect(self, i: int, v) -> Vec:
        c = sum(v[j] * self.cartan[j][i] for j in range(self.rank))
        return tuple(v[j] - (c if j == i else 0) for j in range(self.rank))

    def simple(self, i: int) -> Vec:
        return tuple(int(j == i) for j in range(self.rank))

    @property
    def rho(self) -> Vec:
        """Sum of the positive roots (twice the Weyl vector)."""
        return tuple(sum(r[i] for r in self.positive_roots) for i in range(self.rank))

    def height(self, v) -> int:
        return sum(v)


def build_root_system(typ: str, rank: int, desk_scale: bool = True) -> RootSystem:
    typ = typ.upper()
    if typ not in ("A", "D", "E"):
        raise ConfigError(f"unsupported type {typ!r}")
    if rank < 1:
        raise ConfigError("rank must be positive")
    if desk_scale:
        if typ == "E":
            raise ConfigError("type E is beyond desk scale")
        if rank > MAX_RANK[typ]:
            raise ConfigError(f"{typ}{rank} is beyond desk scale (max rank {MAX_RANK[typ]})")
    C = cartan_matrix(typ, rank)
    proto = RootSystem(typ, rank, C, (), (), ())
    # positive roots by reflection closure of the simple roots
    roots = {proto.simple(i) for i in range(rank)}
    frontier = list(roots)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(rank):
                w = proto.reflect(i, v)
                if all(x >= 0 for x in w) and any(w) and w not in roots:
                    roots.add(w)
                    nxt.append(w)
        frontier = nxt
    pos = tuple(sorted(roots, key=lambda v: (sum(v), tuple(-x for x in v))))
    # greedy descent: walk a regular dominant weight to the antidominant chamber
    lam = [1] * rank  # fundamental-weight coordinates
    word = []
    while True:
        i = next((k for k in range(rank) if lam[k] > 0), None)
        if i is None:
            break
        c = lam[i]
        lam = [lam[j] - c * C[i][j] for j in range(rank)]
        word.append(i)
    order = []
    for k, a in enumerate(word):
        v = proto.simple(a)
        for b in reversed(word[:k]):
            v = proto.reflect(b, v)
        order.append(v)
    if len(word) != len(pos) or set(order) != set(pos):
        raise RuntimeError("greedy descent did not produce a reduced word for the longest element")
    return RootSystem(typ, rank, C, pos, tuple(word), tuple(order))


# ---------------------------------------------------------------------------
# Belavin-Drinfeld triples


@dataclass(frozen=True)
class BDTriple:
    gamma1: tuple[int, ...]
    gamma2: tuple[int, ...]
    T: tuple[tuple[int, int], ...]  # sorted pairs (i, T(i)), 0-based

    @property
    def tmap(self) -> dict[int, int]:
        return dict(self.T)

    @property
    def tinv(self) -> dict[int, int]:
        return {j: i for i, j in self.T}

    def is_empty(self) -> bool:
        return not self.T

    def to_json(self) -> dict:
        return {
            "gamma1": [i + 1 for i in self.gamma1],
            "gamma2": [i + 1 for i in self.gamma2],
            "T": {str(i + 1): j + 1 for i, j in self.T},
        }

    @staticmethod
    def from_json(data: dict) -> "BDTriple":
        pairs = tuple(sorted((int(i) - 1, int(j) - 1) for i, j in data["T"].items()))
        return make_triple(pairs)

    def __str__(self) -> str:
        if not self.T:
            return "empty"
        return ", ".join(f"a{i + 1}->a{j + 1}" for i, j in self.T)


def make_triple(pairs) -> BDTriple:
    pairs = tuple(sorted((int(i), int(j)) for i, j in (pairs.items() if isinstance(pairs, dict) else pairs)))
    return BDTriple(tuple(i for i, _ in pairs), tuple(sorted(j for _, j in pairs)), pairs)


def triple_is_valid(rs: RootSystem, t: BDTriple) -> bool:
    T = t.tmap
    if len(set(T.values())) != len(T):
        return False
    for a in T:
        for b in T:
            if rs.cartan[T[a]][T[b]] != rs.cartan[a][b]:
                return False
    for a in T:
        seen = set()
        x = a
        while x in T:
            if x in seen:
                return False
            seen.add(x)
            x = T[x]
    return True


def enumerate_bd_triples(rs: RootSystem) -> list[BDTriple]:
    """All BD triples on rs, including the empty one, in a deterministic order."""
    out = []
    idx = range(rs.rank)
    for k in range(rs.rank):
        for g1 in itertools.combinations(idx, k):
            for g2 in itertools.combinations(idx, k):
                for perm in itertools.permutations(g2):
                    t = make_triple(zip(g1, perm))
                    if triple_is_valid(rs, t):
                        out.append(t)
    return out


def maximal_triple(rank: int) -> BDTriple:
    return make_triple((i, i + 1) for i in range(rank - 1))


def nilpotence_degree(t: BDTriple) -> int:
    """Least n >= 1 with T^n leaving Gamma_1 on every simple root."""
    T = t.tmap
    n = 1
    for a in T:
        k, x = 0, a
        while x in T:
            x = T[x]
            k += 1
        n = max(n, k + 1)
    return n


# ---------------------------------------------------------------------------
# lattice data


def integer_perp(rs: RootSystem, vectors) -> list[Vec]:
    """Basis of the saturated sublattice {v in Z^r : (x, v) = 0 for all x}."""
    r = rs.rank
    rows = [[sum(x[i] * rs.cartan[i][j] for i in range(r)) for j in range(r)] for x in vectors if any(x)]
    if not rows:
        return [rs.simple(i) for i in range(r)]
    U, D, V = smith_normal_form(rows)
    rank = sum(1 for i in range(min(len(rows), r)) if D[i][i])
    return [tuple(V[i][j] for i in range(r)) for j in range(rank, r)]


def integer_span_basis(rs: RootSystem, vectors) -> list[Vec]:
    """Basis of the saturation of the integer span of vectors."""
    perp = integer_perp_plain(rs.rank, vectors)
    return integer_perp_plain(rs.rank, perp)


def integer_perp_plain(r: int, vectors) -> list[Vec]:
    rows = [list(x) for x in vectors if any(x)]
    if not rows:
        return [tuple(int(i == j) for i in range(r)) for j in range(r)]
    U, D, V = smith_normal_form(rows)
    rank = sum(1 for i in range(min(len(rows), r)) if D[i][i])
    return [tuple(V[i][j] for i in range(r)) for j in range(rank, r)]


def mod_perp(omega, gens, l: int, r: int) -> frozenset:
    """{v : omega(x, v) = 0 mod l for x in gens}."""
    rows = [[sum(x[i] * omega[i][j] for i in range(r)) % l for j in range(r)] for x in gens]
    if not rows:
        return span_mod([tuple(int(i == j) for i in range(r)) for j in range(r)], l, r)
    x, ker = solve_mod_l(rows, [0] * len(rows), l)
    return span_mod(ker, l, r)


@dataclass
class Admissibility:
    ok: bool
    reasons: list[str] = field(default_factory=list)
    determinants: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _gram_det(rs: RootSystem, A, B) -> int:
    return det_int([[rs.form(a, b) for b in B] for a in A])


def _splits(A: list, B: list, l: int, r: int) -> bool:
    if len(A) + len(B) != r:
        return False
    M = [[v[i] for v in list(A) + list(B)] for i in range(r)]
    return gcd(det_int(M), l) == 1


def check_l_admissible(rs: RootSystem, t: BDTriple, l: int) -> Admissibility:
    """Decide whether the lattice constructions for (rs, t) are well defined mod l.

    Hard requirements: l odd, Gamma_1/Gamma_2 forms nondegenerate mod l, and the
    integral splittings G = L + L^perp = G_1 + L.  The classical conditions (l coprime
    to det Cartan, nondegenerate form on span{a - Ta}) are reported as diagnostics.
    """
    reasons: list[str] = []
    dets: dict = {}
    r = rs.rank
    if l % 2 == 0:
        return Admissibility(False, [f"l={l} is even"], dets)
    if l < 3:
        return Admissibility(False, [f"l={l} too small"], dets)
    if not triple_is_valid(rs, t):
        return Admissibility(False, ["invalid BD triple"], dets)
    T = t.tmap
    diffs = [tuple(a - b for a, b in zip(rs.simple(i), rs.simple(T[i]))) for i in t.gamma1]
    dets["cartan"] = det_int([list(row) for row in rs.cartan])
    dets["span_a_minus_Ta"] = _gram_det(rs, diffs, diffs)
    ok = True
    for name, idx in (("G1", t.gamma1), ("G2", t.gamma2)):
        basis = [rs.simple(i) for i in idx]
        d = _gram_det(rs, basis, basis)
        dets[name] = d
        if gcd(d, l) != 1:
            ok = False
            reasons.append(f"form on {name} degenerate mod {l} (det {d})")
    L = integer_perp(rs, diffs)
    Lp = integer_span_basis(rs, diffs)
    if not _splits(L, Lp, l, r):
        ok = False
        reasons.append("L and L^perp do not split G")
    if not _splits([rs.simple(i) for i in t.gamma1], L, l, r):
        ok = False
        reasons.append("G1 and L do not split G")
    if gcd(dets["cartan"], l) != 1:
        reasons.append(f"note: l shares a factor with det Cartan = {dets['cartan']} (form degenerate on G)")
    if diffs and gcd(dets["span_a_minus_Ta"], l) != 1:
        reasons.append("note: form degenerate on span{a - Ta}; L taken as the integral perp")
    return Admissibility(ok, reasons, dets)


@dataclass(frozen=True)
class LatticeData:
    rs: RootSystem
    triple: BDTriple
    l: int
    omega: tuple[tuple[int, ...], ...]
    L: tuple[Vec, ...]
    Lperp: tuple[Vec, ...]
    G1: tuple[Vec, ...]
    G2: tuple[Vec, ...]
    G1perp: tuple[Vec, ...]
    G2perp: tuple[Vec, ...]
    T_ext: tuple[tuple[int, ...], ...]
    rho: Vec
    proj_L: tuple[tuple[int, ...], ...]  # matrix of the projection G -> L along L^perp

    @property
    def rank(self) -> int:
        return self.rs.rank

    def form(self, x, y) -> int:
        r = self.rank
        return sum(x[i] * self.omega[i][j] * y[j] for i in range(r) for j in range(r)) % self.l

    def elements(self, name: str) -> frozenset:
        return span_mod(getattr(self, name), self.l, self.rank)

    def apply(self, M, v) -> Vec:
        return tuple(sum(M[i][j] * v[j] for j in range(self.rank)) % self.l for i in range(self.rank))

    def bar(self, v) -> Vec:
        return self.apply(self.proj_L, v)

    def perp_part(self, v) -> Vec:
        b = self.bar(v)
        return tuple((x - y) % self.l for x, y in zip(v, b))

    def t_power(self, k: int):
        """Matrix of T_ext^k (k may be negative)."""
        r, l = self.rank, self.l
        M = [[int(i == j) for j in range(r)] for i in range(r)]
        base = self.T_ext if k >= 0 else inverse_mod(self.T_ext, l)
        for _ in range(abs(k)):
            M = matmul_mod(base, M, l)
        return tuple(tuple(row) for row in M)


def compute_lattices(rs: RootSystem, t: BDTriple, l: int) -> LatticeData:
    adm = check_l_admissible(rs, t, l)
    if not adm:
        raise ConfigError("inadmissible l: " + "; ".join(adm.reasons))
    r = rs.rank
    T = t.tmap
    omega = tuple(tuple(x % l for x in row) for row in rs.cartan)
    diffs = [tuple(a - b for a, b in zip(rs.simple(i), rs.simple(T[i]))) for i in t.gamma1]

    def canon(vs):
        return tuple(canonical_generators(span_mod(vs, l, r), l, r))

    L = integer_perp(rs, diffs)
    Lp = integer_span_basis(rs, diffs)
    G1 = [rs.simple(i) for i in t.gamma1]
    G2 = [rs.simple(i) for i in t.gamma2]
    G1p = integer_perp(rs, G1)
    G2p = integer_perp(rs, G2)
    # T_ext from G = G1 + L: T|G1 = T, T|L = id
    src = G1 + list(L)
    dst = [rs.simple(T[i]) for i in t.gamma1] + list(L)
    B = [[v[i] % l for v in src] for i in range(r)]
    Im = [[v[i] % l for v in dst] for i in range(r)]
    Text = matmul_mod(Im, inverse_mod(B, l), l)
    # projection onto L along L^perp
    Bs = [[v[i] % l for v in list(L) + list(Lp)] for i in range(r)]
    Bsi = inverse_mod(Bs, l)
    keep = [[int(i == j and i < len(L)) for j in range(r)] for i in range(r)]
    proj = matmul_mod(matmul_mod(Bs, keep, l), Bsi, l)
    rho = tuple(x % l for x in rs.rho)
    ld = LatticeData(
        rs=rs,
        triple=t,
        l=l,
        omega=omega,
        L=canon(L),
        Lperp=canon(Lp),
        G1=canon(G1),
        G2=canon(G2),
        G1perp=canon(G1p),
        G2perp=canon(G2p),
        T_ext=tuple(tuple(row) for row in Text),
        rho=rho,
        proj_L=tuple(tuple(row) for row in proj),
    )
    verify_lattices(ld)
    return ld


def verify_lattices(ld: LatticeData) -> None:
    rs, l, r = ld.rs, ld.l, ld.rank
    T = ld.triple.tmap
    Lset = ld.elements("L")
    Lpset = ld.elements("Lperp")
    if len(Lset) * len(Lpset) != l**r or len(Lset & Lpset) != 1:
        raise RuntimeError("G is not L + L^perp")
    for x in ld.L:
        for i in T:
            d = tuple(a - b for a, b in zip(rs.simple(i), rs.simple(T[i])))
            if ld.form(x, d):
                raise RuntimeError("L not orthogonal to a - Ta")
    for i in T:
        if ld.apply(ld.T_ext, rs.simple(i)) != tuple(x % l for x in rs.simple(T[i])):
            raise RuntimeError("T_ext does not extend T")
    for x in ld.L:
        if ld.apply(ld.T_ext, x) != tuple(v % l for v in x):
            raise RuntimeError("T_ext is not the identity on L")
    basis = [rs.simple(i) for i in range(r)]
    for x in basis:
        for y in basis:
            if ld.form(ld.apply(ld.T_ext, x), ld.apply(ld.T_ext, y)) != ld.form(x, y):
                raise RuntimeError("T_ext does not preserve the form")
    for i in range(r):
        if ld.form(ld.rho, rs.simple(i)) != 2 % l:
            raise RuntimeError("(rho, a) != 2")
    if ld.rho not in Lset:
        raise RuntimeError("rho not in L")


# ---------------------------------------------------------------------------
# EQ-S


@dataclass(frozen=True)
class BicharSolution:
    s: tuple[tuple[int, ...], ...]

    def value(self, x, y, l: int) -> int:
        n = len(self.s)
        return sum(x[i] * self.s[i][j] * y[j] for i in range(n) for j in range(n)) % l

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.s]


def _antisym_index(r: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(r) for j in range(i + 1, r)]


def _s_from_params(params, r: int, l: int):
    s = [[0] * r for _ in range(r)]
    for (i, j), v in zip(_antisym_index(r), params):
        s[i][j] = v % l
        s[j][i] = (-v) % l
    return s


def eqs_residual(ld: LatticeData, s) -> list[int]:
    """Residuals 2 s(a - Ta, e_k) - omega(a + Ta, e_k) over all a in Gamma_1 and basis e_k."""
    rs, l, r = ld.rs, ld.l, ld.rank
    T = ld.triple.tmap
    out = []
    sol = BicharSolution(tuple(tuple(row) for row in s))
    for a in ld.triple.gamma1:
        d = tuple(x - y for x, y in zip(rs.simple(a), rs.simple(T[a])))
        p = tuple(x + y for x, y in zip(rs.simple(a), rs.simple(T[a])))
        for k in range(r):
            e = rs.simple(k)
            out.append((2 * sol.value(d, e, l) - ld.form(p, e)) % l)
    return out


def is_antisymmetric(s, l: int) -> bool:
    n = len(s)
    return all((s[i][j] + s[j][i]) % l == 0 for i in range(n) for j in range(n))


def solve_eqs(ld: LatticeData) -> list[BicharSolution]:
    """All antisymmetric solutions of EQ-S, the canonical one (vanishing on L x L) first."""
    rs, l, r = ld.rs, ld.l, ld.rank
    T = ld.triple.tmap
    pairs = _antisym_index(r)
    npar = len(pairs)

    def coeff_row(x, y):
        # s(x, y) as a linear function of the parameters
        row = [0] * npar
        for k, (i, j) in enumerate(pairs):
            row[k] = (x[i] * y[j] - x[j] * y[i]) % l
        return row

    rows, rhs = [], []
    for a in ld.triple.gamma1:
        d = tuple(x - y for x, y in zip(rs.simple(a), rs.simple(T[a])))
        p = tuple(x + y for x, y in zip(rs.simple(a), rs.simple(T[a])))
        for k in range(r):
            e = rs.simple(k)
            rows.append([2 * c % l for c in coeff_row(d, e)])
            rhs.append(ld.form(p, e))
    # normalisation: vanish on L x L
    norm_rows = []
    for i, x in enumerate(ld.L):
        for y in ld.L[i + 1 :]:
            norm_rows.append(coeff_row(x, y))
    if npar == 0:
        if any(rhs):
            raise RuntimeError("EQ-S inconsistent")
        return [BicharSolution(tuple(tuple([0] * r) for _ in range(r)))]
    A = rows + norm_rows
    b = rhs + [0] * len(norm_rows)
    if not A:
        A, b = [[0] * npar], [0]
    x0, ker0 = solve_mod_l(A, b, l)
    if x0 is None:
        raise RuntimeError("EQ-S has no solution vanishing on L x L (admissibility bug)")
    if ker0:
        raise RuntimeError("normalised EQ-S solution is not unique")
    s0 = _s_from_params(x0, r, l)
    # free part: antisymmetric forms on L, extended by zero on L^perp
    Lb = ld.L
    # coordinates of bar(v) in the L basis
    B = [[v[i] % l for v in Lb] + [0] * 0 for i in range(r)]
    k = len(Lb)

    def lcoords(v):
        bv = ld.bar(v)
        sol, ker = solve_mod_l(B, list(bv), l)
        assert sol is not None
        return sol

    coords = [lcoords(rs.simple(i)) for i in range(r)]
    frees = []
    for a in range(k):
        for c in range(a + 1, k):
            f = [[(coords[i][a] * coords[j][c] - coords[i][c] * coords[j][a]) % l for j in range(r)] for i in range(r)]
            frees.append(f)
    sols = []
    for combo in itertools.product(range(l), repeat=len(frees)):
        s = [[(s0[i][j] + sum(cf * f[i][j] for cf, f in zip(combo, frees))) % l for j in range(r)] for i in range(r)]
        sols.append(BicharSolution(tuple(tuple(row) for row in s)))
    for sol in sols:
        if not is_antisymmetric(sol.s, l) or any(eqs_residual(ld, sol.s)):
            raise RuntimeError("EQ-S solution failed verification")
    return sols


def bichar_assoc_map(b, omega, l: int):
    """Matrix M with b(mu, nu) = omega(M mu, nu), i.e. M = omega^{-1} b^T in column form."""
    n = len(omega)
    try:
        oi = inverse_mod(omega, l)
    except ValueError as exc:
        raise ValueError("form is degenerate mod l; B(mu) is not defined") from exc
    bt = [[b[j][i] for j in range(n)] for i in range(n)]
    # omega symmetric: omega(M mu, nu) = mu^T M^T omega nu, need M^T omega = b, so M = omega^{-1} b^T
    return matmul_mod(oi, bt, l)


def s2omega_exponent(ld: LatticeData, sol: BicharSolution):
    """Exponent matrix of S^{-2} Omega, i.e. -2 s + omega."""
    r, l = ld.rank, ld.l
    return tuple(tuple((-2 * sol.s[i][j] + ld.omega[i][j]) % l for j in range(r)) for i in range(r))


def row_space(M, l: int, side: str = "right") -> frozenset:
    """Image subgroup of mu -> b(mu, .) (side right) or mu -> b(., mu) (side left) as character vectors."""
    n = len(M)
    if side == "right":
        gens = [tuple(M[i][j] for j in range(n)) for i in range(n)]
    else:
        gens = [tuple(M[j][i] for j in range(n)) for i in range(n)]
    return span_mod(gens, l, n)
