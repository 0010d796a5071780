"""Exact finite-dimensional u_q-modules and evaluation of tensors on them.

Used where an identity in u_q^{(x)3} is too large to expand (twisted hexagons at rank
two and three): both sides are compared as operators on tensor products of modules.
Modules carry a weight basis, so every P_mu acts diagonally.
"""

from __future__ import annotations

from .uq_engine import AlgElement, TensorElement, UqAlgebra, theta_nil


class SMat:
    """Sparse square-or-rectangular matrix over the cyclotomic field: rows[i][j] = value."""

    __slots__ = ("n", "m", "rows")

    def __init__(self, n: int, m: int, rows: dict | None = None):
        self.n, self.m = n, m
        self.rows = rows if rows is not None else {}

    @staticmethod
    def identity(F, n: int) -> "SMat":
        return SMat(n, n, {i: {i: F.one} for i in range(n)})

    @staticmethod
    def diag(vals: list) -> "SMat":
        n = len(vals)
        return SMat(n, n, {i: {i: v} for i, v in enumerate(vals) if v})

    def _put(self, i: int, j: int, v) -> None:
        row = self.rows.setdefault(i, {})
        cur = row.get(j)
        s = v if cur is None else cur + v
        if s:
            row[j] = s
        else:
            row.pop(j, None)
            if not row:
                del self.rows[i]

    def __add__(self, other: "SMat") -> "SMat":
        out = SMat(self.n, self.m, {i: dict(r) for i, r in self.rows.items()})
        for i, r in other.rows.items():
            for j, v in r.items():
                out._put(i, j, v)
        return out

    def __neg__(self) -> "SMat":
        return SMat(self.n, self.m, {i: {j: -v for j, v in r.items()} for i, r in self.rows.items()})

    def __sub__(self, other: "SMat") -> "SMat":
        return self + (-other)

    def scale(self, c) -> "SMat":
        if not c:
            return SMat(self.n, self.m)
        return SMat(self.n, self.m, {i: {j: v * c for j, v in r.items()} for i, r in self.rows.items()})

    def __matmul__(self, other: "SMat") -> "SMat":
        if self.m != other.n:
            raise ValueError("shape mismatch")
        out = SMat(self.n, other.m)
        orows = other.rows
        for i, r in self.rows.items():
            acc: dict = {}
            for k, a in r.items():
                row_k = orows.get(k)
                if not row_k:
                    continue
                for j, b in row_k.items():
                    cur = acc.get(j)
                    acc[j] = a * b if cur is None else cur + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out.rows[i] = acc
        return out

    def kron(self, other: "SMat") -> "SMat":
        out = SMat(self.n * other.n, self.m * other.m)
        for i, r in self.rows.items():
            for j, a in r.items():
                for k, r2 in other.rows.items():
                    row = out.rows.setdefault(i * other.n + k, {})
                    for t, b in r2.items():
                        row[j * other.m + t] = a * b
        return out

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, SMat) or (self.n, self.m) != (other.n, other.m):
            return NotImplemented
        return (self - other).is_zero()

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for i, r in self.rows.items():
            s = None
            for j, a in r.items():
                b = vec.get(j)
                if b is not None:
                    s = a * b if s is None else s + a * b
            if s:
                out[i] = s
        return out


class Module:
    """A u_q-module given by a weight basis and the matrices of E_a, F_a."""

    def __init__(self, alg: UqAlgebra, weights: list[int], E: list[SMat], F: list[SMat], name: str = ""):
        self.alg = alg
        self.dim = len(weights)
        self.weights = weights
        self.E = E
        self.F = F
        self.name = name
        self._emono: dict = {0: SMat.identity(alg.F, self.dim)}
        self._fmono: dict = {0: SMat.identity(alg.F, self.dim)}
        self._eroot: dict = {}
        self._froot: dict = {}

    # -- action of PBW pieces ------------------------------------------------
    def _root(self, k: int, kind: str) -> SMat:
        cache = self._eroot if kind == "E" else self._froot
        hit = cache.get(k)
        if hit is None:
            gens = self.E if kind == "E" else self.F
            hit = SMat(self.dim, self.dim)
            for w, c in self.alg.root_poly(k, kind).items():
                cur = SMat.identity(self.alg.F, self.dim)
                for a in w:
                    cur = cur @ gens[a]
                hit = hit + cur.scale(c)
            cache[k] = hit
        return hit

    def e_mono(self, e: int) -> SMat:
        """E_1^{e_1} ... E_N^{e_N}."""
        hit = self._emono.get(e)
        if hit is None:
            k = self.alg._e_last[e]
            hit = self.e_mono(e - self.alg.root_mono[k]) @ self._root(k, "E")
            self._emono[e] = hit
        return hit

    def f_mono(self, f: int) -> SMat:
        """F_N^{f_N} ... F_1^{f_1}."""
        hit = self._fmono.get(f)
        if hit is None:
            k = self.alg._f_last[f]
            hit = self.f_mono(f - self.alg.root_mono[k]) @ self._root(k, "F")
            self._fmono[f] = hit
        return hit

    def projector(self, c: int) -> SMat:
        return SMat.diag([self.alg.F.one if w == c else self.alg.F.zero for w in self.weights])

    def k_diag(self, g: int) -> SMat:
        fe, q = self.alg.fexp, self.alg.q
        return SMat.diag([q(fe[g][w]) for w in self.weights])

    def act_raw_key(self, key) -> SMat:
        """P_c F_f E_e."""
        c, f, e = key
        fe = self.f_mono(f) @ self.e_mono(e)
        keep = {i: r for i, r in fe.rows.items() if self.weights[i] == c}
        return SMat(self.dim, self.dim, keep)

    def act_kfe_key(self, key) -> SMat:
        """K_g F_f E_e."""
        g, f, e = key
        return self.k_diag(g) @ self.f_mono(f) @ self.e_mono(e)

    def act(self, x: AlgElement | dict) -> SMat:
        terms = x.terms if isinstance(x, AlgElement) else x
        out = SMat(self.dim, self.dim)
        for key, v in terms.items():
            out = out + self.act_raw_key(key).scale(v)
        return out

    def check_relations(self) -> bool:
        """Cartan weights, [E_a, F_b] and the q-Serre relations hold on this module."""
        alg, Fd = self.alg, self.alg.F
        qd = Fd.q(1) - Fd.q(-1)
        for a in range(alg.r):
            ka = self.k_diag(alg.simple_c[a])
            kinv = self.k_diag(alg.cneg[alg.simple_c[a]])
            for i, r in self.E[a].rows.items():
                for j in r:
                    if self.weights[i] != alg.cadd[self.weights[j]][alg.simple_c[a]]:
                        return False
            for b in range(alg.r):
                comm = self.E[a] @ self.F[b] - self.F[b] @ self.E[a]
                want = (ka - kinv).scale(qd.inverse()) if a == b else SMat(self.dim, self.dim)
                if not comm == want:
                    return False
                if a != b and alg.rs.cartan[a][b] == -1:
                    for X in (self.E, self.F):
                        x, y = X[a], X[b]
                        qs = Fd.q(1) + Fd.q(-1)
                        serre = x @ x @ y - (x @ y @ x).scale(qs) + y @ x @ x
                        if not serre.is_zero():
                            return False
                elif a != b:
                    if not (self.E[a] @ self.E[b] == self.E[b] @ self.E[a]):
                        return False
        return True


def baby_verma(alg: UqAlgebra, mu: int) -> Module:
    """Z(mu) = u_q (x)_{u_q^{>=0}} C_mu with basis F_f v (f a normal monomial)."""
    n = alg.nmono
    weights = [alg.cadd[mu][alg.fdeg_c[f]] for f in range(n)]
    E, F = [], []
    for a in range(alg.r):
        for kind, target in (("E", E), ("F", F)):
            gen = alg.kfe_E(a) if kind == "E" else alg.kfe_F(a)
            mat = SMat(n, n)
            for f in range(n):
                for (g, f2, e2), c in alg.mul_kfe(gen, {(0, f, 0): alg.F.one}).items():
                    if e2:
                        continue
                    w = alg.cadd[mu][alg.fdeg_c[f2]]
                    mat._put(f2, f, c * alg.q(alg.fexp[g][w]))
            target.append(mat)
    return Module(alg, weights, E, F, name=f"Z({alg.cvec[mu]})")


def _echelon_insert(basis: dict, vec: dict) -> dict | None:
    """Reduce vec against an echelon basis {pivot: vec}; insert it if independent."""
    v = dict(vec)
    while v:
        p = min(v)
        b = basis.get(p)
        if b is None:
            inv = v[p].inverse()
            basis[p] = {k: x * inv for k, x in v.items()}
            return basis[p]
        f = v[p]
        for k, x in b.items():
            y = v.get(k)
            y = -(f * x) if y is None else y - f * x
            if y:
                v[k] = y
            else:
                v.pop(k, None)
    return None


def _coords(basis_vectors: list[dict], pivots: list[int], vec: dict) -> dict:
    """Coordinates of vec in a fully reduced echelon basis (pivot columns are unit vectors)."""
    out = {}
    for idx, p in enumerate(pivots):
        x = vec.get(p)
        if x:
            out[idx] = x
    # sanity: reconstruct
    rec: dict = {}
    for idx, x in out.items():
        for k, y in basis_vectors[idx].items():
            rec[k] = rec[k] + x * y if k in rec else x * y
    if {k: v for k, v in rec.items() if v} != {k: v for k, v in vec.items() if v}:
        raise ValueError("vector outside the submodule")
    return out


def submodule(M: Module, generators: list[dict]) -> Module:
    """The submodule of M generated by the given vectors, with a weight basis."""
    basis: dict = {}
    queue = []
    for g in generators:
        b = _echelon_insert(basis, g)
        if b is not None:
            queue.append(dict(g))
    ops = M.E + M.F
    while queue:
        v = queue.pop()
        for op in ops:
            w = op.apply(v)
            if w and _echelon_insert(basis, w) is not None:
                queue.append(w)
    # fully reduce so pivot columns are unit vectors
    pivots = sorted(basis)
    for p in reversed(pivots):
        bp = basis[p]
        for p2 in pivots:
            if p2 < p and p in basis[p2]:
                f = basis[p2][p]
                new = dict(basis[p2])
                for k, x in bp.items():
                    y = new.get(k)
                    y = -(f * x) if y is None else y - f * x
                    if y:
                        new[k] = y
                    else:
                        new.pop(k, None)
                basis[p2] = new
    vecs = [basis[p] for p in pivots]
    weights = []
    for v in vecs:
        ws = {M.weights[k] for k in v}
        if len(ws) != 1:
            raise ValueError("generated submodule basis is not homogeneous")
        weights.append(ws.pop())
    d = len(vecs)

    def restrict(op: SMat) -> SMat:
        out = SMat(d, d)
        for j, v in enumerate(vecs):
            for i, x in _coords(vecs, pivots, op.apply(v)).items():
                out._put(i, j, x)
        return out

    return Module(M.alg, weights, [restrict(x) for x in M.E], [restrict(x) for x in M.F],
                  name=f"soc {M.name}")


def simple_socle(alg: UqAlgebra, mu: int) -> Module:
    """The simple socle of Z(mu): the submodule generated by the lowest vector F_top v."""
    Z = baby_verma(alg, mu)
    return submodule(Z, [{alg.nmono - 1: alg.F.one}])


def tensor_module(M: Module, N: Module) -> Module:
    """M (x) N with the untwisted coproduct; basis index i*dim(N) + j."""
    alg = M.alg
    weights = [alg.cadd[a][b] for a in M.weights for b in N.weights]
    E, F = [], []
    for a in range(alg.r):
        for kind, target in (("E", E), ("F", F)):
            mat = SMat(M.dim * N.dim, M.dim * N.dim)
            for (k1, k2), c in alg._delta_gen(a, kind).items():
                mat = mat + M.act_kfe_key(k1).kron(N.act_kfe_key(k2)).scale(c)
            target.append(mat)
    return Module(alg, weights, E, F, name=f"{M.name}*{N.name}")


def eval_tensor(T: TensorElement | dict, mods: list[Module], perm: tuple[int, ...] | None = None) -> SMat:
    """Operator of a P-basis tensor on mods[0] (x) mods[1] (x) ...

    perm[i] is the module slot receiving leg i (default identity); used for flipped legs.
    """
    terms = T.terms if isinstance(T, TensorElement) else T
    k = len(mods)
    perm = perm or tuple(range(k))
    dim = 1
    for M in mods:
        dim *= M.dim
    out = SMat(dim, dim)
    cache: list[dict] = [{} for _ in range(k)]
    for keys, v in terms.items():
        slot = [None] * k
        for leg, key in enumerate(keys):
            s = perm[leg]
            mat = cache[s].get(key)
            if mat is None:
                mat = cache[s][key] = mods[s].act_raw_key(key)
            slot[s] = mat
        if any(m.is_zero() for m in slot):
            continue
        acc = slot[0]
        for m in slot[1:]:
            acc = acc.kron(m)
        out = out + acc.scale(v)
    return out


def eval_r_matrix(alg: UqAlgebra, M: Module, N: Module) -> SMat:
    """R = Theta Omega^{-1} on M (x) N from the nilpotent part and a diagonal Cartan factor."""
    q, fe = alg.q, alg.fexp
    theta = SMat(M.dim * N.dim, M.dim * N.dim)
    for (e, f), c in theta_nil(alg).items():
        a, b = M.e_mono(e), N.f_mono(f)
        if a.is_zero() or b.is_zero():
            continue
        theta = theta + a.kron(b).scale(c)
    cart = SMat.diag([q(-fe[x][y]) for x in M.weights for y in N.weights])
    return theta @ cart


def slot_embed(op: SMat, dims: list[int], slots: tuple[int, ...]) -> SMat:
    """Embed an operator acting on the tensor factors `slots` (in that order) into the full product."""
    k = len(dims)
    others = [i for i in range(k) if i not in slots]
    sub = [dims[s] for s in slots]

    def split(idx: int, ds: list[int]) -> list[int]:
        out = []
        for d in reversed(ds):
            out.append(idx % d)
            idx //= d
        return out[::-1]

    def join(parts: list[int], ds: list[int]) -> int:
        idx = 0
        for p, d in zip(parts, ds):
            idx = idx * d + p
        return idx

    total = 1
    for d in dims:
        total *= d
    rest_dims = [dims[i] for i in others]
    rest_total = 1
    for d in rest_dims:
        rest_total *= d
    out = SMat(total, total)
    for i, r in op.rows.items():
        pi = split(i, sub)
        for j, v in r.items():
            pj = split(j, sub)
            for rest in range(rest_total):
                pr = split(rest, rest_dims)
                full_i, full_j = [0] * k, [0] * k
                for s, a, b in zip(slots, pi, pj):
                    full_i[s], full_j[s] = a, b
                for s, a in zip(others, pr):
                    full_i[s] = full_j[s] = a
                out.rows.setdefault(join(full_i, dims), {})[join(full_j, dims)] = v
    return out


__all__ = [
    "SMat", "Module", "baby_verma", "simple_socle", "submodule", "tensor_module",
    "eval_tensor", "eval_r_matrix", "slot_embed",
]
