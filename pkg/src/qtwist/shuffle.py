"""Quantum shuffle model of the positive and negative parts of u_q.

The positive part embeds faithfully into the quantum shuffle algebra on simple-root
letters (braiding q^(a, b)); the skew derivations r_a, r'_a become "strip the last /
first letter a".  The triangular model y K_g x (y in the F-shuffle algebra, x in the
E-shuffle algebra, K_g with g in Z^rank) supports exact products, which is enough
to run Lusztig's braid operators and to read off the straightening relations between
root vectors.  Everything here is low degree; the PBW engine takes over afterwards.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .cartan import RootSystem
from .scalars import CycScalar, field, solve_cyc

Word = tuple[int, ...]


def _addto(acc: dict, key, val: CycScalar) -> None:
    cur = acc.get(key)
    if cur is None:
        if val:
            acc[key] = val
        return
    s = cur + val
    if s:
        acc[key] = s
    else:
        del acc[key]


class ShuffleModel:
    def __init__(self, rs: RootSystem, l: int):
        self.rs = rs
        self.l = l
        self.F = field(l)
        self.r = rs.rank
        self._sh_cache: dict = {}
        self._psi_cache: dict = {}
        self._qdm = self.F.q(1) - self.F.q(-1)
        self._inv_qdm = self._qdm.inverse()

    # -- words -------------------------------------------------------------
    def wdeg(self, w: Word) -> tuple[int, ...]:
        d = [0] * self.r
        for a in w:
            d[a] += 1
        return tuple(d)

    def pair(self, a: int, d) -> int:
        """(alpha_a, d) for d in simple-root coordinates."""
        row = self.rs.cartan[a]
        return sum(row[j] * d[j] for j in range(self.r))

    def gpair(self, g, d) -> int:
        return self.rs.form(g, d)

    def sh(self, u: Word, v: Word) -> dict:
        """Quantum shuffle of words: weight q^(a,b) for each u-letter a after a v-letter b."""
        key = (u, v)
        hit = self._sh_cache.get(key)
        if hit is not None:
            return hit
        if not u:
            res = {v: self.F.one}
        elif not v:
            res = {u: self.F.one}
        else:
            res: dict = {}
            b = v[-1]
            for w, c in self.sh(u, v[:-1]).items():
                _addto(res, w + (b,), c)
            a = u[-1]
            wt = self.F.q(self.pair(a, self.wdeg(v)))
            for w, c in self.sh(u[:-1], v).items():
                _addto(res, w + (a,), c * wt)
        self._sh_cache[key] = res
        return res

    def mul(self, X: dict, Y: dict) -> dict:
        out: dict = {}
        for u, a in X.items():
            for v, b in Y.items():
                ab = a * b
                for w, c in self.sh(u, v).items():
                    _addto(out, w, ab * c)
        return out

    def letter(self, a: int) -> dict:
        return {(a,): self.F.one}

    def psi_word(self, w: Word) -> dict:
        """Shuffle image of the product of generators along w."""
        hit = self._psi_cache.get(w)
        if hit is None:
            if len(w) <= 1:
                hit = {w: self.F.one}
            else:
                hit = self.mul(self.psi_word(w[:-1]), self.letter(w[-1]))
            self._psi_cache[w] = hit
        return hit

    def psi_poly(self, poly: dict) -> dict:
        out: dict = {}
        for w, c in poly.items():
            for u, d in self.psi_word(w).items():
                _addto(out, u, c * d)
        return out

    @staticmethod
    def strip_last(X: dict, a: int) -> dict:
        return {w[:-1]: c for w, c in X.items() if w and w[-1] == a}

    @staticmethod
    def strip_first(X: dict, a: int) -> dict:
        return {w[1:]: c for w, c in X.items() if w and w[0] == a}

    def words_of_degree(self, d) -> list[Word]:
        letters = [a for a in range(self.r) for _ in range(d[a])]
        return sorted(set(itertools.permutations(letters)))

    def preimage(self, X: dict) -> dict:
        """A noncommutative polynomial in the generators whose shuffle image is X."""
        out: dict = {}
        bydeg: dict = {}
        for w, c in X.items():
            bydeg.setdefault(self.wdeg(w), {})[w] = c
        for d, Xd in bydeg.items():
            basis = self._word_basis(d)
            cols = [self.psi_word(w) for w in basis]
            sol = solve_cyc(cols, Xd, self.F)
            if sol is None:
                raise ValueError("element is not in the image of the generators")
            for w, c in zip(basis, sol):
                if c:
                    out[w] = c
        return out

    @lru_cache(maxsize=None)
    def _word_basis(self, d) -> tuple[Word, ...]:
        """Words whose shuffle images form a basis of the degree-d piece."""
        chosen: list[Word] = []
        ech: dict = {}
        for w in self.words_of_degree(d):
            v = dict(self.psi_word(w))
            while v:
                lead = min(v)
                if lead not in ech:
                    inv = v[lead].inverse()
                    ech[lead] = {k: x * inv for k, x in v.items()}
                    chosen.append(w)
                    break
                f = v[lead]
                for k, x in ech[lead].items():
                    _addto(v, k, -(f * x))
        return tuple(chosen)

    # -- triangular model: terms (yword, g, xword) ----------------------------
    def fmul_F(self, A: dict, b: int) -> dict:
        """A * F_b."""
        out: dict = {}
        F = self.F
        for (y, g, x), c in A.items():
            wt = F.q(-self.gpair(g, self.rs.simple(b)))
            for w, d in self.sh(y, (b,)).items():
                _addto(out, (w, g, x), c * d * wt)
            if x and x[-1] == b:
                xr = x[:-1]
                e = F.q(-self.pair(b, self.wdeg(xr)))
                g2 = tuple(gi + (1 if i == b else 0) for i, gi in enumerate(g))
                _addto(out, (y, g2, xr), c * e * self._inv_qdm)
            if x and x[0] == b:
                xr = x[1:]
                g2 = tuple(gi - (1 if i == b else 0) for i, gi in enumerate(g))
                _addto(out, (y, g2, xr), -(c * self._inv_qdm))
        return out

    def fmul_K(self, A: dict, g2) -> dict:
        out: dict = {}
        for (y, g, x), c in A.items():
            e = self.F.q(-self.gpair(g2, self.wdeg(x)))
            _addto(out, (y, tuple(a + b for a, b in zip(g, g2)), x), c * e)
        return out

    def fmul_X(self, A: dict, xw: Word) -> dict:
        out: dict = {}
        for (y, g, x), c in A.items():
            for w, d in self.sh(x, xw).items():
                _addto(out, (y, g, w), c * d)
        return out

    def fmul(self, A: dict, B: dict) -> dict:
        groups: dict = {}
        for (y, g, x), c in B.items():
            groups.setdefault((g, x), {})[y] = c
        out: dict = {}
        for (g, x), Y in groups.items():
            poly = self.preimage(Y)
            acc: dict = {}
            for w, c in poly.items():
                cur = A
                for b in w:
                    cur = self.fmul_F(cur, b)
                for k, v in cur.items():
                    _addto(acc, k, v * c)
            acc = self.fmul_K(acc, g)
            acc = self.fmul_X(acc, x)
            for k, v in acc.items():
                _addto(out, k, v)
        return out

    def zero_g(self):
        return (0,) * self.r

    def gen_E(self, a: int) -> dict:
        return {((), self.zero_g(), (a,)): self.F.one}

    def gen_F(self, a: int) -> dict:
        return {((a,), self.zero_g(), ()): self.F.one}

    def gen_K(self, g) -> dict:
        return {((), tuple(g), ()): self.F.one}

    def scale(self, A: dict, c) -> dict:
        return {k: v * c for k, v in A.items()}

    def add(self, *els) -> dict:
        out: dict = {}
        for A in els:
            for k, v in A.items():
                _addto(out, k, v)
        return out

    # -- braid operators ----------------------------------------------------
    def braid_gen(self, i: int, kind: str, j: int) -> dict:
        """Lusztig's T_i on a generator (Jantzen's convention)."""
        F = self.F
        a = self.rs.cartan[i][j]
        if kind == "E":
            if i == j:
                return self.scale(self.fmul(self.gen_F(i), self.gen_K(self.rs.simple(i))), -1)
            if a == 0:
                return self.gen_E(j)
            assert a == -1
            return self.add(
                self.fmul(self.gen_E(i), self.gen_E(j)),
                self.scale(self.fmul(self.gen_E(j), self.gen_E(i)), -F.q(-1)),
            )
        if kind == "F":
            if i == j:
                g = tuple(-x for x in self.rs.simple(i))
                return self.scale(self.fmul(self.gen_K(g), self.gen_E(i)), -1)
            if a == 0:
                return self.gen_F(j)
            return self.add(
                self.fmul(self.gen_F(j), self.gen_F(i)),
                self.scale(self.fmul(self.gen_F(i), self.gen_F(j)), -F.q(1)),
            )
        raise ValueError(kind)

    def braid_plus(self, i: int, X: dict) -> dict:
        """T_i applied to an element of the positive part given by its shuffle image."""
        poly = self.preimage(X)
        return self._braid_poly(i, poly, "E")

    def braid_minus(self, i: int, Y: dict) -> dict:
        poly = self.preimage(Y)
        return self._braid_poly(i, poly, "F")

    def _braid_poly(self, i: int, poly: dict, kind: str) -> dict:
        out: dict = {}
        one = {((), self.zero_g(), ()): self.F.one}
        for w, c in poly.items():
            cur = one
            for a in w:
                cur = self.fmul(cur, self.braid_gen(i, kind, a))
            for k, v in cur.items():
                _addto(out, k, v * c)
        return out

    def positive_part(self, A: dict) -> dict:
        """Extract x from an element known to be of the form 1 K_0 x."""
        out = {}
        for (y, g, x), c in A.items():
            if y or any(g):
                raise ValueError("element is not in the positive part")
            out[x] = c
        return out

    def negative_part(self, A: dict) -> dict:
        out = {}
        for (y, g, x), c in A.items():
            if x or any(g):
                raise ValueError("element is not in the negative part")
            out[y] = c
        return out

    def root_vectors(self) -> tuple[list[dict], list[dict]]:
        """Shuffle images of E_mu, F_mu along the stored reduced word."""
        word = self.rs.reduced_word
        Es, Fs = [], []
        for k, a in enumerate(word):
            X = self.letter(a)
            Y = self.letter(a)
            for b in reversed(word[:k]):
                X = self.positive_part(self.braid_plus(b, X))
                Y = self.negative_part(self.braid_minus(b, Y))
            Es.append(X)
            Fs.append(Y)
        return Es, Fs
