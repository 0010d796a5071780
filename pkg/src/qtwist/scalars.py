"""Exact arithmetic in Q(zeta_l) and linear algebra over Z/lZ."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence


class ConfigError(ValueError):
    """Raised for configurations the engine refuses to run (even l, oversized runs)."""


def _polymul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _polydiv_exact(a: Sequence[int], b: Sequence[int]) -> list[int]:
    # b monic
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + len(b) - 1]
        out[k] = c
        if c:
            for j, y in enumerate(b):
                a[k + j] -= c * y
    assert not any(a), "inexact division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, cyclotomic_poly(d))
    return tuple(num)


class CycField:
    """The field Q(zeta_l), elements stored in the power basis 1, z, ..., z^(n-1)."""

    def __init__(self, l: int):
        if l < 2:
            raise ConfigError(f"l must be >= 2, got {l}")
        self.l = l
        phi = cyclotomic_poly(l)
        self.n = n = len(phi) - 1
        # reduction of z^k for k < l into the power basis
        red: list[tuple[int, ...]] = []
        for k in range(l):
            if k < n:
                v = [0] * n
                v[k] = 1
            else:
                prev = red[k - 1]
                # z * (sum v_i z^i) then reduce the z^n term
                v = [0] + list(prev[:-1])
                top = prev[-1]
                if top:
                    for i in range(n):
                        v[i] -= top * phi[i]
            red.append(tuple(v))
        self._red = red
        self.zero = CycScalar(self, (0,) * n, 1)
        self.one = self.from_int(1)
        self._qpow = [CycScalar(self, red[k], 1) for k in range(l)]

    def __repr__(self) -> str:
        return f"CycField({self.l})"

    def __reduce__(self):
        return (field, (self.l,))

    # constructors
    def from_int(self, a: int) -> "CycScalar":
        return CycScalar(self, (a,) + (0,) * (self.n - 1), 1)

    def from_rational(self, a) -> "CycScalar":
        a = Fraction(a)
        return CycScalar(self, (a.numerator,) + (0,) * (self.n - 1), a.denominator)

    def coerce(self, a) -> "CycScalar":
        if isinstance(a, CycScalar):
            return a
        return self.from_rational(a)

    def q(self, k: int = 1) -> "CycScalar":
        """q^k for the primitive root q = zeta_l."""
        return self._qpow[k % self.l]

    def from_cyclic(self, coeffs: Sequence[int], den: int = 1) -> "CycScalar":
        """Element sum coeffs[k] q^k with arbitrary length coefficient list."""
        n, l = self.n, self.l
        v = [0] * n
        red = self._red
        for k, c in enumerate(coeffs):
            if c:
                r = red[k % l]
                for i in range(n):
                    if r[i]:
                        v[i] += c * r[i]
        return CycScalar.make(self, v, den)

    def half(self, a: int) -> int:
        return half_exponent(a, self.l)

    def qint(self, m: int) -> "CycScalar":
        """Quantum integer [m] = (q^m - q^-m)/(q - q^-1)."""
        if m == 0:
            return self.zero
        if m < 0:
            return -self.qint(-m)
        # [m] = q^(1-m) + q^(3-m) + ... + q^(m-1)
        acc = [0] * self.l
        for j in range(m):
            acc[(1 - m + 2 * j) % self.l] += 1
        return self.from_cyclic(acc)

    def q_factorial(self, m: int) -> "CycScalar":
        return q_factorial(m, self.l)

    def q_binomial(self, a: int, b: int) -> "CycScalar":
        if b < 0 or b > a:
            return self.zero
        return q_factorial(a, self.l) / (q_factorial(b, self.l) * q_factorial(a - b, self.l))


@lru_cache(maxsize=None)
def field(l: int) -> CycField:
    return CycField(l)


class CycScalar:
    """Exact element of Q(zeta_l): integer coefficient vector over a positive denominator."""

    __slots__ = ("F", "c", "d")

    def __init__(self, F: CycField, c: tuple[int, ...], d: int):
        self.F = F
        self.c = c
        self.d = d

    @staticmethod
    def make(F: CycField, c: Iterable[int], d: int = 1) -> "CycScalar":
        c = tuple(c)
        if d != 1:
            if d < 0:
                c = tuple(-x for x in c)
                d = -d
            g = d
            for x in c:
                if x:
                    g = gcd(g, x)
                    if g == 1:
                        break
            if not any(c):
                g = d
            if g != 1:
                c = tuple(x // g for x in c)
                d //= g
        return CycScalar(F, c, d)

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self) -> bool:
        return any(self.c)

    def _lift(self, other) -> "CycScalar":
        if isinstance(other, CycScalar):
            if other.F is not self.F and other.F.l != self.F.l:
                raise ValueError("mixing scalars over different cyclotomic fields")
            return other
        return self.F.from_rational(other)

    def __add__(self, other) -> "CycScalar":
        o = self._lift(other)
        if self.d == o.d:
            return CycScalar.make(self.F, [a + b for a, b in zip(self.c, o.c)], self.d)
        return CycScalar.make(self.F, [a * o.d + b * self.d for a, b in zip(self.c, o.c)], self.d * o.d)

    __radd__ = __add__

    def __neg__(self) -> "CycScalar":
        return CycScalar(self.F, tuple(-a for a in self.c), self.d)

    def __sub__(self, other) -> "CycScalar":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "CycScalar":
        return self._lift(other) - self

    def __mul__(self, other) -> "CycScalar":
        if not isinstance(other, CycScalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            o = Fraction(other)
            return CycScalar.make(self.F, [a * o.numerator for a in self.c], self.d * o.denominator)
        F = self.F
        n = F.n
        a, b = self.c, other.c
        if n == 1:
            return CycScalar.make(F, (a[0] * b[0],), self.d * other.d)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        v = prod[:n]
        red = F._red
        l = F.l
        for k in range(n, 2 * n - 1):
            t = prod[k]
            if t:
                r = red[k % l] if k < l else _reduce_high(F, k)
                for i in range(n):
                    if r[i]:
                        v[i] += t * r[i]
        return CycScalar.make(F, v, self.d * other.d)

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        F = self.F
        n = F.n
        if n == 1:
            return CycScalar.make(F, (self.d,), self.c[0])
        # columns: self * z^j in the power basis; solve M x = e_0
        cols = []
        zj = F.one
        z = F.q(1)
        for _ in range(n):
            cols.append(self * zj)
            zj = zj * z
        M = [[Fraction(cols[j].c[i], cols[j].d) for j in range(n)] for i in range(n)]
        rhs = [Fraction(1)] + [Fraction(0)] * (n - 1)
        x = _solve_fraction_square(M, rhs)
        den = 1
        for v in x:
            den = den * v.denominator // gcd(den, v.denominator)
        return CycScalar.make(F, [int(v * den) for v in x], den)

    def __truediv__(self, other) -> "CycScalar":
        if isinstance(other, CycScalar):
            return self * other.inverse()
        o = Fraction(other)
        return CycScalar.make(self.F, [a * o.denominator for a in self.c], self.d * o.numerator)

    def __rtruediv__(self, other) -> "CycScalar":
        return self._lift(other) * self.inverse()

    def __pow__(self, k: int) -> "CycScalar":
        if k < 0:
            return self.inverse() ** (-k)
        acc = self.F.one
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, CycScalar):
            return self.F.l == other.F.l and self.c == other.c and self.d == other.d
        try:
            o = self.F.from_rational(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.c == o.c and self.d == o.d

    def __hash__(self) -> int:
        return hash((self.F.l, self.c, self.d))

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def coefficients(self) -> list[Fraction]:
        return [Fraction(a, self.d) for a in self.c]

    def to_json(self) -> list[str]:
        return [str(x) for x in self.coefficients()]

    @staticmethod
    def from_json(F: CycField, data: Sequence[str]) -> "CycScalar":
        fr = [Fraction(s) for s in data]
        den = 1
        for v in fr:
            den = den * v.denominator // gcd(den, v.denominator)
        return CycScalar.make(F, [int(v * den) for v in fr], den)

    def power_of_q(self) -> int | None:
        """Return k if self == q^k, else None."""
        for k in range(self.F.l):
            if self == self.F.q(k):
                return k
        return None

    def __repr__(self) -> str:
        parts = []
        for k, a in enumerate(self.c):
            if not a:
                continue
            coef = Fraction(a, self.d)
            mon = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            if not mon:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(mon)
            elif coef == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{coef}*{mon}")
        return " + ".join(parts) if parts else "0"


@lru_cache(maxsize=None)
def _high_cache(l: int, k: int) -> tuple[int, ...]:
    F = field(l)
    return F._red[k % l]


def _reduce_high(F: CycField, k: int) -> tuple[int, ...]:
    return _high_cache(F.l, k)


def _solve_fraction_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(M)
    A = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def half_exponent(a: int, l: int) -> int:
    """a * inv(2) mod l, so that q^(half_exponent(a)) squares to q^a."""
    if l % 2 == 0:
        raise ConfigError(f"l must be odd, got {l}")
    return (a * ((l + 1) // 2)) % l


@lru_cache(maxsize=None)
def q_factorial(m: int, l: int) -> CycScalar:
    if m >= l:
        raise ValueError(f"[{m}]! vanishes at l={l}")
    if m < 0:
        raise ValueError("negative factorial")
    F = field(l)
    acc = F.one
    for k in range(1, m + 1):
        acc = acc * F.qint(k)
    return acc


# ---------------------------------------------------------------------------
# linear algebra over Q(zeta)


def solve_cyc(columns: list[dict], target: dict, F: CycField) -> list[CycScalar] | None:
    """Solve sum_j x_j columns[j] = target for sparse vectors (dict key -> CycScalar).

    Returns one solution or None when inconsistent. Raises if the columns are dependent
    and the solution is not unique (callers rely on uniqueness).
    """
    keys: dict = {}
    for col in columns:
        for k in col:
            keys.setdefault(k, len(keys))
    for k in target:
        keys.setdefault(k, len(keys))
    m = len(columns)
    rows = []
    for k, i in keys.items():
        row = [col.get(k, F.zero) for col in columns] + [target.get(k, F.zero)]
        if any(not x.is_zero() for x in row):
            rows.append(row)
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            raise ValueError("dependent columns in solve_cyc")
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if not rows[i][m].is_zero():
            return None
    return [rows[i][m] for i in range(m)]


def rank_cyc(vectors: list[dict], F: CycField) -> int:
    """Rank of a list of sparse vectors over Q(zeta) by incremental echelon reduction."""
    basis: dict = {}
    for v in vectors:
        v = {k: x for k, x in v.items() if not x.is_zero()}
        while v:
            lead = min(v)
            if lead not in basis:
                inv = v[lead].inverse()
                basis[lead] = {k: x * inv for k, x in v.items()}
                break
            b = basis[lead]
            f = v[lead]
            for k, x in b.items():
                y = v.get(k, F.zero) - f * x
                if y.is_zero():
                    v.pop(k, None)
                else:
                    v[k] = y
    return len(basis)


# ---------------------------------------------------------------------------
# integer Smith normal form and Z/lZ solving


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, D, V) with U A V = D diagonal, U and V unimodular, over the integers."""
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row dst += f row src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, f):
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # divisibility condition for the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]), None)
                if bad is not None:
                    add_row(bad[0], t, 1)
                    done = False
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def solve_mod_l(A: Sequence[Sequence[int]], b: Sequence[int], l: int) -> tuple[list[int] | None, list[list[int]]]:
    """Solve A x = b over Z/lZ.

    Returns (particular, kernel_generators); particular is None when inconsistent.
    The kernel generators span the full solution module of A x = 0.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [0] * n, [[int(i == j) for i in range(n)] for j in range(n)]
    U, D, V = smith_normal_form(A)
    ub = [sum(U[i][k] * b[k] for k in range(m)) % l for i in range(m)]
    y = [0] * n
    gens: list[list[int]] = []
    for i in range(n):
        d = D[i][i] if i < m else 0
        g = gcd(d, l)
        rhs = ub[i] if i < m else 0
        if rhs % g:
            return None, []
        if g != 0:
            # d/g * y = rhs/g mod l/g
            lg = l // g
            if lg == 1:
                y[i] = 0
            else:
                y[i] = (rhs // g) * pow(d // g, -1, lg) % lg
        if g > 1:
            v = [0] * n
            v[i] = l // g
            gens.append(v)
    for i in range(n, m):
        if ub[i] % l:
            return None, []
    x = [sum(V[r][k] * y[k] for k in range(n)) % l for r in range(n)]
    kernel = []
    for v in gens:
        kv = [sum(V[r][k] * v[k] for k in range(n)) % l for r in range(n)]
        if any(kv):
            kernel.append(kv)
    return x, kernel


def matmul_mod(A, B, l: int) -> list[list[int]]:
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) % l for j in range(len(B[0]))] for i in range(len(A))]


def matvec_mod(A, v, l: int) -> list[int]:
    return [sum(a * x for a, x in zip(row, v)) % l for row in A]


def det_int(A: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(Fraction, row)) for row in A]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return int(det)


def inverse_mod(A: Sequence[Sequence[int]], l: int) -> list[list[int]]:
    """Inverse of a square matrix over Z/lZ; raises if not invertible."""
    n = len(A)
    cols = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        x, ker = solve_mod_l(A, e, l)
        if x is None or ker:
            raise ValueError("matrix not invertible mod l")
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def span_mod(gens: Iterable[Sequence[int]], l: int, dim: int) -> frozenset[tuple[int, ...]]:
    """All elements of the subgroup of (Z/l)^dim generated by gens."""
    elems = {tuple([0] * dim)}
    for g in gens:
        g = tuple(x % l for x in g)
        if g in elems:
            continue
        new = set(elems)
        frontier = list(elems)
        while frontier:
            nxt = []
            for e in frontier:
                s = tuple((a + b) % l for a, b in zip(e, g))
                if s not in new:
                    new.add(s)
                    nxt.append(s)
            frontier = nxt
        elems = new
    return frozenset(elems)


def canonical_generators(elems: frozenset, l: int, dim: int) -> list[tuple[int, ...]]:
    """A deterministic small generating set of a subgroup given by its element set."""
    gens: list[tuple[int, ...]] = []
    cur = span_mod([], l, dim)
    for e in sorted(elems, key=lambda v: (sum(1 for x in v if x), v)):
        if e not in cur:
            gens.append(e)
            cur = span_mod(gens, l, dim)
            if len(cur) == len(elems):
                break
    return gens
