"""Exact arithmetic in F_p and F_q = F_{p^(2s+1)}.

Elements are integer codes in range(q): the code of an element with
power-basis coordinates (c0, ..., c_{n-1}) is sum(c_i * p^i), i.e. the
coordinate vector read as a little-endian base-p integer.  All arithmetic
runs on precomputed tables (Zech log/antilog for multiplication, a full
addition table for small q, digitwise base-p addition otherwise), so the
hot loops in `laurent` touch nothing but list indexing.

The modulus for each (p, n) is the first monic irreducible polynomial of
degree n in ascending code order of its non-leading coefficient vector,
which makes contexts deterministic across runs and machines.  The F_p
basis exposed by `basis_and_reps` is the power basis 1, t, ..., t^(n-1)
of the modulus root t, and the representatives of F_q*/F_p* are the
elements whose highest-index nonzero coordinate equals 1 (there is
exactly one such element on each F_p* orbit).
"""

from __future__ import annotations

from functools import lru_cache
from typing import List, Tuple

from .errors import ParameterError

_ADD_TABLE_MAX_Q = 1024


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


class Params:
    """Tower parameters (p, s) with the derived constants q0, q, n.

    `big_action_range` is True on s >= 2, the range where the large
    automorphism group is expected to beat the genus bound; s = 1 is still
    accepted everywhere because the whole pipeline is well defined there
    and the failing verdict at s = 1 is itself a useful check.
    """

    __slots__ = ("p", "s", "q0", "q", "n")

    def __init__(self, p: int, s: int):
        if not isinstance(p, int) or not isinstance(s, int):
            raise ParameterError("p and s must be integers")
        if p == 2 or not _is_prime(p):
            raise ParameterError(f"p must be an odd prime, got {p}")
        if s < 1:
            raise ParameterError(f"s must be a positive integer, got {s}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "q0", p ** s)
        object.__setattr__(self, "q", p ** (2 * s + 1))
        object.__setattr__(self, "n", 2 * s + 1)

    def __setattr__(self, name, value):
        raise AttributeError("Params is immutable")

    @property
    def big_action_range(self) -> bool:
        return self.s >= 2

    def field(self) -> "FieldCtx":
        return make_field(self.p, self.n)

    def __eq__(self, other):
        return isinstance(other, Params) and (self.p, self.s) == (other.p, other.s)

    def __hash__(self):
        return hash((self.p, self.s))

    def __repr__(self):
        return f"Params(p={self.p}, s={self.s})"


# ------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient lists, ascending, trimmed)
# used only while building a context


def _ptrim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _ptrim(out)


def _pmod(a, m, p):
    a = list(a)
    while len(a) >= len(m):
        c = a[-1]
        if c:
            off = len(a) - len(m)
            for i, cm in enumerate(m):
                a[off + i] = (a[off + i] - c * cm) % p
        a.pop()
    return _ptrim(a)


def _psub(a, b, p):
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                   for i in range(n)])


def _ppow_mod(a, e, m, p):
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        inv_lead = pow(b[-1], p - 2, p)
        bm = [(c * inv_lead) % p for c in b]
        a, b = b, _pmod(a, bm, p)
    return a


def _prime_factors(m: int) -> List[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _is_irreducible(f, p):
    """Rabin's test: deterministic and exact."""
    n = len(f) - 1
    x = [0, 1]
    if _ppow_mod(x, p ** n, f, p) != _pmod(x, f, p):
        return False
    for r in _prime_factors(n):
        h = _psub(_ppow_mod(x, p ** (n // r), f, p), x, p)
        g = _pgcd(f, h, p)
        if len(g) - 1 > 0:
            return False
    return True


def _digits(code: int, p: int, n: int) -> List[int]:
    out = []
    for _ in range(n):
        out.append(code % p)
        code //= p
    return out


def _code(digs, p: int) -> int:
    out = 0
    for d in reversed(digs):
        out = out * p + d
    return out


def _find_modulus(p: int, n: int) -> Tuple[int, ...]:
    if n == 1:
        return (0, 1)
    for code in range(p ** n):
        f = _digits(code, p, n) + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise ParameterError(f"no irreducible polynomial of degree {n} over F_{p}")


class FieldCtx:
    """Immutable arithmetic context for F_{p^n}; build via `make_field`."""

    __slots__ = ("p", "n", "q", "modulus", "gen", "LOG", "ALOG", "ADD", "NEG",
                 "FROB", "TRACE", "kernel_args", "_reps")

    def __init__(self, p: int, n: int):
        q = p ** n
        modulus = _find_modulus(p, n)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "modulus", modulus)

        mod_list = list(modulus)

        def cmul(a, b):
            digs = _pmul(_digits(a, p, n), _digits(b, p, n), p)
            digs = _pmod(digs, mod_list, p)
            return _code(digs + [0] * n, p)

        def cpow(a, e):
            r = 1
            while e:
                if e & 1:
                    r = cmul(r, a)
                a = cmul(a, a)
                e >>= 1
            return r

        factors = _prime_factors(q - 1)
        gen = None
        for g in range(2, q):
            if all(cpow(g, (q - 1) // r) != 1 for r in factors):
                gen = g
                break
        if gen is None:  # q == 3: the only generator is 2
            gen = 2 if q == 3 else None
        if gen is None:
            raise ParameterError(f"no multiplicative generator found for q={q}")
        object.__setattr__(self, "gen", gen)

        exp = [1] * (q - 1)
        for i in range(1, q - 1):
            exp[i] = cmul(exp[i - 1], gen)
        log: list = [None] * q
        for i, v in enumerate(exp):
            log[v] = i
        alog = exp + exp  # doubled so summed logs index directly
        object.__setattr__(self, "LOG", log)
        object.__setattr__(self, "ALOG", alog)

        digs_of = [_digits(c, p, n) for c in range(q)]
        neg = [_code([(-d) % p for d in digs_of[c]], p) for c in range(q)]
        object.__setattr__(self, "NEG", neg)

        if q <= _ADD_TABLE_MAX_Q:
            add = []
            for a in range(q):
                da = digs_of[a]
                row = [_code([(da[i] + db[i]) % p for i in range(n)], p)
                       for db in digs_of]
                add.append(row)
        else:
            add = None
        object.__setattr__(self, "ADD", add)

        frob1 = [0] + [alog[(log[c] * p) % (q - 1)] for c in range(1, q)]
        frob = [list(range(q)), frob1]
        for _ in range(2, n):
            frob.append([frob1[c] for c in frob[-1]])
        frob = frob[:n]
        object.__setattr__(self, "FROB", frob)

        trace = []
        for c in range(q):
            t = 0
            for k in range(n):
                fk = frob[k][c]
                t = add[t][fk] if add is not None else _code(
                    [(x + y) % p for x, y in zip(digs_of[t], digs_of[fk])], p)
            trace.append(t)
        object.__setattr__(self, "TRACE", trace)

        object.__setattr__(self, "kernel_args", (p, q, log, alog, add))
        object.__setattr__(self, "_reps", None)

    def __setattr__(self, name, value):
        raise AttributeError("FieldCtx is immutable")

    # ---------------------------------------------------------- arithmetic

    def add(self, a: int, b: int) -> int:
        if self.ADD is not None:
            return self.ADD[a][b]
        p = self.p
        out, pw = 0, 1
        while a or b:
            out += ((a % p) + (b % p)) % p * pw
            a //= p
            b //= p
            pw *= p
        return out

    def neg(self, a: int) -> int:
        return self.NEG[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.NEG[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.ALOG[self.LOG[a] + self.LOG[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self.ALOG[(self.q - 1) - self.LOG[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow_int(self, a: int, e: int) -> int:
        if a == 0:
            if e > 0:
                return 0
            if e == 0:
                return 1
            raise ZeroDivisionError("0 to a negative power")
        return self.ALOG[(self.LOG[a] * e) % (self.q - 1)]

    def frobenius_iter(self, a: int, k: int) -> int:
        return self.FROB[k % self.n][a]

    def p_root(self, a: int) -> int:
        """Unique p-th root, computed as a^(p^(n-1))."""
        return self.FROB[(self.n - 1) % self.n][a]

    def trace_to_prime(self, a: int) -> int:
        return self.TRACE[a]

    # ---------------------------------------------------------- conversions

    def to_coeffs(self, a: int) -> List[int]:
        return _digits(a, self.p, self.n)

    def from_coeffs(self, coeffs) -> int:
        if len(coeffs) != self.n or any(not 0 <= c < self.p for c in coeffs):
            raise ParameterError("bad coordinate vector")
        return _code(list(coeffs), self.p)

    def __repr__(self):
        return f"FieldCtx(p={self.p}, n={self.n})"


@lru_cache(maxsize=None)
def make_field(p: int, n: int) -> FieldCtx:
    if not isinstance(p, int) or p == 2 or not _is_prime(p):
        raise ParameterError(f"p must be an odd prime, got {p}")
    if not isinstance(n, int) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    return FieldCtx(p, n)


def basis_and_reps(ctx: FieldCtx) -> Tuple[List[int], List[int]]:
    """F_p-basis (power basis of the modulus root) and F_q*/F_p* reps.

    Representatives follow the leading-coordinate-1 rule: a nonzero code
    is kept iff its highest-index nonzero base-p digit equals 1.  Scaling
    by the inverse of the leading digit shows each F_p* orbit contains
    exactly one such element, so the list has (q-1)/(p-1) entries in
    ascending code order.
    """
    basis = [ctx.p ** i for i in range(ctx.n)]
    reps = ctx._reps
    if reps is None:
        reps = []
        for code in range(1, ctx.q):
            digs = ctx.to_coeffs(code)
            lead = max(i for i, d in enumerate(digs) if d)
            if digs[lead] == 1:
                reps.append(code)
        object.__setattr__(ctx, "_reps", reps)
    return basis, list(reps)
