"""Inner loops for sparse Laurent arithmetic over F_q, pure-Python backend.

Coefficients are integer codes < q (see `ff`), exponents are arbitrary
Python ints, polynomials are plain dicts {exponent: code} with no zero
values stored.  `_kernel.pyx` mirrors these signatures exactly; `_backend`
picks whichever imports.  Any change here must be mirrored there, since
the test suite runs the same battery against both backends.

Field data is passed unpacked: p, q, log/alog Zech tables (alog has
length 2(q-1) so log sums index it directly) and an addition table
`add` (list of q rows of q codes) or None, in which case addition falls
back to digitwise base-p arithmetic.
"""


def add_digits(a, b, p):
    """Add two field codes digitwise mod p (used when no table is built)."""
    out = 0
    pw = 1
    while a or b:
        out += ((a % p) + (b % p)) % p * pw
        a //= p
        b //= p
        pw *= p
    return out


def lp_mul(a, b, p, q, log, alog, add):
    """Product of two sparse Laurent polynomials (dict cross product)."""
    out = {}
    if len(a) > len(b):
        a, b = b, a
    for ea, ca in a.items():
        la = log[ca]
        for eb, cb in b.items():
            e = ea + eb
            c = alog[la + log[cb]]
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = add[prev][c] if add is not None else add_digits(prev, c, p)
                if s:
                    out[e] = s
                else:
                    del out[e]
    return out


def lp_add_scaled(a, b, c, p, q, log, alog, add):
    """Return a + c*b for a scalar code c."""
    out = dict(a)
    if c == 0:
        return out
    lc = log[c]
    for eb, cb in b.items():
        t = alog[lc + log[cb]]
        prev = out.get(eb)
        if prev is None:
            out[eb] = t
        else:
            s = add[prev][t] if add is not None else add_digits(prev, t, p)
            if s:
                out[eb] = s
            else:
                del out[eb]
    return out


def lp_map_pow(a, scale, ftab):
    """Monomial-wise p^k-th power: exponents scaled, coefficients mapped.

    Valid because x -> x^(p^k) is additive in characteristic p and ftab
    (an iterated-Frobenius table) never sends a nonzero code to zero.
    """
    return {e * scale: ftab[c] for e, c in a.items()}
