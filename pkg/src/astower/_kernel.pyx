# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of `_kernel_py`.  Same functions, same semantics.

Exponents stay Python objects (they can be large); coefficient codes are
machine ints.  Keep in lockstep with `_kernel_py`; the tests diff the two.
"""


cpdef long add_digits(long a, long b, long p):
    cdef long out = 0
    cdef long pw = 1
    while a or b:
        out += ((a % p) + (b % p)) % p * pw
        a //= p
        b //= p
        pw *= p
    return out


def lp_mul(dict a, dict b, long p, long q, list log, list alog, add):
    cdef dict out = {}
    cdef long la, c, prev, s
    cdef list row
    cdef bint have_table = add is not None
    cdef list add_t = add if have_table else None
    if len(a) > len(b):
        a, b = b, a
    for ea, ca in a.items():
        la = <long> log[<long> ca]
        for eb, cb in b.items():
            e = ea + eb
            c = <long> alog[la + <long> log[<long> cb]]
            if e in out:
                prev = <long> out[e]
                if have_table:
                    row = <list> add_t[prev]
                    s = <long> row[c]
                else:
                    s = add_digits(prev, c, p)
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
    return out


def lp_add_scaled(dict a, dict b, long c, long p, long q, list log, list alog, add):
    cdef dict out = dict(a)
    cdef long lc, t, prev, s
    cdef list row
    cdef bint have_table = add is not None
    cdef list add_t = add if have_table else None
    if c == 0:
        return out
    lc = <long> log[c]
    for eb, cb in b.items():
        t = <long> alog[lc + <long> log[<long> cb]]
        if eb in out:
            prev = <long> out[eb]
            if have_table:
                row = <list> add_t[prev]
                s = <long> row[t]
            else:
                s = add_digits(prev, t, p)
            if s:
                out[eb] = s
            else:
                del out[eb]
        else:
            out[eb] = t
    return out


def lp_map_pow(dict a, scale, list ftab):
    cdef dict out = {}
    for e, c in a.items():
        out[e * scale] = ftab[<long> c]
    return out
