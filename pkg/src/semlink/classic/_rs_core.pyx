# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(256) Reed-Solomon kernels; same contract as ``_rs_py``."""

from libc.string cimport memset, memcpy

DEF PRIM = 0x11D
DEF MAXN = 256

cdef int GF_EXP[512]
cdef int GF_LOG[256]


cdef void _init_tables():
    cdef int i, x = 1
    for i in range(255):
        GF_EXP[i] = x
        GF_LOG[x] = i
        x <<= 1
        if x & 0x100:
            x ^= PRIM
    for i in range(255, 512):
        GF_EXP[i] = GF_EXP[i - 255]
    GF_LOG[0] = 0


_init_tables()


cdef inline int gmul(int a, int b) nogil:
    if a == 0 or b == 0:
        return 0
    return GF_EXP[GF_LOG[a] + GF_LOG[b]]


cdef inline int gdiv(int a, int b) nogil:
    if a == 0:
        return 0
    return GF_EXP[(GF_LOG[a] + 255 - GF_LOG[b]) % 255]


cdef inline int ginv_pow(int p) nogil:
    # alpha^(-p)
    return GF_EXP[(255 - (p % 255)) % 255]


cdef void _generator(int nsym, int* g) nogil:
    cdef int j, i, root, deg = 0
    g[0] = 1
    for j in range(nsym):
        root = GF_EXP[j]
        g[deg + 1] = 0
        for i in range(deg + 1, 0, -1):
            g[i] ^= gmul(g[i - 1], root)
        deg += 1


def generator_poly(int nsym):
    cdef int g[MAXN]
    _generator(nsym, g)
    return [g[i] for i in range(nsym + 1)]


def encode_parity(msg, int nsym):
    cdef int gen[MAXN]
    cdef int reg[MAXN]
    cdef int j, coef, lc, g
    cdef const unsigned char[:] m = bytes(msg)
    cdef Py_ssize_t i
    _generator(nsym, gen)
    memset(reg, 0, sizeof(int) * (nsym + 1))
    for i in range(m.shape[0]):
        coef = m[i] ^ reg[0]
        for j in range(nsym - 1):
            reg[j] = reg[j + 1]
        reg[nsym - 1] = 0
        if coef:
            lc = GF_LOG[coef]
            for j in range(nsym):
                g = gen[j + 1]
                if g:
                    reg[j] ^= GF_EXP[lc + GF_LOG[g]]
    return [reg[j] for j in range(nsym)]


cdef void _syndromes(int* cw, int n, int nsym, int* out) nogil:
    cdef int j, i, root, acc
    for j in range(nsym):
        root = GF_EXP[j]
        acc = 0
        for i in range(n):
            acc = gmul(acc, root) ^ cw[i]
        out[j] = acc


def syndromes(cw, int nsym):
    cdef int buf[MAXN]
    cdef int out[MAXN]
    cdef int n = len(cw), i
    for i in range(n):
        buf[i] = cw[i]
    _syndromes(buf, n, nsym, out)
    return [out[i] for i in range(nsym)]


cdef int _decode(int* cw, int n, int nsym) nogil:
    cdef int synd[MAXN]
    cdef int lam[MAXN]
    cdef int prev[MAXN]
    cdef int tmp[MAXN]
    cdef int omega[MAXN]
    cdef int positions[MAXN]
    cdef int i, j, r, d, coef, L = 0, m = 1, b = 1, npos = 0
    cdef int idx, p, x, xinv, acc, num, den, xp, nonzero = 0

    _syndromes(cw, n, nsym, synd)
    for j in range(nsym):
        if synd[j]:
            nonzero = 1
            break
    if not nonzero:
        return 0

    memset(lam, 0, sizeof(int) * (nsym + 1))
    memset(prev, 0, sizeof(int) * (nsym + 1))
    lam[0] = 1
    prev[0] = 1
    for r in range(nsym):
        d = synd[r]
        for i in range(1, L + 1):
            d ^= gmul(lam[i], synd[r - i])
        if d == 0:
            m += 1
            continue
        coef = gdiv(d, b)
        if 2 * L <= r:
            memcpy(tmp, lam, sizeof(int) * (nsym + 1))
            for i in range(nsym + 1 - m):
                lam[i + m] ^= gmul(coef, prev[i])
            L = r + 1 - L
            memcpy(prev, tmp, sizeof(int) * (nsym + 1))
            b = d
            m = 1
        else:
            for i in range(nsym + 1 - m):
                lam[i + m] ^= gmul(coef, prev[i])
            m += 1
    if 2 * L > nsym:
        return -1

    for idx in range(n):
        p = n - 1 - idx
        xinv = ginv_pow(p)
        acc = 0
        for i in range(L, -1, -1):
            acc = gmul(acc, xinv) ^ lam[i]
        if acc == 0:
            positions[npos] = idx
            npos += 1
    if npos != L:
        return -1

    for i in range(nsym):
        acc = 0
        for j in range(min(i, L) + 1):
            acc ^= gmul(lam[j], synd[i - j])
        omega[i] = acc

    for j in range(npos):
        idx = positions[j]
        p = n - 1 - idx
        x = GF_EXP[p]
        xinv = ginv_pow(p)
        num = 0
        for i in range(nsym - 1, -1, -1):
            num = gmul(num, xinv) ^ omega[i]
        den = 0
        # Lambda'(x) keeps odd-degree terms only; xp walks xinv^(i-1) for odd i
        xp = 1
        for i in range(1, L + 1, 2):
            den ^= gmul(lam[i], xp)
            xp = gmul(xp, gmul(xinv, xinv))
        if den == 0:
            return -1
        cw[idx] ^= gmul(x, gdiv(num, den))

    _syndromes(cw, n, nsym, synd)
    for j in range(nsym):
        if synd[j]:
            return -1
    return L


def decode(cw, int nsym):
    """Correct list ``cw`` in place; return corrected count or -1."""
    cdef int buf[MAXN]
    cdef int n = len(cw), i, res
    if n > 255:
        raise ValueError("codeword longer than 255 symbols")
    for i in range(n):
        buf[i] = cw[i]
    res = _decode(buf, n, nsym)
    for i in range(n):
        cw[i] = buf[i]
    return res
