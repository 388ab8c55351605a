"""Pure-Python GF(256) Reed-Solomon kernels (reference backend).

Field GF(2^8) with primitive polynomial 0x11D and primitive element 2. The
generator polynomial has consecutive roots alpha^0 .. alpha^(nsym-1).
Codewords are lists with the highest-degree coefficient first: the k message
symbols followed by nsym parity symbols.
"""

PRIM = 0x11D

GF_EXP = [0] * 512
GF_LOG = [0] * 256

_x = 1
for _i in range(255):
    GF_EXP[_i] = _x
    GF_LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= PRIM
for _i in range(255, 512):
    GF_EXP[_i] = GF_EXP[_i - 255]
del _x, _i


def gf_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return GF_EXP[GF_LOG[a] + GF_LOG[b]]


def gf_div(a, b):
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return GF_EXP[(GF_LOG[a] + 255 - GF_LOG[b]) % 255]


def gf_pow(a, p):
    if a == 0:
        return 0 if p else 1
    return GF_EXP[(GF_LOG[a] * p) % 255]


def generator_poly(nsym):
    g = [1]
    for j in range(nsym):
        # multiply by (x - alpha^j), highest degree first
        root = GF_EXP[j]
        out = g + [0]
        for i in range(len(g)):
            out[i + 1] ^= gf_mul(g[i], root)
        g = out
    return g


def encode_parity(msg, nsym):
    """Remainder of msg(x) * x^nsym divided by the generator, as nsym symbols."""
    gen = generator_poly(nsym)
    reg = [0] * nsym
    for m in msg:
        coef = m ^ reg[0]
        reg = reg[1:] + [0]
        if coef:
            lc = GF_LOG[coef]
            for j in range(nsym):
                g = gen[j + 1]
                if g:
                    reg[j] ^= GF_EXP[lc + GF_LOG[g]]
    return reg


def syndromes(cw, nsym):
    out = [0] * nsym
    for j in range(nsym):
        root = GF_EXP[j]
        acc = 0
        for c in cw:  # Horner, highest degree first
            acc = gf_mul(acc, root) ^ c
        out[j] = acc
    return out


def decode(cw, nsym):
    """Correct ``cw`` (a list) in place; return the number of corrected symbols or -1."""
    n = len(cw)
    synd = syndromes(cw, nsym)
    if not any(synd):
        return 0

    # Berlekamp-Massey, polynomials lowest degree first
    lam = [1] + [0] * nsym
    prev = [1] + [0] * nsym
    L = 0
    m = 1
    b = 1
    for r in range(nsym):
        d = synd[r]
        for i in range(1, L + 1):
            d ^= gf_mul(lam[i], synd[r - i])
        if d == 0:
            m += 1
            continue
        coef = gf_div(d, b)
        if 2 * L <= r:
            tmp = lam[:]
            for i in range(nsym + 1 - m):
                lam[i + m] ^= gf_mul(coef, prev[i])
            L = r + 1 - L
            prev = tmp
            b = d
            m = 1
        else:
            for i in range(nsym + 1 - m):
                lam[i + m] ^= gf_mul(coef, prev[i])
            m += 1
    if 2 * L > nsym:
        return -1

    # Chien search over the (possibly shortened) codeword positions
    positions = []
    for idx in range(n):
        p = n - 1 - idx
        xinv = GF_EXP[(255 - p) % 255]
        acc = 0
        for i in range(L, -1, -1):
            acc = gf_mul(acc, xinv) ^ lam[i]
        if acc == 0:
            positions.append(idx)
    if len(positions) != L:
        return -1

    # Forney: e = X * Omega(X^-1) / Lambda'(X^-1), Omega = S*Lambda mod x^nsym
    omega = [0] * nsym
    for i in range(nsym):
        acc = 0
        for j in range(min(i, L) + 1):
            acc ^= gf_mul(lam[j], synd[i - j])
        omega[i] = acc
    for idx in positions:
        p = n - 1 - idx
        x = GF_EXP[p]
        xinv = GF_EXP[(255 - p) % 255]
        num = 0
        for i in range(nsym - 1, -1, -1):
            num = gf_mul(num, xinv) ^ omega[i]
        den = 0
        for i in range(1, L + 1, 2):
            den ^= gf_mul(lam[i], gf_pow(xinv, i - 1))
        if den == 0:
            return -1
        cw[idx] ^= gf_mul(x, gf_div(num, den))

    if any(syndromes(cw, nsym)):
        return -1
    return L
