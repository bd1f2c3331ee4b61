"""Pure-Python kernels for the hot loops.

The compiled extension exports the same functions with the same packed
monomial convention; this module is the fallback and the reference
implementation.  Exponent vectors are packed into a single integer,
8 bits per variable with a bias of 128, lowest variable in the lowest
byte.  All arithmetic is modular.
"""

BACKEND = "python"

_BIAS = 128
_LANE = 8


def pack_exponents(exps):
    key = 0
    for i, e in enumerate(exps):
        if not -_BIAS <= e < _BIAS:
            raise OverflowError("exponent out of packed range")
        key |= (e + _BIAS) << (_LANE * i)
    return key


def unpack_exponents(key, nvars):
    return tuple(((key >> (_LANE * i)) & 0xFF) - _BIAS for i in range(nvars))


def ct_series_modp(keys, coeffs, nvars, count, p):
    """Constant terms of g^k mod p for k = 0..count-1.

    `keys`/`coeffs` give the terms of g, packed as above.  Iterates
    multiplication by g, pruning every monomial that can no longer reach
    the origin within the remaining number of steps.
    """
    zero_key = pack_exponents((0,) * nvars)
    out = [1 % p] + [0] * (count - 1)
    if count == 1 or not keys:
        return out
    lo = [min(((k >> (_LANE * i)) & 0xFF) for k in keys) - _BIAS
          for i in range(nvars)]
    hi = [max(((k >> (_LANE * i)) & 0xFF) for k in keys) - _BIAS
          for i in range(nvars)]
    cur = {zero_key: 1 % p}
    offset = zero_key
    for step in range(1, count):
        rem = count - 1 - step
        nxt = {}
        for k1, c1 in cur.items():
            for k2, c2 in zip(keys, coeffs):
                k = k1 + k2 - offset
                c = nxt.get(k)
                if c is None:
                    nxt[k] = c1 * c2 % p
                else:
                    nxt[k] = (c + c1 * c2) % p
        if rem > 0:
            keep = {}
            for k, c in nxt.items():
                if not c:
                    continue
                for i in range(nvars):
                    e = ((k >> (_LANE * i)) & 0xFF) - _BIAS
                    if e > -rem * lo[i] or e < -rem * hi[i]:
                        break
                else:
                    keep[k] = c
            nxt = keep
        cur = nxt
        out[step] = cur.get(zero_key, 0)
        if not cur:
            break
    return out


def mul_modp(keys1, coeffs1, keys2, coeffs2, nvars, p):
    """Sparse product of two packed polynomials mod p.  Returns parallel
    key/coefficient lists sorted by key."""
    offset = pack_exponents((0,) * nvars)
    acc = {}
    for k1, c1 in zip(keys1, coeffs1):
        for k2, c2 in zip(keys2, coeffs2):
            k = k1 + k2 - offset
            c = acc.get(k)
            if c is None:
                acc[k] = c1 * c2 % p
            else:
                acc[k] = (c + c1 * c2) % p
    ks = sorted(k for k, c in acc.items() if c)
    return ks, [acc[k] for k in ks]
