"""Laurent polynomials and power-series utilities.

Three jobs live here: computing constant-term sequences ct(g^k) of a
Laurent polynomial g, rewriting torus-period and residue integrands as
honest rational functions ready for homogenization, and checking that a
differential operator annihilates a series prefix.

The constant-term walk is the one hot loop in the whole library that is
worth a compiled kernel: for integer coefficients it runs mod several
62-bit primes through `kernels.ct_series_modp` and reconstructs exact
values by CRT.  Rational or oversized inputs fall back to an exact dict
walk with the same pruning rule.
"""

import math

from .algebra import QQ, RatFunField, mpq, poly_ring
from .errors import InsufficientTerms
from . import kernels


class LaurentPoly:
    """Laurent polynomial with exponent-tuple keys.

    `terms` maps exponent tuples (ints, possibly negative) to nonzero
    coefficients.  Coefficients are ints or mpq; arithmetic never
    touches a coefficient field object, so parsing can stay exact and
    generic.  Zero coefficients are dropped on construction.
    """

    __slots__ = ("names", "terms")

    def __init__(self, names, terms):
        self.names = tuple(names)
        n = len(self.names)
        clean = {}
        for e, c in terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != n:
                raise ValueError(
                    f"exponent {e} has arity {len(e)}, expected {n}")
            if c:
                s = clean.get(e, 0) + c
                if s:
                    clean[e] = s
                else:
                    clean.pop(e, None)
        self.terms = clean

    @property
    def nvars(self):
        return len(self.names)

    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"cannot combine LaurentPoly with {other!r}")
        if other.names != self.names:
            raise ValueError("variable mismatch")
        return other

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.names == other.names and self.terms == other.terms

    def __hash__(self):
        return hash((self.names, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly(self.names, out)

    def __neg__(self):
        return LaurentPoly(self.names, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return LaurentPoly(self.names, out)

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            inv = LaurentPoly(self.names, {(0,) * self.nvars: 1}) / self
            return inv ** (-k)
        out = LaurentPoly(self.names, {(0,) * self.nvars: 1})
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        other = self._check(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if len(other.terms) != 1:
            raise ValueError("can only divide by a single Laurent term")
        ((de, dc),) = other.terms.items()
        out = {}
        for e, c in self.terms.items():
            q = mpq(c) / dc
            if q.denominator == 1:
                q = int(q)
            out[tuple(a - b for a, b in zip(e, de))] = q
        return LaurentPoly(self.names, out)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "*".join(
                f"{n}^{v}" if v != 1 else n
                for n, v in zip(self.names, e) if v)
            if mono:
                bits.append(mono if c == 1 else f"{c}*{mono}")
            else:
                bits.append(str(c))
        return " + ".join(bits)


def _prune_window(nvars, terms):
    lo = [0] * nvars
    hi = [0] * nvars
    for e in terms:
        for i, v in enumerate(e):
            if v < lo[i]:
                lo[i] = v
            if v > hi[i]:
                hi[i] = v
    return lo, hi


# lazily extended pool of 62-bit primes shared by every modular run
_PRIMES = []


def _prime_pool():
    from gmpy2 import next_prime
    i = 0
    cursor = 1 << 62
    while True:
        while i >= len(_PRIMES):
            cursor = int(next_prime(_PRIMES[-1] if _PRIMES else cursor))
            _PRIMES.append(cursor)
        yield _PRIMES[i]
        i += 1


def _ct_modular(g, count):
    items = list(g.terms.items())
    keys = [kernels.pack_exponents(e) for e, _ in items]
    coeffs = [int(c) for _, c in items]
    # |ct(g^k)| <= (sum |c|)^k, so a prime product > 2*bound pins the sign
    bound = max(sum(abs(c) for c in coeffs), 1) ** (count - 1)
    primes = []
    modulus = 1
    pool = _prime_pool()
    while modulus <= 2 * bound:
        p = next(pool)
        primes.append(p)
        modulus *= p
    columns = [
        kernels.ct_series_modp(keys, [c % p for c in coeffs],
                               g.nvars, count, p)
        for p in primes
    ]
    if len(primes) == 1:
        p = primes[0]
        return [r - p if r > p // 2 else r for r in columns[0]]
    basis = []
    for p in primes:
        m = modulus // p
        basis.append(m * pow(m, -1, p))
    out = []
    for idx in range(count):
        x = sum(col[idx] * b for col, b in zip(columns, basis)) % modulus
        out.append(x - modulus if x > modulus // 2 else x)
    return out


def _ct_exact(g, count):
    n = g.nvars
    lo, hi = _prune_window(n, g.terms)
    zero = (0,) * n
    out = [1] + [0] * (count - 1)
    cur = {zero: 1}
    for step in range(1, count):
        rem = count - 1 - step
        nxt = {}
        for e1, c1 in cur.items():
            for e2, c2 in g.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if rem:
                    dead = False
                    for i in range(n):
                        # unreachable from the constant term in rem steps
                        if e[i] > -rem * lo[i] or e[i] < -rem * hi[i]:
                            dead = True
                            break
                    if dead:
                        continue
                s = nxt.get(e, 0) + c1 * c2
                if s:
                    nxt[e] = s
                else:
                    nxt.pop(e, None)
        cur = nxt
        out[step] = cur.get(zero, 0)
        if not cur:
            break
    return out


def constant_term_series(g, count):
    """First `count` constant terms ct(g^0), ct(g^1), ..., exactly."""
    count = int(count)
    if count <= 0:
        return []
    if not g.terms:
        return [1] + [0] * (count - 1)
    integral = all(
        isinstance(c, int) or c.denominator == 1 for c in g.terms.values())
    max_exp = max(max(abs(v) for v in e) for e in g.terms)
    # packed lanes are 8-bit signed; bail out to the exact walk otherwise
    if integral and g.nvars <= 8 and (count - 1) * max_exp <= 127:
        return _ct_modular(g, count)
    return _ct_exact(g, count)


def laurent_to_rational(g, field=None):
    """Rewrite 1 / ((1 - t*g) * x_1...x_n) as num/den, cleared and reduced.

    The constant terms of the geometric series in t are exactly the torus
    periods of the returned fraction.  num and den are polynomials over
    field (default Q(t)) in g's variables, with per-variable common
    monomial factors cancelled.
    """
    F = field if field is not None else RatFunField(QQ, "t")
    ring = poly_ring(F, g.names)
    n = g.nvars
    if g.terms:
        m = tuple(max(0, -min(e[i] for e in g.terms)) for i in range(n))
    else:
        m = (0,) * n
    den_terms = {tuple(v + 1 for v in m): F.one}
    for e, c in g.terms.items():
        key = tuple(a + b + 1 for a, b in zip(m, e))
        val = F.neg(F.mul(F.t, F.coerce(c)))
        prev = den_terms.get(key)
        val = val if prev is None else F.add(prev, val)
        if F.is_zero(val):
            den_terms.pop(key, None)
        else:
            den_terms[key] = val
    shift = tuple(
        min(m[i], min(e[i] for e in den_terms)) for i in range(n))
    num = ring.from_exp_dict(
        {tuple(a - s for a, s in zip(m, shift)): F.one})
    den = ring.from_exp_dict(
        {tuple(a - s for a, s in zip(e, shift)): c
         for e, c in den_terms.items()})
    return num, den


def algebraic_to_rational(P, y=None):
    """Residue integrand y*dP/dy / P for a branch of the curve P = 0.

    Integrating this fraction in y along a small loop around one root
    picks out that root; the remaining variables are untouched.  `y`
    selects the branch variable by name or index, default the last one.
    """
    ring = P.ring
    if y is None:
        idx = len(ring.names) - 1
    elif isinstance(y, str):
        idx = ring.names.index(y)
    else:
        idx = int(y)
    dP = ring.partial_derivative(P, idx)
    if dP.is_zero():
        raise ValueError(f"{ring.names[idx]} does not occur in P")
    return ring.mul(ring.gen(idx), dP), P


def operator_annihilates_series(op, prefix, *, guard=1):
    """Exact truncated check that op annihilates the series sum c_k t^k.

    Needs enough terms that at least `guard` + 1 output coefficients are
    fully determined; raises InsufficientTerms otherwise.  A True answer
    certifies the recurrence only up to the prefix length.
    """
    need = op.order + op.coefficient_degree() + 1 + guard
    if len(prefix) < need:
        raise InsufficientTerms(
            f"need at least {need} series terms, got {len(prefix)}")
    K = op.base
    vals = [K.coerce(c) for c in prefix]
    return all(K.is_zero(v) for v in op.apply_to_series(vals))
