"""Coefficient fields, univariate polynomial helpers, monomial orders and
sparse multivariate polynomials.

Multivariate polynomials are stored as term lists sorted strictly decreasing
in the monomial order.  A monomial is packed into a single Python int, eight
bits per lane, most significant lane first, so that comparing two packed keys
as integers realizes the monomial order.  Rings with at most eight lanes fit
in an unsigned 64-bit word, which is what the compiled kernels require; wider
rings still work through the pure-Python paths.
"""

from .errors import (
    DegenerateEvaluation,
    DegreeOverflow,
    FieldMismatch,
    NoDerivation,
)

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover
    from fractions import Fraction as mpq

LANE_BITS = 8
LANE_MAX = (1 << LANE_BITS) - 1


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------

class RationalField:
    """Arbitrary-precision rationals."""

    char = 0

    def __init__(self):
        self.zero = mpq(0)
        self.one = mpq(1)

    def coerce(self, a):
        if isinstance(a, (int, type(self.zero))):
            return mpq(a)
        raise FieldMismatch(f"cannot coerce {a!r} into Q")

    def from_int(self, n):
        return mpq(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    def div(self, a, b):
        return a / b

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        return a == b

    def derive(self, a):
        raise NoDerivation("Q carries no derivation")

    def to_str(self, a):
        return str(a)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


class PrimeField:
    """Z/p for a prime p; elements are plain ints in [0, p)."""

    def __init__(self, p):
        self.p = p
        self.char = p
        self.zero = 0
        self.one = 1 % p

    def coerce(self, a):
        if isinstance(a, int):
            return a % self.p
        # exact rationals reduce mod p when the denominator is invertible
        num, den = a.numerator, a.denominator
        d = int(den) % self.p
        if d == 0:
            raise DegenerateEvaluation(f"denominator of {a} vanishes mod {self.p}")
        return int(num) % self.p * pow(d, -1, self.p) % self.p

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * pow(b, -1, self.p) % self.p

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def derive(self, a):
        raise NoDerivation(f"F_{self.p} carries no derivation")

    def to_str(self, a):
        return str(a)

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


_prime_fields = {}


def prime_field(p):
    K = _prime_fields.get(p)
    if K is None:
        K = _prime_fields[p] = PrimeField(p)
    return K


# ---------------------------------------------------------------------------
# univariate polynomials over a field
#
# Coefficient tuples, lowest degree first, no trailing zeros; () is zero.
# ---------------------------------------------------------------------------

def u_trim(K, a):
    n = len(a)
    z = K.is_zero
    while n and z(a[n - 1]):
        n -= 1
    return tuple(a[:n])


def u_const(K, c):
    return () if K.is_zero(c) else (c,)


def u_add(K, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    add = K.add
    for i, c in enumerate(b):
        out[i] = add(out[i], c)
    return u_trim(K, out)


def u_neg(K, a):
    neg = K.neg
    return tuple(neg(c) for c in a)


def u_sub(K, a, b):
    return u_add(K, a, u_neg(K, b))


def u_scale(K, a, c):
    if K.is_zero(c):
        return ()
    mul = K.mul
    return tuple(mul(c, x) for x in a)


def u_mul(K, a, b):
    if not a or not b:
        return ()
    out = [K.zero] * (len(a) + len(b) - 1)
    add, mul = K.add, K.mul
    for i, x in enumerate(a):
        if K.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = add(out[i + j], mul(x, y))
    return u_trim(K, out)


def u_divmod(K, a, b):
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    q = [K.zero] * max(0, len(a) - len(b) + 1)
    r = list(a)
    inv_lc = K.inv(b[-1])
    sub, mul = K.sub, K.mul
    db = len(b) - 1
    while len(r) >= len(b):
        if K.is_zero(r[-1]):
            r.pop()
            continue
        c = mul(r[-1], inv_lc)
        k = len(r) - 1 - db
        q[k] = c
        for i in range(db):
            r[k + i] = sub(r[k + i], mul(c, b[i]))
        r.pop()
    return u_trim(K, q), u_trim(K, r)


def u_rem(K, a, b):
    return u_divmod(K, a, b)[1]


def u_monic(K, a):
    if not a:
        return a
    lc = a[-1]
    if K.eq(lc, K.one):
        return a
    return u_scale(K, a, K.inv(lc))


def u_eval(K, a, x):
    acc = K.zero
    add, mul = K.add, K.mul
    for c in reversed(a):
        acc = add(mul(acc, x), c)
    return acc


def u_deriv(K, a):
    return u_trim(K, [K.mul(K.from_int(i), a[i]) for i in range(1, len(a))])


def u_pow(K, a, n):
    out = (K.one,)
    for _ in range(n):
        out = u_mul(K, out, a)
    return out


def u_gcd(K, a, b):
    """Monic gcd.  Over Q the computation clears denominators and runs a
    primitive PRS over Z to dodge the coefficient swell of plain Euclid."""
    if not a:
        return u_monic(K, b)
    if not b:
        return u_monic(K, a)
    if K.char == 0:
        g = _z_gcd_primitive(_q_clear(a)[0], _q_clear(b)[0])
        return u_monic(K, tuple(K.from_int(c) for c in g))
    while b:
        a, b = b, u_rem(K, a, b)
    return u_monic(K, a)


def u_xgcd(K, a, b):
    """Extended gcd: returns monic g and s, t with s*a + t*b = g."""
    r0, r1 = a, b
    s0, s1 = (K.one,), ()
    t0, t1 = (), (K.one,)
    while r1:
        q, r = u_divmod(K, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, u_sub(K, s0, u_mul(K, q, s1))
        t0, t1 = t1, u_sub(K, t0, u_mul(K, q, t1))
    if r0:
        c = K.inv(r0[-1])
        r0 = u_scale(K, r0, c)
        s0 = u_scale(K, s0, c)
        t0 = u_scale(K, t0, c)
    return r0, s0, t0


def u_to_str(K, a, var):
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if K.is_zero(c):
            continue
        cs = K.to_str(c)
        if i == 0:
            parts.append(cs)
        else:
            xp = var if i == 1 else f"{var}^{i}"
            if cs == "1":
                parts.append(xp)
            elif cs == "-1":
                parts.append(f"-{xp}")
            else:
                parts.append(f"{cs}*{xp}")
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def _q_clear(a):
    """Rational coefficient tuple -> (integer tuple, common denominator)."""
    den = 1
    for c in a:
        d = c.denominator
        den = den * d // _int_gcd(den, d)
    return tuple(int(c * den) for c in a), den


def _int_gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _z_content(a):
    g = 0
    for c in a:
        g = _int_gcd(g, c)
        if g == 1:
            return 1
    return g or 1


def _z_primitive(a):
    a = tuple(a)
    while a and a[-1] == 0:
        a = a[:-1]
    if not a:
        return a
    g = _z_content(a)
    if a[-1] < 0:
        g = -g
    return tuple(c // g for c in a)


def _z_pseudo_rem(a, b):
    r = list(a)
    db = len(b) - 1
    lcb = b[-1]
    while len(r) > db:
        if r[-1] == 0:
            r.pop()
            continue
        c = r.pop()
        k = len(r) - db
        r = [lcb * x for x in r]
        for i in range(db):
            r[k + i] -= c * b[i]
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def _z_gcd_primitive(a, b):
    """Primitive gcd in Z[x] (content discarded), positive leading coefficient."""
    a, b = _z_primitive(a), _z_primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _z_pseudo_rem(a, b)
        a, b = b, _z_primitive(r)
    return a


# ---------------------------------------------------------------------------
# rational functions K(t)
# ---------------------------------------------------------------------------

class RatFunField:
    """Field of rational functions over a base field, in one variable.

    Elements are (num, den) pairs of coefficient tuples with den monic and
    gcd(num, den) = 1; the zero element has num = ().  The pair is canonical,
    so tuple equality is field equality.
    """

    def __init__(self, base, var="t"):
        self.base = base
        self.var = var
        self.char = base.char
        self._one_poly = (base.one,)
        self.zero = ((), self._one_poly)
        self.one = (self._one_poly, self._one_poly)
        self.t = ((base.zero, base.one), self._one_poly)

    def make(self, num, den=None):
        """Build an element from coefficient sequences, normalizing."""
        K = self.base
        num = u_trim(K, tuple(K.coerce(c) for c in num))
        if den is None:
            den = self._one_poly
        else:
            den = u_trim(K, tuple(K.coerce(c) for c in den))
        return self._norm(num, den)

    def _norm(self, num, den):
        K = self.base
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        g = u_gcd(K, num, den)
        if len(g) > 1:
            num = u_divmod(K, num, g)[0]
            den = u_divmod(K, den, g)[0]
        lc = den[-1]
        if not K.eq(lc, K.one):
            c = K.inv(lc)
            num = u_scale(K, num, c)
            den = u_scale(K, den, c)
        return (num, den)

    def coerce(self, a):
        if isinstance(a, tuple) and len(a) == 2 and isinstance(a[0], tuple):
            return a
        if isinstance(a, int):
            return self.from_int(a)
        return (u_const(self.base, self.base.coerce(a)), self._one_poly)

    def from_int(self, n):
        return (u_const(self.base, self.base.from_int(n)), self._one_poly)

    def from_poly(self, coeffs):
        return (u_trim(self.base, tuple(coeffs)), self._one_poly)

    def add(self, a, b):
        K = self.base
        na, da = a
        nb, db = b
        if not na:
            return b
        if not nb:
            return a
        if da == db:
            return self._norm(u_add(K, na, nb), da)
        g = u_gcd(K, da, db)
        if len(g) == 1:
            num = u_add(K, u_mul(K, na, db), u_mul(K, nb, da))
            if not num:
                return self.zero
            return (num, u_mul(K, da, db))  # coprime parts, already reduced
        da1 = u_divmod(K, da, g)[0]
        db1 = u_divmod(K, db, g)[0]
        num = u_add(K, u_mul(K, na, db1), u_mul(K, nb, da1))
        if not num:
            return self.zero
        h = u_gcd(K, num, g)
        if len(h) > 1:
            num = u_divmod(K, num, h)[0]
            g = u_divmod(K, g, h)[0]
        return self._norm(num, u_mul(K, u_mul(K, da1, db1), g))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        return (u_neg(self.base, a[0]), a[1])

    def mul(self, a, b):
        K = self.base
        na, da = a
        nb, db = b
        if not na or not nb:
            return self.zero
        g1 = u_gcd(K, na, db)
        if len(g1) > 1:
            na = u_divmod(K, na, g1)[0]
            db = u_divmod(K, db, g1)[0]
        g2 = u_gcd(K, nb, da)
        if len(g2) > 1:
            nb = u_divmod(K, nb, g2)[0]
            da = u_divmod(K, da, g2)[0]
        num = u_mul(K, na, nb)
        den = u_mul(K, da, db)
        lc = den[-1]
        if not K.eq(lc, K.one):
            c = K.inv(lc)
            num = u_scale(K, num, c)
            den = u_scale(K, den, c)
        return (num, den)

    def inv(self, a):
        num, den = a
        if not num:
            raise ZeroDivisionError("inverting zero rational function")
        K = self.base
        lc = num[-1]
        if not K.eq(lc, K.one):
            c = K.inv(lc)
            return (u_scale(K, den, c), u_scale(K, num, c))
        return (den, num)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return not a[0]

    def eq(self, a, b):
        return a == b

    def derive(self, a):
        """d/dt by the quotient rule."""
        K = self.base
        num, den = a
        if not num:
            return self.zero
        dnum = u_deriv(K, num)
        if len(den) == 1:
            return (dnum, den) if dnum else self.zero
        dden = u_deriv(K, den)
        top = u_sub(K, u_mul(K, dnum, den), u_mul(K, num, dden))
        return self._norm(top, u_mul(K, den, den))

    def eval_at(self, a, u, target=None, cmap=None):
        """Evaluate at t = u over `target` (default: the base field).

        `cmap` maps base coefficients into the target field; raises
        DegenerateEvaluation when the denominator vanishes at u.
        """
        T = target if target is not None else self.base
        if cmap is None:
            cmap = T.coerce
        num, den = a
        nv = u_eval(T, tuple(cmap(c) for c in num), u)
        dv = u_eval(T, tuple(cmap(c) for c in den), u)
        if T.is_zero(dv):
            raise DegenerateEvaluation(
                f"denominator vanishes at {self.var} = {u}")
        return T.div(nv, dv)

    def num_degree(self, a):
        return len(a[0]) - 1

    def den_degree(self, a):
        return len(a[1]) - 1

    def to_str(self, a):
        num, den = a
        ns = u_to_str(self.base, num, self.var)
        if len(den) == 1:
            return ns
        ds = u_to_str(self.base, den, self.var)
        if len(num) > 1 or (num and " " in ns):
            ns = f"({ns})"
        return f"{ns}/({ds})"

    def __repr__(self):
        return f"{self.base!r}({self.var})"

    def __eq__(self, other):
        return (isinstance(other, RatFunField) and other.base == self.base
                and other.var == self.var)

    def __hash__(self):
        return hash(("RatFun", self.base, self.var))


def qq_mod_p(a, p):
    """Reduce an exact rational mod p; DegenerateEvaluation if p divides the
    denominator."""
    den = int(a.denominator) % p
    if den == 0:
        raise DegenerateEvaluation(f"denominator of {a} vanishes mod {p}")
    return int(a.numerator) % p * pow(den, -1, p) % p


# ---------------------------------------------------------------------------
# monomial orders
# ---------------------------------------------------------------------------

class TermOrder:
    """Packs exponent vectors into ints whose integer order is the term order.

    Lane kinds: ("deg", vars) stores the sum of the listed exponents,
    ("raw", i) stores e_i, ("neg", i) stores LANE_MAX - e_i.  Lanes are listed
    most significant first.
    """

    __slots__ = ("kind", "nvars", "lanes", "nlanes", "offset", "_lane_shift",
                 "_var_lanes", "_guard_shifts", "_unpack_cache", "negmask_lsb")

    def __init__(self, kind, nvars, lanes):
        self.kind = kind
        self.nvars = nvars
        self.lanes = tuple(lanes)
        self.nlanes = len(lanes)
        shifts = [LANE_BITS * (self.nlanes - 1 - i) for i in range(self.nlanes)]
        self._lane_shift = tuple(shifts)
        offset = 0
        var_lanes = []
        guards = []
        negmask = 0
        for (kindc, data), sh in zip(self.lanes, shifts):
            if kindc == "neg":
                offset |= LANE_MAX << sh
                var_lanes.append((data, sh, True))
                negmask |= 1 << (sh // LANE_BITS)
            elif kindc == "raw":
                var_lanes.append((data, sh, False))
                guards.append(sh)
            else:
                guards.append(sh)
        self.offset = offset
        self._var_lanes = tuple(var_lanes)
        self._guard_shifts = tuple(guards)
        self._unpack_cache = {}
        self.negmask_lsb = negmask
        covered = {v for v, _, _ in var_lanes}
        assert covered == set(range(nvars)), "every variable needs its own lane"

    def pack(self, exps):
        v = 0
        for (kindc, data), sh in zip(self.lanes, self._lane_shift):
            if kindc == "deg":
                s = 0
                for i in data:
                    s += exps[i]
            elif kindc == "raw":
                s = exps[data]
            else:
                s = LANE_MAX - exps[data]
            if s < 0 or s > LANE_MAX:
                raise DegreeOverflow(f"exponent lane {s} out of range")
            v |= s << sh
        return v

    def unpack(self, key):
        t = self._unpack_cache.get(key)
        if t is None:
            e = [0] * self.nvars
            for i, sh, neg in self._var_lanes:
                x = (key >> sh) & LANE_MAX
                e[i] = LANE_MAX - x if neg else x
            t = tuple(e)
            self._unpack_cache[key] = t
        return t

    def mul_key(self, a, b):
        for sh in self._guard_shifts:
            if ((a >> sh) & LANE_MAX) + ((b >> sh) & LANE_MAX) > LANE_MAX:
                raise DegreeOverflow("monomial product overflows a lane")
        return a + b - self.offset

    def div_key(self, m, d):
        # caller guarantees d | m
        return m - d + self.offset

    def divides(self, d, m):
        ed = self.unpack(d)
        em = self.unpack(m)
        for a, b in zip(ed, em):
            if a > b:
                return False
        return True

    def lcm_key(self, a, b):
        ea = self.unpack(a)
        eb = self.unpack(b)
        return self.pack(tuple(max(x, y) for x, y in zip(ea, eb)))

    def total_degree(self, key):
        return sum(self.unpack(key))

    def __repr__(self):
        return f"TermOrder({self.kind}, {self.nvars} vars)"


def grevlex_order(nvars):
    """Graded reverse lexicographic; variable 0 is the largest."""
    lanes = [("deg", tuple(range(nvars)))]
    lanes += [("neg", i) for i in range(nvars - 1, -1, -1)]
    return TermOrder("grevlex", nvars, lanes)


def block_uv_order(nvars):
    """Order for the u,v form-encoding ring (variables u, v, x_0, ...).

    Compares the u exponent first, then grevlex on (v, x_0, ..., x_n).  On
    encoded n-forms this acts position-over-term with the volume component
    largest, ties broken by grevlex on the x part.
    """
    rest = tuple(range(1, nvars))
    lanes = [("raw", 0), ("deg", rest)]
    lanes += [("neg", i) for i in range(nvars - 1, 1, -1)]
    lanes += [("neg", 1)]
    return TermOrder("block_uv", nvars, lanes)


def block_uvt_order(nvars):
    """Same as block_uv but with a trailing parameter variable t, compared
    last; a basis computed this way stays one when t moves into the field."""
    mid = tuple(range(1, nvars - 1))
    lanes = [("raw", 0), ("deg", mid)]
    lanes += [("neg", i) for i in range(nvars - 2, 1, -1)]
    lanes += [("neg", 1), ("raw", nvars - 1)]
    return TermOrder("block_uvt", nvars, lanes)


def monomial_compare(order, k1, k2):
    """-1, 0 or 1 as the packed monomial k1 compares to k2."""
    if k1 < k2:
        return -1
    if k1 > k2:
        return 1
    return 0


def exponents_of_degree(nvars, d):
    """Yield all exponent tuples of total degree d, in a fixed order."""
    if nvars == 1:
        yield (d,)
        return
    for head in range(d, -1, -1):
        for rest in exponents_of_degree(nvars - 1, d - head):
            yield (head,) + rest


def monomials_of_degree(order, d):
    """Packed keys of all degree-d monomials, sorted descending."""
    if d < 0:
        return []
    keys = [order.pack(e) for e in exponents_of_degree(order.nvars, d)]
    keys.sort(reverse=True)
    return keys


# ---------------------------------------------------------------------------
# sparse multivariate polynomials
# ---------------------------------------------------------------------------

class MultiPoly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms  # tuple of (packed key, coeff), strictly decreasing

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ring), self.terms))

    def __add__(self, other):
        return self.ring.add(self, self.ring.coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.ring.sub(self, self.ring.coerce(other))

    def __rsub__(self, other):
        return self.ring.sub(self.ring.coerce(other), self)

    def __neg__(self):
        return self.ring.neg(self)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring.mul(self, other)
        return self.ring.scale(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        return self.ring.pow(self, n)

    def lm(self):
        return self.terms[0][0]

    def lc(self):
        return self.terms[0][1]

    def lt(self):
        return self.terms[0]

    def total_degree(self):
        if not self.terms:
            return -1
        td = self.ring.order.total_degree
        return max(td(k) for k, _ in self.terms)

    def homogeneous_degree(self):
        """Common total degree of all terms, or None."""
        if not self.terms:
            return None
        td = self.ring.order.total_degree
        d = td(self.terms[0][0])
        for k, _ in self.terms[1:]:
            if td(k) != d:
                return None
        return d

    def num_terms(self):
        return len(self.terms)

    def __repr__(self):
        return self.ring.to_str(self)


class PolyRing:
    def __init__(self, field, names, order=None):
        self.field = field
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.order = order if order is not None else grevlex_order(self.nvars)
        assert self.order.nvars == self.nvars
        self.zero = MultiPoly(self, ())
        self.one = MultiPoly(self, ((self.order.pack((0,) * self.nvars), field.one),))
        self._key0 = self.order.pack((0,) * self.nvars)

    # -- construction -----------------------------------------------------

    def gen(self, i):
        e = [0] * self.nvars
        e[i] = 1
        return MultiPoly(self, ((self.order.pack(e), self.field.one),))

    def gens(self):
        return tuple(self.gen(i) for i in range(self.nvars))

    def constant(self, c):
        c = self.field.coerce(c)
        if self.field.is_zero(c):
            return self.zero
        return MultiPoly(self, ((self._key0, c),))

    def coerce(self, a):
        if isinstance(a, MultiPoly):
            if a.ring is not self:
                raise FieldMismatch("polynomial from a different ring")
            return a
        return self.constant(a)

    def monomial(self, exps, coeff=None):
        c = self.field.one if coeff is None else self.field.coerce(coeff)
        if self.field.is_zero(c):
            return self.zero
        return MultiPoly(self, ((self.order.pack(tuple(exps)), c),))

    def term(self, key, coeff):
        return MultiPoly(self, ((key, coeff),))

    def from_terms(self, pairs):
        """Build from arbitrary (key, coeff) pairs: sorts, combines, prunes."""
        acc = {}
        F = self.field
        for k, c in pairs:
            if k in acc:
                acc[k] = F.add(acc[k], c)
            else:
                acc[k] = c
        terms = [(k, c) for k, c in acc.items() if not F.is_zero(c)]
        terms.sort(key=lambda t: t[0], reverse=True)
        return MultiPoly(self, tuple(terms))

    def from_exp_dict(self, d):
        pack = self.order.pack
        return self.from_terms((pack(e), self.field.coerce(c)) for e, c in d.items())

    # -- arithmetic --------------------------------------------------------

    def add(self, a, b):
        return MultiPoly(self, _add_terms(self.field, a.terms, b.terms))

    def sub(self, a, b):
        return MultiPoly(self, _add_terms(self.field, a.terms,
                                          _negate_terms(self.field, b.terms)))

    def neg(self, a):
        return MultiPoly(self, _negate_terms(self.field, a.terms))

    def scale(self, a, c):
        c = self.field.coerce(c)
        if self.field.is_zero(c):
            return self.zero
        mul = self.field.mul
        return MultiPoly(self, tuple((k, mul(c, x)) for k, x in a.terms))

    def mul_term(self, a, key, c):
        """a * c*x^key."""
        if self.field.is_zero(c) or not a.terms:
            return self.zero
        return MultiPoly(self, _shift_scale_terms(self.field, self.order,
                                                  a.terms, c, key))

    def mul(self, a, b):
        if a.ring is not self or b.ring is not self:
            raise FieldMismatch("operands from different rings")
        ta, tb = a.terms, b.terms
        if not ta or not tb:
            return self.zero
        if len(ta) < len(tb):
            ta, tb = tb, ta
        F = self.field
        mul_key = self.order.mul_key
        fmul, fadd, fz = F.mul, F.add, F.is_zero
        acc = {}
        for kb, cb in tb:
            for ka, ca in ta:
                k = mul_key(ka, kb)
                c = fmul(ca, cb)
                if k in acc:
                    acc[k] = fadd(acc[k], c)
                else:
                    acc[k] = c
        terms = [(k, c) for k, c in acc.items() if not fz(c)]
        terms.sort(key=lambda t: t[0], reverse=True)
        return MultiPoly(self, tuple(terms))

    def pow(self, a, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = self.one
        base = a
        while n:
            if n & 1:
                out = self.mul(out, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return out

    # -- calculus and substitution ------------------------------------------

    def partial_derivative(self, a, i):
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        order = self.order
        F = self.field
        out = []
        for k, c in a.terms:
            e = order.unpack(k)
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            out.append((order.pack(e2), F.mul(c, F.from_int(e[i]))))
        # differentiation preserves the term order within a fixed variable,
        # but two distinct monomials can collide (they cannot, actually, for
        # distinct exponents in one variable); sort defensively anyway
        out.sort(key=lambda t: t[0], reverse=True)
        return MultiPoly(self, tuple(out))

    def substitute(self, a, assignment):
        """Substitute field elements or same-ring polynomials for variables.

        `assignment` maps variable names or indices to values.  Returns a
        polynomial in the same ring (substituted variables simply no longer
        occur)."""
        sub = {}
        for key, val in assignment.items():
            i = self.names.index(key) if isinstance(key, str) else key
            if isinstance(val, MultiPoly):
                if val.ring is not self:
                    raise FieldMismatch("substitution value from another ring")
                sub[i] = val
            else:
                sub[i] = self.constant(val)
        order = self.order
        out = self.zero
        for k, c in a.terms:
            e = order.unpack(k)
            kept = list(e)
            piece = None
            for i, p in sub.items():
                if e[i]:
                    kept[i] = 0
                    q = self.pow(p, e[i])
                    piece = q if piece is None else self.mul(piece, q)
            base = self.term(order.pack(kept), c)
            out = self.add(out, base if piece is None else self.mul(base, piece))
        return out

    def map_coefficients(self, a, fn, new_ring=None):
        """Apply fn to each coefficient (dropping zeros); keys are reused, so
        new_ring must share this ring's variable count and order shape."""
        R = new_ring if new_ring is not None else self
        F = R.field
        out = [(k, v) for k, v in ((k, fn(c)) for k, c in a.terms)
               if not F.is_zero(v)]
        return MultiPoly(R, tuple(out))

    def with_field(self, field):
        return PolyRing(field, self.names, self.order)

    # -- display -------------------------------------------------------------

    def monomial_str(self, key):
        e = self.order.unpack(key)
        parts = []
        for i, ei in enumerate(e):
            if ei == 1:
                parts.append(self.names[i])
            elif ei > 1:
                parts.append(f"{self.names[i]}^{ei}")
        return "*".join(parts)

    def to_str(self, a):
        if not a.terms:
            return "0"
        F = self.field
        parts = []
        for k, c in a.terms:
            ms = self.monomial_str(k)
            cs = F.to_str(c)
            neg = cs.startswith("-") and "+" not in cs and " " not in cs[1:]
            if neg:
                cs = cs[1:]
            if any(ch in cs for ch in "+-/ ") and ms:
                cs = f"({cs})"
            if not ms:
                body = cs
            elif cs == "1":
                body = ms
            else:
                body = f"{cs}*{ms}"
            parts.append(("-" if neg else "+", body))
        # leading sign printed only when negative
        sign, body = parts[0]
        out = body if sign == "+" else f"-{body}"
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _add_terms(F, ta, tb):
    if not ta:
        return tb
    if not tb:
        return ta
    out = []
    i = j = 0
    la, lb = len(ta), len(tb)
    fadd, fz = F.add, F.is_zero
    while i < la and j < lb:
        ka, ca = ta[i]
        kb, cb = tb[j]
        if ka > kb:
            out.append(ta[i])
            i += 1
        elif ka < kb:
            out.append(tb[j])
            j += 1
        else:
            c = fadd(ca, cb)
            if not fz(c):
                out.append((ka, c))
            i += 1
            j += 1
    out.extend(ta[i:])
    out.extend(tb[j:])
    return tuple(out)


def _negate_terms(F, ts):
    fneg = F.neg
    return tuple((k, fneg(c)) for k, c in ts)


def _shift_scale_terms(F, order, ts, c, mkey):
    """c * x^mkey * ts; key transform preserves the sorted order."""
    mul_key = order.mul_key
    fmul = F.mul
    if mkey is None:
        return tuple((k, fmul(c, x)) for k, x in ts)
    return tuple((mul_key(k, mkey), fmul(c, x)) for k, x in ts)


def poly_arith(a, b, op):
    """Named arithmetic entry point: op in {add, sub, mul, scalar-mul}."""
    if op == "scalar-mul":
        return a.ring.scale(a, b)
    if not isinstance(b, MultiPoly) or a.ring is not b.ring:
        raise FieldMismatch("operands must share one ring")
    if op == "add":
        return a.ring.add(a, b)
    if op == "sub":
        return a.ring.sub(a, b)
    if op == "mul":
        return a.ring.mul(a, b)
    raise ValueError(f"unknown op {op!r}")


def poly_ring(field, names, order=None):
    return PolyRing(field, names, order)
