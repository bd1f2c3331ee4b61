"""Linear differential operators sum a_k(t) (d/dt)^k with univariate
polynomial coefficients.

An operator annihilating a period is only determined up to scaling by a
rational function, so the constructor imposes a canonical form: clear
denominators, divide all coefficients by their polynomial gcd, then
scale to integer-primitive coefficients whose leading coefficient has a
positive leading term (monic leading coefficient in positive
characteristic).  Two operators annihilate the same solution spaces iff
their canonical forms are equal.

The theta form writes t^r L in the operator theta = t d/dt, which keeps
coefficients readable for operators with strong t = 0 structure.  Both
views convert through Stirling numbers.
"""

import math

from .algebra import (
    u_add,
    u_divmod,
    u_gcd,
    u_mul,
    u_scale,
    u_to_str,
    u_trim,
)

__all__ = ["DiffOperator"]


def _stirling_first(n):
    """Signed Stirling numbers, rows 0..n: falling factorials in theta."""
    rows = [[1]]
    for m in range(n):
        prev = rows[-1]
        row = [0] * (m + 2)
        for i, c in enumerate(prev):
            row[i + 1] += c
            row[i] -= m * c
        rows.append(row)
    return rows


def _stirling_second(n):
    rows = [[1]]
    for m in range(n):
        prev = rows[-1]
        row = [0] * (m + 2)
        for i, c in enumerate(prev):
            row[i + 1] += c
            row[i] += i * c
        rows.append(row)
    return rows


class DiffOperator:
    """Operator sum a_k (d/dt)^k, a_k univariate over `base`.

    Coefficients are tuples, lowest degree first, in canonical form as
    described in the module docstring.  `base` is the coefficient field
    of the polynomials (the rationals or a prime field), not the field
    of rational functions.
    """

    __slots__ = ("base", "var", "coeffs")

    def __init__(self, base, coeffs, var="t"):
        cs = [u_trim(base, tuple(c)) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        if not cs:
            raise ValueError("the zero operator has no canonical form")
        g = ()
        for c in cs:
            if c:
                g = u_gcd(base, g, c)
        if len(g) > 1:
            cs = [u_divmod(base, c, g)[0] if c else () for c in cs]
        if base.char == 0:
            num_gcd = 0
            den_lcm = 1
            for c in cs:
                for x in c:
                    num_gcd = math.gcd(num_gcd, int(x.numerator))
                    d = int(x.denominator)
                    den_lcm = den_lcm // math.gcd(den_lcm, d) * d
            scale = base.from_int(den_lcm) / base.from_int(num_gcd)
            if cs[-1][-1] < 0:
                scale = -scale
        else:
            scale = base.inv(cs[-1][-1])
        cs = [u_scale(base, c, scale) for c in cs]
        self.base = base
        self.var = var
        self.coeffs = tuple(cs)

    @classmethod
    def from_fractions(cls, field, fracs):
        """Build from rational-function coefficients over a RatFunField.

        The list gives the coefficient of (d/dt)^k at index k.  A common
        denominator is cleared before canonicalization.
        """
        K = field.base
        den_lcm = (K.one,)
        for _, d in fracs:
            g = u_gcd(K, den_lcm, d)
            den_lcm = u_mul(K, u_divmod(K, den_lcm, g)[0], d)
        coeffs = []
        for n, d in fracs:
            cof = u_divmod(K, den_lcm, d)[0]
            coeffs.append(u_mul(K, n, cof))
        return cls(K, coeffs, var=field.var)

    # -- basic views -----------------------------------------------------

    @property
    def order(self):
        return len(self.coeffs) - 1

    def coefficient_degree(self):
        return max(len(c) - 1 for c in self.coeffs if c)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self.base is other.base and self.var == other.var
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((id(self.base), self.var, self.coeffs))

    def __repr__(self):
        return f"DiffOperator({self.to_str()})"

    def to_str(self, symbol="d"):
        parts = []
        for k in range(self.order, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            cstr = u_to_str(self.base, c, self.var)
            if len(c) > 1 or (k > 0 and cstr not in ("1", "-1")):
                cstr = f"({cstr})"
            if k == 0:
                parts.append(cstr)
            else:
                op = symbol if k == 1 else f"{symbol}^{k}"
                if cstr == "1":
                    parts.append(op)
                elif cstr == "-1":
                    parts.append(f"-{op}")
                else:
                    parts.append(f"{cstr}*{op}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def theta_str(self, symbol="theta"):
        shim = DiffOperator.__new__(DiffOperator)
        shim.base, shim.var, shim.coeffs = self.base, self.var, self.theta_form()
        return shim.to_str(symbol=symbol)

    # -- theta conversions -------------------------------------------------

    def theta_form(self):
        """Coefficients q_i with sum q_i theta^i = t^(r-v) L, the common
        power of t stripped.  Lowest i first."""
        base, r = self.base, self.order
        s1 = _stirling_first(r)
        qs = [() for _ in range(r + 1)]
        for k, a in enumerate(self.coeffs):
            if not a:
                continue
            shifted = (base.zero,) * (r - k) + a
            for i, c in enumerate(s1[k]):
                if c:
                    qs[i] = u_add(base, qs[i],
                                  u_scale(base, shifted, base.from_int(c)))
        val = min(_valuation(base, q) for q in qs if q)
        return tuple(q[val:] if q else () for q in qs)

    @classmethod
    def from_theta(cls, base, qs, var="t"):
        """Operator from theta-form coefficients q_i (theta = t d/dt)."""
        qs = [u_trim(base, tuple(q)) for q in qs]
        while qs and not qs[-1]:
            qs.pop()
        if not qs:
            raise ValueError("the zero operator has no canonical form")
        d = len(qs) - 1
        s2 = _stirling_second(d)
        coeffs = [() for _ in range(d + 1)]
        for i, qi in enumerate(qs):
            if not qi:
                continue
            for k, c in enumerate(s2[i]):
                if c:
                    coeffs[k] = u_add(base, coeffs[k],
                                      u_scale(base, qi, base.from_int(c)))
        coeffs = [((base.zero,) * k + c) if c else () for k, c in
                  enumerate(coeffs)]
        return cls(base, coeffs, var=var)

    # -- series action -----------------------------------------------------

    def apply_to_series(self, prefix):
        """Coefficients of L(F) for F given by the truncated series
        `prefix`; entry m of the result is exact for m <= len - order - 1,
        which is all this returns."""
        K = self.base
        r = self.order
        out = []
        for m in range(len(prefix) - r):
            acc = K.zero
            for k, a in enumerate(self.coeffs):
                for j, aj in enumerate(a):
                    if K.is_zero(aj):
                        continue
                    idx = m - j + k
                    if idx < k or idx >= len(prefix):
                        continue
                    w = K.mul(aj, K.from_int(math.perm(idx, k)))
                    acc = K.add(acc, K.mul(w, prefix[idx]))
            out.append(acc)
        return out


def _valuation(base, c):
    for i, x in enumerate(c):
        if not base.is_zero(x):
            return i
    return len(c)
