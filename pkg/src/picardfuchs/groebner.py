"""Groebner engine: Buchberger for ideals and for the relation module.

The module side works through the doubled-ring encoding owned by
FormSpace: omega and the xi_i become the degree-(n+1) monomials in two
fresh variables u, v, and all monomials u^p v^q with p + q = n + 2 are
added so that products of symbols vanish.  Division of an encoded
module element never meets those padding generators, which is what
makes the ideal engine double as a module engine.

Over a rational-function coefficient field the basis is computed in an
integer polynomial ring with the parameter as a trailing, lowest
priority variable, then read back with the parameter moved into the
field.  A basis for an order that compares the parameter last stays a
basis after the move, so no rational-function arithmetic happens inside
Buchberger itself.
"""

import heapq
import math
from typing import NamedTuple

from .algebra import (
    MultiPoly,
    RationalField,
    RatFunField,
    TermOrder,
    block_uvt_order,
    poly_ring,
    u_divmod,
    u_gcd,
    u_mul,
)
from .errors import FieldMismatch, StepBudgetExceeded


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, limit):
        self.remaining = limit

    def charge(self, k=1):
        if self.remaining is None:
            return
        self.remaining -= k
        if self.remaining < 0:
            raise StepBudgetExceeded("reduction step budget exhausted")


def _primitive_scale(coeffs):
    """Scale rational coefficients to coprime integers, positive leading."""
    den_l = 1
    for c in coeffs:
        den_l = den_l * c.denominator // math.gcd(den_l, int(c.denominator))
    num_g = 0
    for c in coeffs:
        num_g = math.gcd(num_g, int(c.numerator * (den_l // c.denominator)))
    if num_g == 0:
        num_g = 1
    out = [c * den_l / num_g for c in coeffs]
    if out[0] < 0:
        out = [-c for c in out]
    return out


def normalize_poly(ring, p):
    """Canonical scaling: primitive integer over the rationals, monic
    over every other field.  Returns None for zero."""
    if p.is_zero():
        return None
    if isinstance(ring.field, RationalField):
        coeffs = _primitive_scale([c for _, c in p.terms])
        return MultiPoly(ring, tuple(
            (k, c) for (k, _), c in zip(p.terms, coeffs)))
    inv = ring.field.inv(p.lc())
    return ring.scale(p, inv)


class _DivTable:
    """Divisor table for plain (uncached) full normal forms."""

    def __init__(self, ring):
        self.ring = ring
        self.lms = []
        self.negtails = []

    def add(self, p):
        F = self.ring.field
        inv = F.inv(p.lc())
        self.lms.append(p.lm())
        self.negtails.append(tuple(
            (k, F.neg(F.mul(c, inv))) for k, c in p.terms[1:]))

    def find(self, key):
        divides = self.ring.order.divides
        for i, lm in enumerate(self.lms):
            if divides(lm, key):
                return i
        return -1

    def reduce_full(self, terms, budget=None):
        """Full normal form of a term list; returns a new term tuple."""
        F = self.ring.field
        order = self.ring.order
        work = {}
        heap = []
        for k, c in terms:
            prev = work.get(k)
            if prev is None:
                work[k] = c
                heapq.heappush(heap, -k)
            else:
                work[k] = F.add(prev, c)
        out = []
        while heap:
            k = -heapq.heappop(heap)
            c = work.pop(k, None)
            if c is None or F.is_zero(c):
                continue
            i = self.find(k)
            if i < 0:
                out.append((k, c))
                continue
            if budget is not None:
                budget.charge()
            q = order.div_key(k, self.lms[i])
            for m, cm in self.negtails[i]:
                nk = order.mul_key(q, m)
                prev = work.get(nk)
                if prev is None:
                    work[nk] = F.mul(c, cm)
                    heapq.heappush(heap, -nk)
                else:
                    work[nk] = F.add(prev, F.mul(c, cm))
        return tuple(out)


def normal_form(p, basis, *, budget=None):
    """Full normal form of p against a list of nonzero polynomials."""
    ring = p.ring
    table = _DivTable(ring)
    for g in basis:
        if not g.is_zero():
            table.add(g)
    return MultiPoly(ring, table.reduce_full(p.terms, budget))


class Reducer:
    """Normal forms against a fixed basis, memoized monomial by monomial.

    Reduction revisits the same monomials over and over across pole
    levels and derivation steps; caching the normal form of each
    monomial turns that repetition into lookups.  Sound because the
    normal form against a fixed Groebner basis is linear.
    """

    def __init__(self, ring, basis):
        self.ring = ring
        self.field = ring.field
        self.order = ring.order
        rows = sorted((g for g in basis if not g.is_zero()),
                      key=lambda g: g.lm())
        F = ring.field
        self.lms = [g.lm() for g in rows]
        self.negtails = []
        for g in rows:
            inv = F.inv(g.lc())
            self.negtails.append(tuple(
                (k, F.neg(F.mul(c, inv))) for k, c in g.terms[1:]))
        self.cache = {}

    def find(self, key):
        divides = self.order.divides
        for i, lm in enumerate(self.lms):
            if divides(lm, key):
                return i
        return -1

    def is_normal(self, key):
        return self.find(key) < 0

    def nf_monomial(self, key):
        cache = self.cache
        got = cache.get(key)
        if got is not None:
            return got
        F = self.field
        order = self.order
        one = F.one
        stack = [key]
        while stack:
            k = stack[-1]
            if k in cache:
                stack.pop()
                continue
            i = self.find(k)
            if i < 0:
                cache[k] = ((k, one),)
                stack.pop()
                continue
            q = order.div_key(k, self.lms[i])
            deps = [(order.mul_key(q, m), c) for m, c in self.negtails[i]]
            missing = [mk for mk, _ in deps if mk not in cache]
            if missing:
                stack.extend(missing)
                continue
            acc = {}
            for mk, c in deps:
                for rk, rc in cache[mk]:
                    prev = acc.get(rk)
                    v = F.mul(c, rc)
                    acc[rk] = v if prev is None else F.add(prev, v)
            cache[k] = tuple(sorted(
                ((rk, rc) for rk, rc in acc.items() if not F.is_zero(rc)),
                reverse=True))
            stack.pop()
        return cache[key]

    def nf(self, p):
        F = self.field
        acc = {}
        for k, c in p.terms:
            for rk, rc in self.nf_monomial(k):
                prev = acc.get(rk)
                v = F.mul(c, rc)
                acc[rk] = v if prev is None else F.add(prev, v)
        return self.ring.from_terms(acc.items())


# -- Buchberger --------------------------------------------------------------


def _spoly(ring, a, b):
    order = ring.order
    F = ring.field
    la, lb = a.lm(), b.lm()
    L = order.lcm_key(la, lb)
    pa = ring.mul_term(a, order.div_key(L, la), F.inv(a.lc()))
    pb = ring.mul_term(b, order.div_key(L, lb), F.inv(b.lc()))
    return pa - pb


def buchberger(ring, gens, *, step_budget=None, pair_filter=None):
    """Reduced Groebner basis of the ideal generated by gens.

    Gebauer-Moeller pair pruning with normal (smallest-lcm-first)
    selection.  pair_filter(lcm_key) -> True drops a pair whose
    S-polynomial is known in advance to reduce to zero; the module
    pipeline uses it to skip pairs that straddle symbol components.
    step_budget bounds the total number of division steps.
    """
    budget = _Budget(step_budget)
    order = ring.order
    table = _DivTable(ring)
    G = []
    lms = []
    pairset = set()
    heap = []

    def push_pairs(t):
        lmt = lms[t]
        cand = []
        for i in range(t):
            L = order.lcm_key(lms[i], lmt)
            if pair_filter is not None and pair_filter(L):
                continue
            cand.append((L, i))
        # drop pairs whose lcm is a proper multiple of another new lcm
        kept = []
        for L, i in cand:
            if any(Lj != L and order.divides(Lj, L) for Lj, _ in cand):
                continue
            kept.append((L, i))
        # one pair per lcm value; none at all if some member is coprime
        by_lcm = {}
        for L, i in kept:
            by_lcm.setdefault(L, []).append(i)
        for L, idxs in sorted(by_lcm.items()):
            coprime = any(
                L == order.mul_key(lms[i], lmt) for i in idxs)
            if coprime:
                continue
            i = min(idxs)
            pairset.add((i, t))
            heapq.heappush(heap, (order.total_degree(L), L, i, t))
        # chain criterion against the surviving old pairs
        doomed = []
        for (i, j) in pairset:
            if j == t:
                continue
            Lij = order.lcm_key(lms[i], lms[j])
            if (order.divides(lmt, Lij)
                    and order.lcm_key(lms[i], lmt) != Lij
                    and order.lcm_key(lms[j], lmt) != Lij):
                doomed.append((i, j))
        for p in doomed:
            pairset.discard(p)

    def add(p):
        p = normalize_poly(ring, p)
        if p is None:
            return
        G.append(p)
        lms.append(p.lm())
        table.add(p)
        push_pairs(len(G) - 1)

    for g in gens:
        if g.ring is not ring:
            raise FieldMismatch("generator from a foreign ring")
        if g.is_zero():
            continue
        r = table.reduce_full(g.terms, budget) if G else g.terms
        if r:
            add(MultiPoly(ring, r))
    if not G:
        raise ValueError("no nonzero generators")

    while heap:
        _, L, i, j = heapq.heappop(heap)
        if (i, j) not in pairset:
            continue
        pairset.discard((i, j))
        s = _spoly(ring, G[i], G[j])
        budget.charge()
        r = table.reduce_full(s.terms, budget)
        if r:
            add(MultiPoly(ring, r))

    return interreduce(ring, G, budget=budget)


def interreduce(ring, rows, *, budget=None):
    """Turn a Groebner basis into the reduced Groebner basis."""
    order = ring.order
    rows = sorted((g for g in rows if not g.is_zero()), key=lambda g: g.lm())
    kept = []
    kept_lms = []
    for g in rows:
        lm = g.lm()
        if any(order.divides(m, lm) for m in kept_lms):
            continue
        kept.append(g)
        kept_lms.append(lm)
    table = _DivTable(ring)
    for g in kept:
        table.add(g)
    out = []
    for g in kept:
        tail = table.reduce_full(g.terms[1:], budget)
        p = MultiPoly(ring, (g.terms[0],) + tail)
        out.append(normalize_poly(ring, p))
    out.sort(key=lambda g: g.lm())
    return out


# -- module elements ---------------------------------------------------------


class ModuleElement(NamedTuple):
    """One element of the rank-(n+2) module: a*omega + sum b_i*xi_i.

    Unlike Form, no slot bookkeeping: the natural grading here gives
    omega degree 1 and each xi_i degree N, under which the defining
    rows d_i(f)*omega - xi_i are homogeneous.
    """

    omega_part: MultiPoly
    xi_parts: tuple


def encode_element(space, elt):
    E = space.ext_ring
    n = space.n
    pairs = []
    for key, c in elt.omega_part.terms:
        e = space.ring.order.unpack(key)
        pairs.append((E.order.pack((n + 1, 0) + e), c))
    for i, b in enumerate(elt.xi_parts):
        for key, c in b.terms:
            e = space.ring.order.unpack(key)
            pairs.append((E.order.pack((n - i, i + 1) + e), c))
    return E.from_terms(pairs)


def decode_element(space, p):
    n = space.n
    w_terms = []
    xi_terms = [[] for _ in range(n + 1)]
    for key, c in p.terms:
        e = space.ext_ring.order.unpack(key)
        eu, ev, rest = e[0], e[1], e[2:]
        xkey = space.ring.order.pack(rest)
        if eu == n + 1 and ev == 0:
            w_terms.append((xkey, c))
        elif eu + ev == n + 1 and ev >= 1:
            xi_terms[ev - 1].append((xkey, c))
        else:
            raise ValueError("term does not encode a module symbol")
    return ModuleElement(
        space.ring.from_terms(w_terms),
        tuple(space.ring.from_terms(ts) for ts in xi_terms))


def _uv_degree(order, key):
    e = order.unpack(key)
    return e[0] + e[1]


class ModuleGB:
    """Reduced Groebner basis of a submodule, through the u,v encoding.

    raw holds every basis row of the encoding ideal, including the
    padding monomials in u, v; rows is the module part (symbol degree
    n+1) as encoded polynomials; elements decodes rows.  The reducer
    divides only by module rows, which is complete for module inputs.
    """

    def __init__(self, space, raw):
        self.space = space
        self.raw = list(raw)
        n = space.n
        order = space.ext_ring.order
        self.rows = [g for g in self.raw
                     if _uv_degree(order, g.lm()) == n + 1]
        self.reducer = Reducer(space.ext_ring, self.rows)
        self.order = order
        self.source = space.f

    @property
    def elements(self):
        return [decode_element(self.space, g) for g in self.rows]

    def leading_keys(self):
        return [g.lm() for g in self.rows]


def _junk_generators(space):
    E = space.ext_ring
    n = space.n
    out = []
    for p in range(n + 3):
        q = n + 2 - p
        out.append(E.monomial((p, q) + (0,) * space.ring.nvars, E.field.one))
    return out


def _uv_pair_filter(space):
    order = space.ext_ring.order
    cutoff = space.n + 2

    def filt(lcm_key):
        # pairs across symbol components or involving padding rows:
        # every term of the S-polynomial keeps symbol degree >= n+2,
        # hence dies against the padding monomials
        return _uv_degree(order, lcm_key) >= cutoff

    return filt


def _grevlex_then_last_order(nvars):
    """Graded reverse lexicographic on the first nvars-1 variables,
    with the last variable compared last and ungraded."""
    lanes = [("deg", tuple(range(nvars - 1)))]
    for i in range(nvars - 2, -1, -1):
        lanes.append(("neg", i))
    lanes.append(("raw", nvars - 1))
    return TermOrder("grevlex_then_last", nvars, tuple(lanes))


def _lift_ring(space):
    F = space.field
    names = ("u", "v") + space.ring.names + (F.var,)
    if space.order_style == "position":
        order = block_uvt_order(len(names))
    else:
        order = _grevlex_then_last_order(len(names))
    return poly_ring(F.base, names, order)


def _lift_elements(space, Rz, elements):
    """Rational-function module elements -> integer-ring polynomials.

    Each element is scaled by the lcm of its coefficient denominators;
    scaling by a unit of the function field does not change the
    generated submodule.
    """
    F = space.field
    base = F.base
    n = space.n
    out = []
    for elt in elements:
        coeffs = [c for _, c in elt.omega_part.terms]
        for b in elt.xi_parts:
            coeffs.extend(c for _, c in b.terms)
        den = (base.one,)
        for c in coeffs:
            g = u_gcd(base, den, c[1])
            q, _ = u_divmod(base, c[1], g)
            den = u_mul(base, den, q)
        pairs = []

        def emit(uv, poly):
            for key, c in poly.terms:
                e = space.ring.order.unpack(key)
                q, r = u_divmod(base, u_mul(base, c[0], den), c[1])
                assert not r
                for texp, tc in enumerate(q):
                    if base.is_zero(tc):
                        continue
                    pairs.append((Rz.order.pack(uv + e + (texp,)), tc))

        emit((n + 1, 0), elt.omega_part)
        for i, b in enumerate(elt.xi_parts):
            emit((n - i, i + 1), b)
        out.append(Rz.from_terms(pairs))
    return out


def _project_t(space, Rz, g):
    """Read an integer-ring row back over the function field."""
    F = space.field
    E = space.ext_ring
    groups = {}
    for key, c in g.terms:
        e = Rz.order.unpack(key)
        head, texp = e[:-1], e[-1]
        groups.setdefault(head, {})[texp] = c
    pairs = []
    for head, tmap in groups.items():
        coeffs = [tmap.get(i, F.base.zero) for i in range(max(tmap) + 1)]
        pairs.append((E.order.pack(head), F.make(coeffs)))
    return E.from_terms(pairs)


def module_groebner(space, elements, *, step_budget=None):
    """Reduced Groebner rows (encoded) of the submodule the elements
    generate, padding generators included in the run but kept in the
    output only when they are padding monomials themselves."""
    F = space.field
    if isinstance(F, RatFunField):
        Rz = _lift_ring(space)
        gens = _lift_elements(space, Rz, elements)
        Gz = buchberger(Rz, gens + _lift_junk(space, Rz),
                        step_budget=step_budget,
                        pair_filter=_uv_pair_filter_for(space, Rz.order))
        rows = [_project_t(space, Rz, g) for g in Gz]
        rows = _minimize_rows(space.ext_ring, rows)
        return _tail_reduce_rows(space.ext_ring, rows)
    gens = [encode_element(space, e) for e in elements]
    return buchberger(space.ext_ring, gens + _junk_generators(space),
                      step_budget=step_budget,
                      pair_filter=_uv_pair_filter(space))


def _lift_junk(space, Rz):
    n = space.n
    out = []
    for p in range(n + 3):
        q = n + 2 - p
        out.append(Rz.monomial(
            (p, q) + (0,) * (Rz.nvars - 3) + (0,), Rz.field.one))
    return out


def _uv_pair_filter_for(space, order):
    cutoff = space.n + 2

    def filt(lcm_key):
        e = order.unpack(lcm_key)
        return e[0] + e[1] >= cutoff

    return filt


def _minimize_rows(ring, rows):
    order = ring.order
    rows = sorted((g for g in rows if not g.is_zero()), key=lambda g: g.lm())
    kept = []
    kept_lms = []
    for g in rows:
        lm = g.lm()
        if any(order.divides(m, lm) for m in kept_lms):
            continue
        kept.append(g)
        kept_lms.append(lm)
    return kept


def _tail_reduce_rows(ring, rows):
    red = Reducer(ring, rows)
    out = []
    for g in rows:
        tail = red.nf(MultiPoly(ring, g.terms[1:]))
        p = ring.from_terms((g.terms[0],) + tail.terms)
        out.append(normalize_poly(ring, p))
    out.sort(key=lambda g: g.lm())
    return out


# -- the public module-level operations --------------------------------------


def build_P_basis(space, *, step_budget=None):
    """Reduced basis of the submodule generated by d_i(f) omega - xi_i."""
    ring = space.ring
    one = ring.field.one
    gens = []
    for i, dfi in enumerate(space.partials):
        xi = [ring.zero] * (space.n + 1)
        xi[i] = ring.neg(ring.one)
        gens.append(ModuleElement(dfi, tuple(xi)))
    rows = module_groebner(space, gens, step_budget=step_budget)
    return ModuleGB(space, rows)


def rem_G(alpha, G):
    """Remainder of a module element (or a Form) on division by G.

    The omega part rho and the xi part beta of the output satisfy
    alpha = rho + df^beta + (pure xi discrepancy handled by beta
    itself): concretely alpha - rho - beta lies in the submodule, and
    matching symbol blocks gives omega(alpha) = omega(rho) + df^beta.
    """
    space = G.space
    if hasattr(alpha, "xi_polys"):
        p = space.encode(alpha)
        return space.decode(G.reducer.nf(p))
    p = encode_element(space, alpha)
    return decode_element(space, G.reducer.nf(p))


def syzygy_data(G, f=None):
    """(basis of all syzygies among the d_i f, reduced basis of the
    trivial ones).  The first component is the set of pure-xi rows of
    G; the second is computed from the antisymmetric generators
    d_i(f) xi_j - d_j(f) xi_i."""
    space = G.space
    if f is not None and f != space.f:
        raise ValueError("basis was built for a different polynomial")
    syz = [g for g in G.rows
           if decode_element(space, g).omega_part.is_zero()]
    ring = space.ring
    n = space.n
    gens = []
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            xi = [ring.zero] * (n + 1)
            xi[j] = space.partials[i]
            xi[i] = ring.neg(space.partials[j])
            gens.append(ModuleElement(ring.zero, tuple(xi)))
    rows = module_groebner(space, gens)
    order = space.ext_ring.order
    rows = [g for g in rows if _uv_degree(order, g.lm()) == n + 1]
    return syz, rows
