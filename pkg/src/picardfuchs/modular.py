"""Randomized modular search for annihilating operators.

The exact search spends almost all of its time on Groebner bases over
Q(t).  Here the parameter t is specialized at several points u over
several word-size prime fields, where the same reduction is cheap; the
matrix of the derivation on the reduced basis is interpolated back to
F_p(t) entry by entry, each prime contributes its canonical relation,
and the rational coefficients are lifted by Chinese remaindering plus
rational reconstruction.

Every probabilistic step is checked against evidence that was withheld
from it: one evaluation point per prime confirms the interpolation, and
one whole prime confirms the reconstructed operator.  A failed check
widens the sample and retries; a check that keeps failing raises
ModularDisagreement rather than returning a guess.
"""

import math
import random
from typing import NamedTuple

import gmpy2

from .algebra import (
    QQ,
    PrimeField,
    RatFunField,
    mpq,
    qq_mod_p,
    u_add,
    u_divmod,
    u_mul,
    u_scale,
    u_sub,
    u_trim,
)
from .driver import PicardFuchsResult, _ensure_parametric, _RelationFinder, _validate
from .errors import (
    BudgetExceeded,
    DegenerateEvaluation,
    InterpolationDegreeExceeded,
    ModularDisagreement,
    NoReconstruction,
    NoSolution,
)
from .forms import FormSpace
from .operators import DiffOperator
from .reduction import ReductionEngine

__all__ = [
    "ModularSnapshot",
    "cauchy_interpolate",
    "crt_and_ratrec",
    "delta_matrix",
    "picard_fuchs_modular",
]


def cauchy_interpolate(field, points):
    """Fit an element of `field` through (node, value) pairs over its base.

    Lagrange interpolation gives the polynomial picture; running the
    Euclidean algorithm on it against prod (t - u_i) until the remainder
    degree drops to (k-1)//2 splits it into a numerator and denominator
    of balanced degrees.  The candidate is then checked at every node,
    which also catches denominators vanishing at one of them; NoSolution
    when the data admits no fraction within the degree budget.
    """
    K = field.base
    if not points:
        raise ValueError("need at least one interpolation point")
    us = [K.coerce(u) for u, _ in points]
    vals = [K.coerce(v) for _, v in points]
    if len(set(us)) != len(us):
        raise ValueError("interpolation nodes must be distinct")
    modulus = (K.one,)
    for u in us:
        modulus = u_mul(K, modulus, (K.neg(u), K.one))
    g = ()
    for i, (ui, vi) in enumerate(zip(us, vals)):
        if K.is_zero(vi):
            continue
        li = (K.one,)
        den = K.one
        for j, uj in enumerate(us):
            if j == i:
                continue
            li = u_mul(K, li, (K.neg(uj), K.one))
            den = K.mul(den, K.sub(ui, uj))
        g = u_add(K, g, u_scale(K, li, K.div(vi, den)))
    bound = (len(points) - 1) // 2
    r0, r1 = modulus, g
    t0, t1 = (), (K.one,)
    while r1 and len(r1) - 1 > bound:
        q, rem = u_divmod(K, r0, r1)
        r0, r1 = r1, rem
        t0, t1 = t1, u_sub(K, t0, u_mul(K, q, t1))
    if not r1:
        cand = field.zero
    elif not t1:
        raise NoSolution("Euclidean split degenerated")
    else:
        cand = field.make(r1, t1)
    for ui, vi in zip(us, vals):
        try:
            got = field.eval_at(cand, ui)
        except DegenerateEvaluation:
            raise NoSolution(
                "reconstructed denominator vanishes at a node") from None
        if not K.eq(got, vi):
            raise NoSolution(
                "no fraction within the degree budget fits the data")
    return cand


def crt_and_ratrec(residues):
    """Lift residues r_i mod p_i to the rational n/d they shadow.

    Chinese remaindering combines the pairs, then the half-extended
    Euclidean algorithm extracts the unique fraction with |n| and d at
    most sqrt(M/2); NoReconstruction when no such fraction exists, which
    is the caller's cue to bring in more primes.
    """
    x, m = 0, 1
    for p, r in residues:
        if m == 1:
            x, m = r % p, p
        else:
            x += m * ((r - x) * pow(m % p, -1, p) % p)
            m *= p
    bound = math.isqrt(m // 2)
    r0, r1 = m, x % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    num, den = r1, t1
    if den < 0:
        num, den = -num, -den
    if den == 0 or den > bound or math.gcd(num, den) != 1:
        raise NoReconstruction(
            f"residues match no fraction of height {bound}")
    return mpq(num, den)


class ModularSnapshot(NamedTuple):
    """Reduced picture of the derivation at one prime.

    monomials lists the encoded omega monomials spanning the reduced
    classes, rho0 the coordinates of the reduced input class, and
    matrix the action of multiplication by f' followed by reduction, so
    the next derivative of a class with coordinates c is c' - matrix*c.
    All entries live in F_p(t).
    """

    p: int
    monomials: tuple
    matrix: tuple
    rho0: tuple


def _evaluate_at(f, a, fd, r, p, u):
    """Reduce at the single point t = u over F_p and close up the basis.

    Returns (basis, rho0, images) with plain dictionary coordinates.
    DegenerateEvaluation for anything that makes this point unusable: a
    denominator hit, f losing its degree, or a reduced class keeping a
    pole order above n (the depth-r window leaks at this point).
    """
    R = f.ring
    F = R.field
    Fp = PrimeField(p)
    ring_p = R.with_field(Fp)

    def ev(c):
        return F.eval_at(c, u, target=Fp)

    f_u = R.map_coefficients(f, ev, ring_p)
    if f_u.homogeneous_degree() != f.homogeneous_degree():
        raise DegenerateEvaluation(f"f degenerates at {F.var} = {u}")
    a_u = R.map_coefficients(a, ev, ring_p)
    fd_u = R.map_coefficients(fd, ev, ring_p)
    space = FormSpace(ring_p, f_u)
    engine = ReductionEngine(space, certificate_mode=False)
    n = space.n
    unpack = space.ext_ring.order.unpack

    def reduce_omega(poly):
        if not poly.terms:
            return {}
        out = engine.reduce_r(space.omega_form(poly), r,
                              with_certificate=False)
        if out.pole_order() > n:
            raise DegenerateEvaluation(
                f"depth-{r} reduction leaks at {F.var} = {u}")
        return dict(space.encode(out).terms)

    rho0 = reduce_omega(a_u)
    images = {}
    todo = list(rho0)
    while todo:
        key = todo.pop()
        if key in images:
            continue
        mono = ring_p.from_exp_dict({unpack(key)[2:]: Fp.one})
        img = reduce_omega(ring_p.mul(fd_u, mono))
        images[key] = img
        todo.extend(k for k in img if k not in images)
    basis = tuple(sorted(images, reverse=True))
    return basis, rho0, images


def delta_matrix(f, a, r, p, upoints, _cache=None):
    """Snapshot of the reduced derivation at one prime.

    Evaluates t at the given points, reduces there, and interpolates
    every matrix and vector entry back to F_p(t).  Points where the
    evaluation degenerates are dropped silently; the surviving points
    vote on the basis, the last one is withheld from the interpolation,
    and every interpolated entry must reproduce its value there.

    Raises DegenerateEvaluation when no point survives (the usual cause
    is a reduction depth too small for this f) and
    InterpolationDegreeExceeded when the survivors cannot support or
    confirm the interpolation, which more points will fix.  `_cache`
    memoizes per-point evaluations across retries with grown budgets.
    """
    R = f.ring
    F = R.field
    fd = R.map_coefficients(f, F.derive)
    per_u = {}
    for u in upoints:
        if _cache is not None and u in _cache:
            dat = _cache[u]
        else:
            try:
                dat = _evaluate_at(f, a, fd, r, p, u)
            except DegenerateEvaluation:
                dat = None
            if _cache is not None:
                _cache[u] = dat
        if dat is not None:
            per_u[u] = dat
    if not per_u:
        raise DegenerateEvaluation(
            f"no usable evaluation point mod {p} at depth {r}")
    groups = {}
    for u, (basis, _, _) in per_u.items():
        groups.setdefault(basis, []).append(u)
    basis = max(groups, key=lambda b: (len(groups[b]), b))
    kept = groups[basis]
    if len(kept) < 2:
        raise InterpolationDegreeExceeded(
            "need at least two consistent evaluation points")
    witness = kept[-1]
    nodes = kept[:-1]
    K = RatFunField(PrimeField(p), F.var)

    def fit(pick):
        pts = [(u, pick(per_u[u])) for u in nodes]
        try:
            cand = cauchy_interpolate(K, pts)
        except NoSolution as exc:
            raise InterpolationDegreeExceeded(str(exc)) from None
        try:
            got = K.eval_at(cand, witness)
        except DegenerateEvaluation:
            raise InterpolationDegreeExceeded(
                "interpolant has a pole at the withheld point") from None
        if not K.base.eq(got, K.base.coerce(pick(per_u[witness]))):
            raise InterpolationDegreeExceeded(
                "withheld point rejects an interpolated entry")
        return cand

    rho0 = tuple(fit(lambda d, k=key: d[1].get(k, 0)) for key in basis)
    rows = []
    for bi in basis:
        rows.append(tuple(
            fit(lambda d, bi=bi, bj=bj: d[2][bj].get(bi, 0))
            for bj in basis))
    return ModularSnapshot(p, basis, tuple(rows), rho0)


def _taylor(K, poly, w, order):
    """Taylor coefficients of a univariate polynomial at w, orders
    0..order, by repeated synthetic division."""
    cs = list(poly)
    out = []
    for _ in range(order + 1):
        if not cs:
            out.append(K.zero)
            continue
        rem = cs[-1]
        for i in range(len(cs) - 2, -1, -1):
            nxt = K.add(cs[i], K.mul(w, rem))
            cs[i] = rem
            rem = nxt
        cs.pop()
        out.append(rem)
    return out


def _jet_mul(K, a, b, order):
    out = [K.zero] * (order + 1)
    for i, ai in enumerate(a):
        if i > order:
            break
        if K.is_zero(ai):
            continue
        for j in range(min(len(b), order + 1 - i)):
            out[i + j] = K.add(out[i + j], K.mul(ai, b[j]))
    return out


def _jet_inv(K, a, order):
    inv0 = K.inv(a[0])
    out = [inv0] + [K.zero] * order
    for k in range(1, order + 1):
        acc = K.zero
        for i in range(1, min(k, len(a) - 1) + 1):
            acc = K.add(acc, K.mul(a[i], out[k - i]))
        out[k] = K.neg(K.mul(inv0, acc))
    return out


def _fraction_jet(K, frac, w, order):
    num, den = frac
    dj = _taylor(K, den, w, order)
    if K.is_zero(dj[0]):
        raise DegenerateEvaluation(f"pole at {w}")
    nj = _taylor(K, num, w, order)
    return _jet_mul(K, nj, _jet_inv(K, dj, order), order)


def _operator_of(snap, var):
    """Canonical relation of one snapshot.

    Works pointwise: around an expansion point w the iterates
    c -> c' - matrix*c live on truncated Taylor series, so the first
    linear dependency of their values (last coefficient normalized
    to one by the echelon) consists of plain residues.  Interpolating
    those over enough points recovers the relation over F_p(t), with
    one point withheld as a check.  This never touches rational
    function arithmetic, whose exact gcd costs dwarf everything else
    on matrices of this size.
    """
    p = snap.p
    Fp = PrimeField(p)
    K = RatFunField(Fp, var)
    m = len(snap.monomials)
    if m == 0:
        return DiffOperator.from_fractions(K, [K.one])

    def local_relation(w, cap):
        # None: w unusable (a pole); "short": cap below the true order
        try:
            bjets = [[_fraction_jet(Fp, e, w, cap) for e in row]
                     for row in snap.matrix]
            vec = [_fraction_jet(Fp, e, w, cap) for e in snap.rho0]
        except DegenerateEvaluation:
            return None
        finder = _RelationFinder(Fp)
        for step in range(cap + 1):
            combo = finder.insert(
                {i: jet[0] for i, jet in enumerate(vec) if jet[0]})
            if combo is not None:
                return combo
            order = cap - step - 1
            if order < 0:
                return "short"
            nxt = []
            for i in range(m):
                acc = [Fp.mul(k + 1, vec[i][k + 1]) for k in range(order + 1)]
                for j in range(m):
                    prod = _jet_mul(Fp, bjets[i][j], vec[j], order)
                    acc = [Fp.sub(x, y) for x, y in zip(acc, prod)]
                nxt.append(acc)
            vec = nxt
        return "short"

    cap = 4
    relations = {}
    w = 0
    want = 8
    while True:
        while len(relations) < want:
            w += 1
            if w >= p:
                raise InterpolationDegreeExceeded(
                    "prime too small for the relation sample")
            rel = local_relation(w, cap)
            if rel is None:
                continue
            if rel == "short":
                if cap >= m:
                    raise InterpolationDegreeExceeded(
                        "no dependency within the space dimension")
                cap = min(2 * cap, m)
                relations.clear()
                w = 0
                break
            relations[w] = rel
        if len(relations) < want:
            continue
        # points seeing an early dependency are special; the deepest
        # sampled order is the generic one
        target = max(len(c) for c in relations.values()) - 1
        pts = {u: c for u, c in relations.items() if len(c) - 1 == target}
        if len(pts) < 2:
            want *= 2
            continue
        ws = sorted(pts)
        witness = ws[-1]
        nodes = ws[:-1]
        try:
            fracs = []
            for k in range(target + 1):
                cand = cauchy_interpolate(K, [(u, pts[u][k]) for u in nodes])
                if not Fp.eq(K.eval_at(cand, witness), pts[witness][k]):
                    raise NoSolution("withheld point rejects the relation")
                fracs.append(cand)
        except (NoSolution, DegenerateEvaluation):
            want *= 2
            continue
        return DiffOperator.from_fractions(K, fracs)


def _profile(op):
    return (op.order, tuple(len(c) for c in op.coeffs))


def _project(op, p):
    """Canonical image of a rational operator mod p, or None when the
    projection collapses (p divides a leading coefficient)."""
    Fp = PrimeField(p)
    cs = [tuple(qq_mod_p(c, p) for c in ck) for ck in op.coeffs]
    if any(len(u_trim(Fp, c)) != len(c) for c in cs):
        return None
    try:
        return DiffOperator(Fp, cs, var=op.var).coeffs
    except ValueError:
        return None


def _random_prime(rng, bits, avoid):
    lo = 1 << (bits - 1)
    hi = 1 << bits
    while True:
        p = int(gmpy2.next_prime(rng.randrange(lo, hi - 1)))
        if p < hi and p not in avoid:
            avoid.add(p)
            return p


def _snapshot(f, a, r, p, rng, npoints, max_points):
    """Snapshot with point-budget doubling; returns (snap, count) with
    the count that finally worked, so later primes start there."""
    limit = min(max_points, p - 1)
    pool = rng.sample(range(1, p), limit)
    cache = {}
    k = min(npoints, limit)
    offset = 0
    while True:
        us = pool[offset:offset + k]
        try:
            return delta_matrix(f, a, r, p, us, _cache=cache), k
        except InterpolationDegreeExceeded:
            if k >= limit:
                raise
            k = min(2 * k, limit)
        except DegenerateEvaluation:
            # a second, disjoint draw guards against an unlucky sample;
            # if it also degenerates the depth is wrong for this f, not
            # the points
            if offset + 2 * k > limit:
                raise
            offset += k


def _attempt(f, a, K, r, rng, prime_bits, points, max_primes, max_points):
    used = set()
    npoints = points
    budget = max_primes
    var = K.var

    def fetch():
        nonlocal npoints, budget
        if budget <= 0:
            raise BudgetExceeded("prime budget exhausted")
        budget -= 1
        p = _random_prime(rng, prime_bits, used)
        snap, npoints = _snapshot(f, a, r, p, rng, npoints, max_points)
        return snap

    snaps = [fetch() for _ in range(3)]
    while True:
        tally = {}
        for s in snaps:
            tally.setdefault(s.monomials, []).append(s)
        pool = max(tally.values(), key=len)
        if len(pool) >= 3:
            break
        if len(snaps) >= 9:
            raise ModularDisagreement(
                "no three primes agree on the reduced basis")
        snaps.append(fetch())
    basis = pool[0].monomials
    withheld = pool[-1]
    working = list(pool[:-1])

    def fetch_matching():
        while True:
            s = fetch()
            if s.monomials == basis:
                return s

    ops = {}

    def operator_of(snap):
        if snap.p not in ops:
            ops[snap.p] = _operator_of(snap, var)
        return ops[snap.p]

    mismatches = 0
    while True:
        profiles = {}
        for s in working:
            profiles.setdefault(_profile(operator_of(s)), []).append(s)
        profile, keep = max(profiles.items(), key=lambda kv: len(kv[1]))
        working = keep
        if len(working) < 2:
            working.append(fetch_matching())
            continue
        order, shape = profile
        try:
            coeffs = []
            for k in range(order + 1):
                coeffs.append(tuple(
                    crt_and_ratrec(
                        [(s.p, operator_of(s).coeffs[k][j]) for s in working])
                    for j in range(shape[k])))
        except NoReconstruction:
            for _ in range(len(working)):
                working.append(fetch_matching())
            continue
        op = DiffOperator(QQ, coeffs, var=var)
        if _project(op, withheld.p) == operator_of(withheld).coeffs:
            return op
        mismatches += 1
        if mismatches >= 2:
            raise ModularDisagreement(
                "reconstruction keeps disagreeing with the withheld prime")
        # the old witness joins the pool; double the evidence and
        # verify against a completely fresh prime
        working.append(withheld)
        for _ in range(len(working)):
            working.append(fetch_matching())
        withheld = fetch_matching()


def picard_fuchs_modular(a, f, q, *, r_start=1, max_r=8, prime_bits=31,
                         points=8, seed=0, max_primes=64, max_points=4096):
    """Annihilating operator for a/f^q by modular evaluation.

    Same contract as the exact search: a and f are homogeneous with
    deg a = q deg f - n - 1, and the result operator annihilates every
    period of the corresponding twisted class.  The computation runs
    over random word-size primes and random evaluation points (seeded,
    so runs are reproducible) and is orders of magnitude faster on
    large inputs, at the price of a certificate: the result is instead
    confirmed by a prime withheld from the reconstruction.

    Budgets double themselves when a check fails; past max_primes or
    max_r the search raises BudgetExceeded.  Evidence that keeps
    contradicting itself raises ModularDisagreement, never a guess.
    """
    a, f, K = _ensure_parametric(a, f)
    _validate(a, f, q)
    if K.base.char != 0:
        raise ValueError("modular search needs rational coefficients")
    if prime_bits < 5:
        raise ValueError("prime_bits is too small to be useful")
    rng = random.Random(seed)
    for r in range(r_start, max_r + 1):
        try:
            op = _attempt(f, a, K, r, rng, prime_bits, points,
                          max_primes, max_points)
        except DegenerateEvaluation:
            continue
        return PicardFuchsResult(op, r, None)
    raise BudgetExceeded(
        f"no relation found up to reduction depth {max_r}")
