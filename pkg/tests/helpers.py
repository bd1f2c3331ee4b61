"""Brute-force oracles shared by the test suite.

Everything here is deliberately naive: dense-ish Gaussian elimination
over dictionaries keyed by packed monomials, with no dependence on the
division machinery under test.
"""

from picardfuchs.algebra import monomials_of_degree


def poly_dict(p):
    return {k: c for k, c in p.terms}


def eliminate(field, basis, vec):
    """Reduce vec against an echelonized basis {pivot: row}.

    Returns the reduced vector (possibly empty) with its leading entry
    not matching any pivot, or {} if vec lies in the span.
    """
    vec = dict(vec)
    for k in list(vec):
        if field.is_zero(vec[k]):
            del vec[k]
    while vec:
        p = max(vec)
        row = basis.get(p)
        if row is None:
            return vec
        c = vec[p]
        for k, rc in row.items():
            nv = field.sub(vec.get(k, field.zero), field.mul(c, rc))
            if field.is_zero(nv):
                vec.pop(k, None)
            else:
                vec[k] = nv
    return vec


def build_span(field, rows):
    basis = {}
    for r in rows:
        res = eliminate(field, basis, r)
        if res:
            p = max(res)
            inv = field.inv(res[p])
            basis[p] = {k: field.mul(v, inv) for k, v in res.items()}
    return basis


def span_rank(field, rows):
    return len(build_span(field, rows))


def in_span(field, rows, target):
    basis = build_span(field, rows)
    return not eliminate(field, basis, target)


def spans_equal(field, rows_a, rows_b):
    ra = span_rank(field, rows_a)
    rb = span_rank(field, rows_b)
    return ra == rb == span_rank(field, list(rows_a) + list(rows_b))


def kernel_combinations(field, rows):
    """Coefficient dicts {row index: c} of a basis of the left kernel
    of the given row list (combinations that vanish)."""
    basis = {}
    kers = []
    for idx, r in enumerate(rows):
        vec = {k: v for k, v in r.items() if not field.is_zero(v)}
        combo = {idx: field.one}
        while vec:
            p = max(vec)
            got = basis.get(p)
            if got is None:
                break
            prow, pcombo = got
            c = vec[p]
            for k, rc in prow.items():
                nv = field.sub(vec.get(k, field.zero), field.mul(c, rc))
                if field.is_zero(nv):
                    vec.pop(k, None)
                else:
                    vec[k] = nv
            for k, rc in pcombo.items():
                nv = field.sub(combo.get(k, field.zero), field.mul(c, rc))
                if field.is_zero(nv):
                    combo.pop(k, None)
                else:
                    combo[k] = nv
        if vec:
            p = max(vec)
            inv = field.inv(vec[p])
            basis[p] = ({k: field.mul(v, inv) for k, v in vec.items()},
                        {k: field.mul(v, inv) for k, v in combo.items()})
        else:
            kers.append(combo)
    return kers


def jacobian_multiples(space, degree):
    """All monomial multiples m * d_i(f) of the given total degree,
    as coefficient dictionaries."""
    ring = space.ring
    rows = []
    shift = degree - (space.N - 1)
    if shift < 0:
        return rows
    for dfi in space.partials:
        for key in monomials_of_degree(ring.order, shift):
            rows.append(poly_dict(ring.mul_term(dfi, key, ring.field.one)))
    return rows


def in_jacobian_span(space, a):
    """Membership of a (homogeneous) in the Jacobian ideal, by brute
    force.  This is the same thing as a*omega lying in df^T^n."""
    if a.is_zero():
        return True
    d = a.homogeneous_degree()
    assert d is not None
    return in_span(space.field, jacobian_multiples(space, d), poly_dict(a))


def count_divisible(order, lm_keys, candidates):
    n = 0
    for key in candidates:
        if any(order.divides(lm, key) for lm in lm_keys):
            n += 1
    return n


def xi_monomial_keys(space, xdeg):
    """Encoded keys of all monomials x^J xi_i with |J| = xdeg."""
    out = []
    ext = space.ext_ring.order
    n = space.n
    for i in range(n + 1):
        for key in monomials_of_degree(space.ring.order, xdeg):
            e = space.ring.order.unpack(key)
            out.append(ext.pack((n - i, i + 1) + e))
    return out
