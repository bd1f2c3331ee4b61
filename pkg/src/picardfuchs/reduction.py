"""Pole-order reduction of rational differential forms.

The elementary step divides the top graded piece of a form by the
Jacobian module basis and trades the reducible part for an exact
differential one level down.  On smooth hypersurfaces iterating the
step is a complete normalization; in the presence of singularities the
step leaves classes behind that are nevertheless exact, and the
extended reduction eliminates them against correction spaces built
from differentials of non-Koszul syzygies.

Everything works on encoded dictionaries {packed extension key:
coefficient}; Forms appear only at API boundaries.  Certificates are
kept exact: every operation with a certificate returns a xi-form cert
with input - output = D_f(cert), where D_f = d - df^ is the twisted
differential.
"""

import math

from .algebra import (
    monomials_of_degree,
    u_add,
    u_deriv,
    u_divmod,
    u_mul,
    u_scale,
    u_sub,
    u_trim,
    u_xgcd,
)
from .errors import (
    DimensionBudgetExceeded,
    FieldMismatch,
    NotSquarefree,
)
from .groebner import build_P_basis, syzygy_data

__all__ = [
    "EchelonBasis",
    "ReductionEngine",
    "red_gd_step",
    "reduce_gd",
    "reduce_r",
    "nontrivial_syzygy_basis",
    "basis_X",
    "oracle_W",
    "dim_E",
    "dim_S",
    "dim_A",
    "hermite_reduce",
]


def _add_one(F, d, k, v):
    nv = F.add(d.get(k, F.zero), v)
    if F.is_zero(nv):
        d.pop(k, None)
    else:
        d[k] = nv


def _merge_into(F, dst, src):
    for k, v in src.items():
        _add_one(F, dst, k, v)


def _sub_scaled(F, a, b, c):
    # a -= c*b, dropping cancelled keys
    for k, v in b.items():
        nv = F.sub(a.get(k, F.zero), F.mul(c, v))
        if F.is_zero(nv):
            a.pop(k, None)
        else:
            a[k] = nv


class EchelonBasis:
    """Reduced echelon family of encoded rows.

    Rows are dicts over packed extension keys, monic at their leading
    key, and no row's support meets another row's lead, so the family
    is the unique reduced basis of its span.  A parallel certificate
    dict can ride along through every row operation; any linear
    identity proved for the rows then holds for the certificates.
    """

    def __init__(self, space, certificates=False):
        self.space = space
        self.field = space.field
        self.rows = {}
        self.certs = {} if certificates else None

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        certs = self.certs or {}
        for lead in sorted(self.rows, reverse=True):
            yield lead, self.rows[lead], certs.get(lead)

    def leads(self):
        return sorted(self.rows, reverse=True)

    def insert(self, row, cert=None):
        """Reduce a row against the basis and adjoin it if independent.

        Returns the new leading key, or None when the row was already
        in the span.  The row dict is consumed.
        """
        F = self.field
        track = self.certs is not None
        if track:
            cert = {} if cert is None else dict(cert)
        for lead in sorted(set(row) & set(self.rows), reverse=True):
            c = row.get(lead)
            if c is None or F.is_zero(c):
                continue
            # pivot tails are pivot-free, so one pass suffices
            _sub_scaled(F, row, self.rows[lead], c)
            if track:
                _sub_scaled(F, cert, self.certs[lead], c)
        row = {k: v for k, v in row.items() if not F.is_zero(v)}
        if not row:
            return None
        lead = max(row)
        inv = F.inv(row[lead])
        row = {k: F.mul(v, inv) for k, v in row.items()}
        if track:
            cert = {k: F.mul(v, inv) for k, v in cert.items()}
        for l2, r2 in self.rows.items():
            c = r2.get(lead)
            if c is not None and not F.is_zero(c):
                _sub_scaled(F, r2, row, c)
                if track:
                    _sub_scaled(F, self.certs[l2], cert, c)
        self.rows[lead] = row
        if track:
            self.certs[lead] = cert
        return lead

    def _decode(self, d):
        E = self.space.ext_ring
        return self.space.decode(E.from_terms(d.items()))

    def forms(self):
        return [self._decode(row) for _, row, _ in self]

    def form_pairs(self):
        """(form, certificate form) pairs, leading keys descending."""
        return [(self._decode(row), self._decode(cert or {}))
                for _, row, cert in self]


class ReductionEngine:
    """Reduction state for one hypersurface complement.

    Holds the module Groebner basis of d_i(f) omega - xi_i, the syzygy
    split, and the lazily built correction spaces; all caches only ever
    grow, so one engine serves any number of reductions.  diagnostics
    enables the dense oracle and the dimension counters, which exist to
    cross-check the fast path and can be expensive.
    """

    def __init__(self, space, *, basis=None, syzygies=None,
                 step_budget=None, certificate_mode=True,
                 diagnostics=False):
        self.space = space
        self.field = space.field
        self.ext = space.ext_ring
        if basis is None:
            basis = build_P_basis(space, step_budget=step_budget)
        elif basis.space is not space:
            raise FieldMismatch("basis was built for a different space")
        self.G = basis
        self.certificate_mode = certificate_mode
        self.diagnostics = diagnostics
        self._syz = syzygies
        self._cache_A = {}
        self._cache_X = {}
        self._jac_lms = None
        self._slot_memo = {}

    # -- bookkeeping ---------------------------------------------------------

    def syzygies(self):
        if self._syz is None:
            self._syz = syzygy_data(self.G)
        return self._syz

    def jacobian_leading_keys(self):
        """x-parts of the omega-led rows of G: the leading ideal of the
        Jacobian ideal."""
        if self._jac_lms is None:
            order = self.ext.order
            pack = self.space.ring.order.pack
            lms = []
            for g in self.G.rows:
                e = order.unpack(g.lm())
                if e[1] == 0:
                    lms.append(pack(e[2:]))
            self._jac_lms = lms
        return self._jac_lms

    def _slot(self, key):
        got = self._slot_memo.get(key)
        if got is None:
            e = self.ext.order.unpack(key)
            xdeg = sum(e[2:])
            if e[1] == 0:
                got = (xdeg + self.space.n + 1) // self.space.N
            else:
                got = (xdeg + self.space.n) // self.space.N
            self._slot_memo[key] = got
        return got

    def _row_of(self, alpha):
        if alpha.space is not self.space:
            raise FieldMismatch("form belongs to a different space")
        row = {}
        unpack = self.ext.order.unpack
        for k, c in self.space.encode(alpha).terms:
            if unpack(k)[1] != 0:
                raise ValueError("expected a pure omega form")
            row[k] = c
        return row

    def _form_of(self, row):
        return self.space.decode(self.ext.from_terms(row.items()))

    def _xi_keys(self, xdeg):
        if xdeg < 0:
            return []
        order = self.ext.order
        rorder = self.space.ring.order
        n = self.space.n
        keys = []
        for i in range(n + 1):
            uv = (n - i, i + 1)
            for xk in monomials_of_degree(rorder, xdeg):
                keys.append(order.pack(uv + rorder.unpack(xk)))
        keys.sort(reverse=True)
        return keys

    def _split_top(self, row):
        """Pop the keys of the highest occupied slot out of row."""
        q = self._slot(max(row))
        top = {}
        for k in [k for k in row if self._slot(k) == q]:
            top[k] = row.pop(k)
        return q, top

    # -- the elementary step -------------------------------------------------

    def _redstep_raw(self, top):
        """Divide a single-slot omega dict by G.

        Returns (rho, beta): rho is the normal omega part, beta the
        division cofactor as a xi dict, with top = rho + df^beta.
        """
        nfm = self.G.reducer.nf_monomial
        F = self.field
        rho = {}
        beta = {}
        unpack = self.ext.order.unpack
        for k, c in top.items():
            for rk, rc in nfm(k):
                tgt = rho if unpack(rk)[1] == 0 else beta
                _add_one(F, tgt, rk, F.mul(c, rc))
        return rho, beta

    def _enc_d(self, xirow):
        """Exterior differential of an encoded xi dict, as an omega dict."""
        F = self.field
        order = self.ext.order
        n = self.space.n
        out = {}
        for k, c in xirow.items():
            e = order.unpack(k)
            i = e[1] - 1
            x = list(e[2:])
            if x[i] == 0:
                continue
            mult = F.from_int(x[i])
            x[i] -= 1
            _add_one(F, out, order.pack((n + 1, 0) + tuple(x)),
                     F.mul(c, mult))
        return out

    def red_gd_step(self, alpha, q, *, with_certificate=None):
        """One division step at level q.

        The slot-q piece a is written a = rho + df^beta with rho in
        normal form; the output replaces a by rho + d(beta), and the
        other slots pass through untouched.  With a certificate the
        return value is (output, cert) with alpha - output = D_f(cert).
        """
        wc = self.certificate_mode if with_certificate is None else with_certificate
        F = self.field
        row = self._row_of(alpha)
        top = {}
        for k in [k for k in row if self._slot(k) == q]:
            top[k] = row.pop(k)
        rho, beta = self._redstep_raw(top)
        _merge_into(F, row, rho)
        if beta:
            _merge_into(F, row, self._enc_d(beta))
        out = self._form_of(row)
        if not wc:
            return out
        cert = {k: F.neg(c) for k, c in beta.items()}
        return out, self._form_of(cert)

    def reduce_gd(self, alpha, *, with_certificate=None):
        """Iterate the elementary step top slot down until every slot
        is in normal form."""
        wc = self.certificate_mode if with_certificate is None else with_certificate
        F = self.field
        row = self._row_of(alpha)
        done = {}
        acc = {}
        while row:
            _, top = self._split_top(row)
            rho, beta = self._redstep_raw(top)
            done.update(rho)
            if beta:
                _merge_into(F, row, self._enc_d(beta))
                if wc:
                    _merge_into(F, acc, beta)
        out = self._form_of(done)
        if not wc:
            return out
        return out, self._form_of({k: F.neg(c) for k, c in acc.items()})

    # -- syzygy complements and correction spaces ------------------------------

    def nontrivial_syzygy_basis(self, q):
        """Echelon basis of a complement of the trivial syzygies inside
        the level-q syzygies of the partials.

        Candidates are the xi monomials in the leading staircase of the
        syzygy module but not of the trivial one; each is completed to
        a monic syzygy by the matching Groebner row, which pins a
        canonical basis independent of insertion order.
        """
        got = self._cache_A.get(q)
        if got is not None:
            return got
        basis = EchelonBasis(self.space)
        d = q * self.space.N - self.space.n
        if d >= 0:
            syz, triv = self.syzygies()
            order = self.ext.order
            divides = order.divides
            syz = sorted(syz, key=lambda g: g.lm())
            syz_lms = [g.lm() for g in syz]
            triv_lms = [g.lm() for g in triv]
            F = self.field
            for mu in self._xi_keys(d):
                if any(divides(t, mu) for t in triv_lms):
                    continue
                pick = None
                for lm, g in zip(syz_lms, syz):
                    if divides(lm, mu):
                        pick = g
                        break
                if pick is None:
                    continue
                m = order.div_key(mu, pick.lm())
                elem = self.ext.mul_term(pick, m, F.inv(pick.lc()))
                basis.insert(dict(elem.terms))
        self._cache_A[q] = basis
        return basis

    def basis_X(self, r, q):
        """Echelon basis of the depth-r correction space at level q.

        Built recursively: depth 1 is the differentials of the level
        q-1 syzygy complement; depth r adds the one-step reductions of
        the depth r-1 space one level up, keeping only elements already
        inside the level-q filtration.  Every row carries a certificate
        gamma with row = D_f(gamma).
        """
        if r < 1:
            raise ValueError("depth must be at least 1")
        got = self._cache_X.get((r, q))
        if got is not None:
            return got
        F = self.field
        basis = EchelonBasis(self.space, certificates=True)
        if q > 0 and r == 1:
            for _, row, _ in self.nontrivial_syzygy_basis(q - 1):
                db = self._enc_d(row)
                if db:
                    basis.insert(db, cert=dict(row))
        elif q > 0:
            for _, row, cert in self.basis_X(1, q):
                basis.insert(dict(row), cert=cert)
            for lead, row, cert in self.basis_X(r - 1, q + 1):
                if self._slot(lead) > q:
                    continue
                row = dict(row)
                cert = dict(cert)
                top = {}
                for k in [k for k in row if self._slot(k) == q]:
                    top[k] = row.pop(k)
                rho, beta = self._redstep_raw(top)
                _merge_into(F, row, rho)
                if beta:
                    _merge_into(F, row, self._enc_d(beta))
                    _merge_into(F, cert, beta)
                if row:
                    basis.insert(row, cert=cert)
        self._cache_X[(r, q)] = basis
        return basis

    def top_x(self, r, q):
        """Leads of basis_X(r, q) sitting at slot q, descending."""
        return [lead for lead in self.basis_X(r, q).leads()
                if self._slot(lead) == q]

    # -- the extended reduction ------------------------------------------------

    def reduce_r(self, alpha, r, *, with_certificate=None):
        """Depth-r reduction: at each level the elementary division is
        followed by elimination against the level's correction pivots,
        so classes of exact forms hidden by singularities get killed up
        to depth r."""
        if r < 1:
            raise ValueError("depth must be at least 1")
        wc = self.certificate_mode if with_certificate is None else with_certificate
        F = self.field
        row = self._row_of(alpha)
        done = {}
        acc = {}
        while row:
            q, top = self._split_top(row)
            rho, beta = self._redstep_raw(top)
            if beta:
                _merge_into(F, row, self._enc_d(beta))
                if wc:
                    _merge_into(F, acc, beta)
            xb = self.basis_X(r, q)
            certs = xb.certs
            for lead in xb.leads():
                if self._slot(lead) < q:
                    break
                c = rho.get(lead)
                if c is None or F.is_zero(c):
                    continue
                for k, v in xb.rows[lead].items():
                    tgt = rho if self._slot(k) == q else row
                    nv = F.sub(tgt.get(k, F.zero), F.mul(c, v))
                    if F.is_zero(nv):
                        tgt.pop(k, None)
                    else:
                        tgt[k] = nv
                if wc:
                    _sub_scaled(F, acc, certs[lead], c)
            done.update(rho)
        out = self._form_of(done)
        if not wc:
            return out
        return out, self._form_of({k: F.neg(c) for k, c in acc.items()})

    # -- diagnostics -----------------------------------------------------------

    def _want_diagnostics(self):
        if not self.diagnostics:
            raise ValueError("diagnostics are disabled for this engine")

    def oracle_W(self, r, q, *, column_limit=8000):
        """Dense cross-check basis: the span of twisted differentials of
        all monomial n-forms within depth, intersected with the level-q
        filtration.  Costs a full echelon over every column, hence the
        budget and the diagnostics gate."""
        self._want_diagnostics()
        if r < 1 or q < 0:
            raise ValueError("need r >= 1 and q >= 0")
        space = self.space
        rorder = space.ring.order
        slots = range(max(q - 1, 0), q + r - 1)
        degrees = {s: s * space.N - space.n for s in slots}
        total = sum((space.n + 1) * len(monomials_of_degree(rorder, d))
                    for d in degrees.values() if d >= 0)
        if total > column_limit:
            raise DimensionBudgetExceeded(
                "oracle would build %d columns (limit %d)"
                % (total, column_limit))
        basis = EchelonBasis(space)
        one = space.field.one
        for s in slots:
            d = degrees[s]
            if d < 0:
                continue
            for i in range(space.n + 1):
                for xk in monomials_of_degree(rorder, d):
                    img = space.twisted_D(
                        space.xi_monomial(i, space.ring.term(xk, one)))
                    if not img.is_zero():
                        basis.insert({k: c for k, c in space.encode(img).terms})
        out = []
        for lead, row, _ in basis:
            if self._slot(lead) <= q:
                out.append(self._form_of(row))
        return out

    def dim_E(self, r, q, *, dimension_limit=2_000_000):
        """Dimension of the level-q graded piece left after depth-r
        reduction: monomials minus the Jacobian staircase minus the
        top-level correction pivots."""
        self._want_diagnostics()
        if r < 0 or q < 0:
            raise ValueError("need r >= 0 and q >= 0")
        if q == 0:
            return 0
        space = self.space
        total = math.comb(q * space.N - 1, space.n)
        if total > dimension_limit:
            raise DimensionBudgetExceeded(
                "graded piece has dimension %d (limit %d)"
                % (total, dimension_limit))
        if r == 0:
            return total
        rorder = space.ring.order
        divides = rorder.divides
        lms = self.jacobian_leading_keys()
        reducible = 0
        for key in monomials_of_degree(rorder, q * space.N - space.n - 1):
            if any(divides(lm, key) for lm in lms):
                reducible += 1
        return total - reducible - len(self.top_x(r, q))

    def dim_S(self, q):
        """Dimension of the level-q syzygies of the partials, Koszul
        part included."""
        d = q * self.space.N - self.space.n
        if d < 0:
            return 0
        syz, _ = self.syzygies()
        divides = self.ext.order.divides
        lms = [g.lm() for g in syz]
        count = 0
        for mu in self._xi_keys(d):
            if any(divides(lm, mu) for lm in lms):
                count += 1
        return count + math.comb(q * self.space.N, self.space.n)

    def dim_A(self, q):
        d = q * self.space.N - self.space.n
        if d < 0:
            return 0
        syz, triv = self.syzygies()
        divides = self.ext.order.divides
        syz_lms = [g.lm() for g in syz]
        triv_lms = [g.lm() for g in triv]
        count = 0
        for mu in self._xi_keys(d):
            if any(divides(lm, mu) for lm in triv_lms):
                continue
            if any(divides(lm, mu) for lm in syz_lms):
                count += 1
        return count


# -- module-level entry points ------------------------------------------------


def red_gd_step(engine, alpha, q, *, with_certificate=None):
    return engine.red_gd_step(alpha, q, with_certificate=with_certificate)


def reduce_gd(engine, alpha, *, with_certificate=None):
    return engine.reduce_gd(alpha, with_certificate=with_certificate)


def reduce_r(engine, alpha, r, *, with_certificate=None):
    return engine.reduce_r(alpha, r, with_certificate=with_certificate)


def nontrivial_syzygy_basis(engine, q):
    return engine.nontrivial_syzygy_basis(q)


def basis_X(engine, r, q):
    return engine.basis_X(r, q)


def oracle_W(engine, r, q, *, column_limit=8000):
    return engine.oracle_W(r, q, column_limit=column_limit)


def dim_E(engine, r, q, *, dimension_limit=2_000_000):
    return engine.dim_E(r, q, dimension_limit=dimension_limit)


def dim_S(engine, q):
    return engine.dim_S(q)


def dim_A(engine, q):
    return engine.dim_A(q)


# -- univariate Hermite reduction ----------------------------------------------


def hermite_reduce(K, a, f, q):
    """Rewrite a/f^q with f squarefree as num/f plus exact derivatives.

    Returns (num, cert) with deg num < deg f and cert a list of
    (poly, k) entries, each standing for d/dx(poly/f^k); k == 0 entries
    absorb the polynomial part through an antiderivative.  The identity
    a/f^q = num/f + sum(d/dx(poly/f^k)) is exact over the field K.
    """
    f = u_trim(K, f)
    if len(f) < 2:
        raise ValueError("denominator must be nonconstant")
    a = u_trim(K, a)
    fp = u_deriv(K, f)
    g, _, t = u_xgcd(K, f, fp)
    if len(g) != 1:
        raise NotSquarefree("denominator has a repeated factor")
    cert = []
    cur = a
    for level in range(q, 1, -1):
        # split cur = u*f + w*f' with deg w < deg f, via s*f + t*f' = 1
        _, w = u_divmod(K, u_mul(K, cur, t), f)
        u, r0 = u_divmod(K, u_sub(K, cur, u_mul(K, w, fp)), f)
        assert not r0, "division failed on a squarefree modulus"
        c = K.inv(K.from_int(level - 1))
        if w:
            cert.append((u_scale(K, w, K.neg(c)), level - 1))
            cur = u_add(K, u, u_scale(K, u_deriv(K, w), c))
        else:
            cur = u
    quo, num = u_divmod(K, cur, f)
    if quo:
        anti = [K.zero]
        for i, coef in enumerate(quo):
            anti.append(K.div(coef, K.from_int(i + 1)))
        cert.append((u_trim(K, tuple(anti)), 0))
    return num, cert
