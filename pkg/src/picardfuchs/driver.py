"""Top-level search for annihilating differential operators.

Pipeline: a rational integrand in affine variables is homogenized to a
pair a/f^q of degree -(n+1); the numerator class is reduced and
repeatedly hit with the Gauss-Manin derivation delta until the reduced
classes become linearly dependent over the coefficient field; the
dependency coefficients are the operator.

Two search strategies.  `picard_fuchs_smooth` insists on a smooth
hypersurface and uses plain division, which makes the output minimal.
`picard_fuchs` works for any f: it runs the depth-r reduction and
raises r whenever some reduced class escapes the finite-dimensional
window (pole order above n), which certifies nothing about minimality
but always returns a true annihilator.  Certificates tie the output to
the input by exact form identities and can be replayed independently
with `verify_certificates`.
"""

from typing import NamedTuple, Optional

from .algebra import RatFunField, poly_ring
from .errors import BudgetExceeded, FieldMismatch, NotSmooth
from .forms import FormSpace, delta_form, twisted_D
from .operators import DiffOperator
from .reduction import ReductionEngine


def _hom_terms(src_ring, p, extra):
    d = p.total_degree()
    td = src_ring.order.total_degree
    unpack = src_ring.order.unpack
    return {(d - td(k) + extra,) + unpack(k): c for k, c in p.terms}


def homogenize(num, den, *, multiply_by_x0=False):
    """Rewrite num/den in n affine variables as a/f^q of degree -(n+1).

    Returns (a, f, q) in a fresh ring with one extra leading variable
    x0; setting x0 = 1 in a/f^q gives back num/den exactly.  When the
    denominator degree is too small to absorb the x0^(n+1) twist, the
    missing pole is placed on the hyperplane x0 = 0, so f picks up an
    x0 factor and q grows to its multiplicity.  The flag forces one
    extra x0 factor on top (and x0^q on a), which never changes the
    fraction.
    """
    R = num.ring
    if den.ring is not R:
        raise FieldMismatch("numerator and denominator from different rings")
    if not den.terms:
        raise ZeroDivisionError("zero denominator")
    if not num.terms:
        raise ValueError("zero numerator has no homogeneous model")
    F = R.field
    n = R.nvars
    fresh = "x0"
    tick = 0
    while fresh in R.names:
        tick += 1
        fresh = f"x0_{tick}"
    H = poly_ring(F, (fresh,) + R.names)
    dp = num.total_degree()
    dq = den.total_degree()
    if dq == 0:
        # polynomial integrand: all the pole sits on x0 = 0
        c = den.terms[0][1]
        q = dp + n + 1
        a = H.scale(H.from_exp_dict(_hom_terms(R, num, 0)), F.inv(c))
        f = H.gen(0)
    else:
        e = dq - dp - n - 1
        if e >= 0:
            q = 1
            a = H.from_exp_dict(_hom_terms(R, num, e))
            f = H.from_exp_dict(_hom_terms(R, den, 0))
        else:
            # pole order -e on x0 = 0; fold one x0 into f and raise q
            q = -e
            den_h = H.from_exp_dict(_hom_terms(R, den, 0))
            a = H.from_exp_dict(_hom_terms(R, num, 0))
            for _ in range(q - 1):
                a = H.mul(a, den_h)
            f = H.mul(H.gen(0), den_h)
    if multiply_by_x0:
        x0q = H.from_exp_dict({(q,) + (0,) * n: F.one})
        a = H.mul(a, x0q)
        f = H.mul(f, H.gen(0))
    return a, f, q


def _ensure_parametric(a, f):
    """Lift a t-free input into Q(t) so delta makes sense; no-op when
    the coefficients are already rational functions."""
    R = f.ring
    if a.ring is not R:
        raise FieldMismatch("numerator and f from different rings")
    K = R.field
    if isinstance(K, RatFunField):
        return a, f, K
    K2 = RatFunField(K, "t")
    H = R.with_field(K2)

    def lift(c):
        return K2.from_poly((c,))

    return (R.map_coefficients(a, lift, H),
            R.map_coefficients(f, lift, H), K2)


def _validate(a, f, q):
    if q != int(q) or q < 1:
        raise ValueError("pole order q must be a positive integer")
    N = f.homogeneous_degree()
    if N is None or N < 1:
        raise ValueError("f must be homogeneous of degree >= 1")
    n = f.ring.nvars - 1
    want = q * N - n - 1
    if a.homogeneous_degree() != want:
        raise ValueError(
            f"numerator must be homogeneous of degree {want} for q = {q}")


def _is_smooth(engine):
    """Zero-dimensionality of the Jacobian leading ideal: a pure power
    of every variable must lead some basis row."""
    ring = engine.space.ring
    unpack = ring.order.unpack
    covered = [False] * ring.nvars
    for key in engine.jacobian_leading_keys():
        e = unpack(key)
        live = [i for i, v in enumerate(e) if v]
        if not live:
            return True
        if len(live) == 1:
            covered[live[0]] = True
    return all(covered)


class _RelationFinder:
    """Incremental echelon over the coefficient field with combination
    tracking: the first linearly dependent insert returns the
    dependency coefficients over all rows inserted so far."""

    def __init__(self, field):
        self.K = field
        self.pivots = {}
        self.count = 0

    def insert(self, row):
        K = self.K
        combo = {self.count: K.one}
        self.count += 1
        row = {k: c for k, c in row.items() if not K.is_zero(c)}
        while row:
            lead = max(row)
            hit = self.pivots.get(lead)
            if hit is None:
                inv = K.inv(row.pop(lead))
                row = {k: K.mul(inv, c) for k, c in row.items()}
                row[lead] = K.one
                combo = {m: K.mul(inv, c) for m, c in combo.items()}
                self.pivots[lead] = (row, combo)
                return None
            prow, pcombo = hit
            c = row.pop(lead)
            for k, v in prow.items():
                if k == lead:
                    continue
                nv = K.sub(row.get(k, K.zero), K.mul(c, v))
                if K.is_zero(nv):
                    row.pop(k, None)
                else:
                    row[k] = nv
            for m, v in pcombo.items():
                nv = K.sub(combo.get(m, K.zero), K.mul(c, v))
                if K.is_zero(nv):
                    combo.pop(m, None)
                else:
                    combo[m] = nv
        out = [K.zero] * self.count
        for m, v in combo.items():
            out[m] = v
        return out


class Certificate:
    """Exact transfer data for one operator search.

    rhos[k] is the k-th reduced class and betas[k] the correction form
    with rhos[0] = alpha + D_f(betas[0]) and
    rhos[k] = delta(rhos[k-1]) + D_f(betas[k]) for k >= 1.
    """

    __slots__ = ("space", "alpha", "rhos", "betas")

    def __init__(self, space, alpha, rhos, betas):
        self.space = space
        self.alpha = alpha
        self.rhos = tuple(rhos)
        self.betas = tuple(betas)


class CertificateCheck:
    __slots__ = ("ok", "failed_index", "reason")

    def __init__(self, ok, failed_index, reason):
        self.ok = ok
        self.failed_index = failed_index
        self.reason = reason

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"CertificateCheck(ok={self.ok}, reason={self.reason!r})"


class PicardFuchsResult(NamedTuple):
    operator: DiffOperator
    r_used: int
    certificate: Optional[Certificate]


def _row_of(space, rho):
    return dict(space.encode(rho).terms)


def picard_fuchs_smooth(a, f, q):
    """Minimal annihilating operator for a/f^q, smooth hypersurfaces
    only.  Plain division computes unique normal forms, so the first
    dependency among the reduced delta-iterates is the minimal one."""
    a, f, K = _ensure_parametric(a, f)
    _validate(a, f, q)
    space = FormSpace(f.ring, f)
    engine = ReductionEngine(space, certificate_mode=False)
    if not _is_smooth(engine):
        raise NotSmooth("the Jacobian ideal has positive dimension")
    finder = _RelationFinder(K)
    rho = engine.reduce_gd(space.omega_form(a), with_certificate=False)
    while True:
        combo = finder.insert(_row_of(space, rho))
        if combo is not None:
            return DiffOperator.from_fractions(K, combo)
        rho = engine.reduce_gd(delta_form(rho), with_certificate=False)


def picard_fuchs(a, f, q, *, r_start=1, max_r=12, certificates=False):
    """Annihilating operator for a/f^q with no smoothness assumption.

    Runs the depth-r reduction on the delta-iterates of the numerator
    class; any dependency found is a true annihilator because the
    certificates identify each reduced class with the corresponding
    derivative of the input modulo exact forms.  Whenever an iterate
    keeps a pole order above n after reduction, depth r is not enough
    to see the dependency through the singularities, so r is raised
    and the search restarts.  Raises BudgetExceeded past max_r.
    """
    a, f, K = _ensure_parametric(a, f)
    _validate(a, f, q)
    space = FormSpace(f.ring, f)
    engine = ReductionEngine(space)
    alpha = space.omega_form(a)
    n = space.n
    for r in range(r_start, max_r + 1):
        finder = _RelationFinder(K)
        rhos = []
        betas = []
        rho, cert = engine.reduce_r(alpha, r, with_certificate=True)
        while True:
            if rho.pole_order() > n:
                break
            rhos.append(rho)
            betas.append(cert.neg())
            combo = finder.insert(_row_of(space, rho))
            if combo is not None:
                L = DiffOperator.from_fractions(K, combo)
                bundle = None
                if certificates:
                    bundle = Certificate(space, alpha, rhos, betas)
                return PicardFuchsResult(L, r, bundle)
            rho, cert = engine.reduce_r(delta_form(rho), r,
                                        with_certificate=True)
    raise BudgetExceeded(
        f"no relation found up to reduction depth {max_r}")


def verify_certificates(alpha, rhos, certificate, operator):
    """Replay the certificate identities exactly.

    Checks rhos[0] = alpha + D_f(betas[0]), each
    rhos[k] = delta(rhos[k-1]) + D_f(betas[k]), and finally that the
    operator coefficients combine the rhos to zero.  Success proves the
    operator annihilates every period of alpha, independently of the
    search that produced it.
    """
    space = certificate.space
    betas = certificate.betas
    rhos = tuple(rhos)
    if len(rhos) != len(betas):
        return CertificateCheck(False, None, "rho/beta length mismatch")
    prev = None
    for k, (rho, beta) in enumerate(zip(rhos, betas)):
        base = alpha if k == 0 else delta_form(prev)
        if rho != base.add(twisted_D(beta)):
            return CertificateCheck(
                False, k, f"transfer identity fails at index {k}")
        prev = rho
    K = space.field
    acc = space.zero()
    for k, rho in enumerate(rhos):
        if k < len(operator.coeffs) and operator.coeffs[k]:
            acc = acc.add(rho.scale(K.from_poly(operator.coeffs[k])))
    if not acc.is_zero():
        return CertificateCheck(
            False, None, "operator relation does not vanish")
    return CertificateCheck(True, None, "ok")
