"""Graded differential forms attached to one homogeneous hypersurface.

Two blocks of forms matter here: (n+1)-forms a*omega with omega the
volume form dx_0^...^dx_n, and n-forms sum_i b_i xi_i with
xi_i = (-1)^i dx_0^...^dx_i-hat^...^dx_n.  In these coordinates

    d(sum b_i xi_i) = (sum_i d_i b_i) omega
    df ^ (sum b_i xi_i) = (sum_i b_i d_i f) omega

and the twisted differential is D = d - df^.

Coefficients are stored slot by slot: the slot-q piece of an (n+1)-form
is homogeneous of degree qN - n - 1, the slot-q piece of an n-form is
homogeneous of degree qN - n.  Slot q of an n-form maps to slot q under
d and to slot q+1 under df^.
"""

from .algebra import block_uv_order, grevlex_order, poly_ring
from .errors import FieldMismatch


class FormSpace:
    """Context shared by all forms attached to one polynomial f.

    Also owns the doubled polynomial ring used to encode module
    elements for Groebner computations: omega becomes u^(n+1) and
    xi_i becomes u^(n-i) v^(i+1), so the n+2 monomials of degree n+1
    in u, v enumerate the module symbols.

    order_style "position" compares the symbol first (omega beats
    every xi, then xi_0 > xi_1 > ...), with graded reverse
    lexicographic ties on the x part.  order_style "degree" compares
    by total degree of the encoded monomial first.  Both satisfy the
    pole condition checked by satisfies_pole_condition below whenever
    N >= 2.
    """

    def __init__(self, ring, f, order_style="position"):
        if f.ring is not ring:
            raise FieldMismatch("f must live in the given ring")
        N = f.homogeneous_degree()
        if N is None or N < 1:
            raise ValueError("f must be homogeneous of degree >= 1")
        self.ring = ring
        self.f = f
        self.n = ring.nvars - 1
        self.N = N
        self.field = ring.field
        self.partials = tuple(
            ring.partial_derivative(f, i) for i in range(ring.nvars))
        names = ("u", "v") + ring.names
        if order_style == "position":
            order = block_uv_order(len(names))
        elif order_style == "degree":
            order = grevlex_order(len(names))
        else:
            raise ValueError("order_style must be 'position' or 'degree'")
        self.order_style = order_style
        self.ext_ring = poly_ring(ring.field, names, order)
        self._f_delta = None

    @property
    def f_delta(self):
        # t-derivative of f, coefficient-wise; NoDerivation over plain fields
        if self._f_delta is None:
            self._f_delta = self.ring.map_coefficients(
                self.f, self.field.derive)
        return self._f_delta

    def zero(self):
        return Form(self, {}, {})

    def form(self, w=None, xi=None):
        """Build a form from an omega coefficient and/or a xi vector.

        Inhomogeneous polynomials are split into graded slots; a
        component whose degree fits no slot is an error.
        """
        w_comps = {} if w is None else self._split(w, self.n + 1)
        xi_comps = {}
        if xi is not None:
            vec = tuple(xi)
            if len(vec) != self.n + 1:
                raise ValueError("xi vector must have n+1 entries")
            for i, b in enumerate(vec):
                for q, part in self._split(b, self.n).items():
                    row = xi_comps.setdefault(
                        q, [self.ring.zero] * (self.n + 1))
                    row[i] = part
        xi_comps = {q: tuple(row) for q, row in xi_comps.items()}
        return Form(self, w_comps, xi_comps)

    def omega_form(self, a):
        return self.form(w=a)

    def xi_form(self, vec):
        return self.form(xi=vec)

    def xi_monomial(self, i, poly):
        vec = [self.ring.zero] * (self.n + 1)
        vec[i] = poly
        return self.form(xi=vec)

    def _split(self, poly, offset):
        """Split poly into slots q with deg = q*N - offset."""
        if poly.ring is not self.ring:
            raise FieldMismatch("coefficient polynomial from a foreign ring")
        by_deg = {}
        order = self.ring.order
        for key, c in poly.terms:
            d = order.total_degree(key)
            by_deg.setdefault(d, []).append((key, c))
        comps = {}
        for d, terms in by_deg.items():
            if (d + offset) % self.N:
                raise ValueError(
                    "degree %d does not sit in any graded slot" % d)
            q = (d + offset) // self.N
            comps[q] = self.ring.from_terms(terms)
        return comps

    def slot_degree(self, q, offset):
        return q * self.N - offset

    # -- the four operators ------------------------------------------------

    def wedge_df(self, beta):
        """df ^ beta for an n-form beta; slot q lands in slot q+1."""
        self._want_n_form(beta)
        w = {}
        for q, vec in beta.xi.items():
            acc = self.ring.zero
            for b, df_i in zip(vec, self.partials):
                acc = acc + b * df_i
            if not acc.is_zero():
                w[q + 1] = acc
        return Form(self, w, {})

    def exterior_d(self, beta):
        """d(sum b_i xi_i) = (sum_i d_i b_i) omega; slot preserved."""
        self._want_n_form(beta)
        w = {}
        for q, vec in beta.xi.items():
            acc = self.ring.zero
            for i, b in enumerate(vec):
                acc = acc + self.ring.partial_derivative(b, i)
            if not acc.is_zero():
                w[q] = acc
        return Form(self, w, {})

    def twisted_D(self, beta):
        """D beta = d beta - df ^ beta."""
        return self.exterior_d(beta).sub(self.wedge_df(beta))

    def delta_form(self, alpha):
        """Parameter derivation: alpha |-> alpha' - f' alpha.

        The prime is the coefficient-wise t-derivative; the second
        term shifts every slot up by one.  Raises NoDerivation when
        the coefficient field carries no derivation.
        """
        derive = self.field.derive
        fd = self.f_delta
        w = {}
        for q, a in alpha.w.items():
            _acc(w, q, self.ring.map_coefficients(a, derive), self.ring)
            _acc(w, q + 1, self.ring.neg(fd * a), self.ring)
        xi = {}
        for q, vec in alpha.xi.items():
            dv = tuple(self.ring.map_coefficients(b, derive) for b in vec)
            sv = tuple(self.ring.neg(fd * b) for b in vec)
            _acc_vec(xi, q, dv, self.ring)
            _acc_vec(xi, q + 1, sv, self.ring)
        return Form(self, w, xi)

    def _want_n_form(self, beta):
        if beta.space is not self:
            raise FieldMismatch("form belongs to a different space")
        if beta.w:
            raise ValueError("expected an n-form (no omega part)")

    # -- encoding to and from the doubled ring -----------------------------

    def encode(self, form):
        E = self.ext_ring
        n = self.n
        pairs = []
        for a in form.w.values():
            for key, c in a.terms:
                e = self.ring.order.unpack(key)
                pairs.append((E.order.pack((n + 1, 0) + e), c))
        for vec in form.xi.values():
            for i, b in enumerate(vec):
                for key, c in b.terms:
                    e = self.ring.order.unpack(key)
                    pairs.append((E.order.pack((n - i, i + 1) + e), c))
        return E.from_terms(pairs)

    def decode(self, p):
        """Inverse of encode; rejects terms outside the symbol range."""
        n = self.n
        w_terms = []
        xi_terms = [[] for _ in range(n + 1)]
        for key, c in p.terms:
            e = self.ext_ring.order.unpack(key)
            eu, ev, rest = e[0], e[1], e[2:]
            xkey = self.ring.order.pack(rest)
            if eu == n + 1 and ev == 0:
                w_terms.append((xkey, c))
            elif eu + ev == n + 1 and ev >= 1:
                xi_terms[ev - 1].append((xkey, c))
            else:
                raise ValueError("term does not encode a module symbol")
        vec = [self.ring.from_terms(ts) for ts in xi_terms]
        return self.form(w=self.ring.from_terms(w_terms), xi=vec)

    def symbol_degree(self, key):
        """Degree of an encoded monomial under (omega -> 1, xi -> N)."""
        e = self.ext_ring.order.unpack(key)
        xdeg = sum(e[2:])
        if e[1] == 0:
            return xdeg + 1
        return xdeg + self.N


def _acc(comps, q, poly, ring):
    if poly.is_zero():
        return
    prev = comps.get(q)
    poly = poly if prev is None else prev + poly
    if poly.is_zero():
        comps.pop(q, None)
    else:
        comps[q] = poly


def _acc_vec(comps, q, vec, ring):
    if all(b.is_zero() for b in vec):
        return
    prev = comps.get(q)
    if prev is not None:
        vec = tuple(a + b for a, b in zip(prev, vec))
        if all(b.is_zero() for b in vec):
            comps.pop(q, None)
            return
    comps[q] = tuple(vec)


class Form:
    """One element of T^(n+1) + T^n, stored per graded slot.

    w maps slot q to the omega coefficient (degree qN - n - 1);
    xi maps slot q to the vector of xi coefficients (degree qN - n).
    Slots holding zero are absent.  Immutable by convention.
    """

    __slots__ = ("space", "w", "xi")

    def __init__(self, space, w, xi, validate=True):
        self.space = space
        self.w = dict(w)
        self.xi = dict(xi)
        if validate:
            self._check()

    def _check(self):
        n, N, ring = self.space.n, self.space.N, self.space.ring
        for q, a in self.w.items():
            d = a.homogeneous_degree()
            if a.is_zero() or d != q * N - n - 1:
                raise ValueError("omega slot %d holds degree %s" % (q, d))
        for q, vec in self.xi.items():
            if len(vec) != n + 1 or all(b.is_zero() for b in vec):
                raise ValueError("bad xi vector in slot %d" % q)
            for b in vec:
                if not b.is_zero() and b.homogeneous_degree() != q * N - n:
                    raise ValueError("xi slot %d degree mismatch" % q)

    # -- queries -----------------------------------------------------------

    def is_zero(self):
        return not self.w and not self.xi

    def pole_order(self):
        qs = list(self.w) + list(self.xi)
        return max(qs) if qs else 0

    def omega_component(self, q):
        return self.w.get(q, self.space.ring.zero)

    def xi_component(self, q):
        z = self.space.ring.zero
        return self.xi.get(q, tuple([z] * (self.space.n + 1)))

    def omega_poly(self):
        acc = self.space.ring.zero
        for a in self.w.values():
            acc = acc + a
        return acc

    def xi_polys(self):
        z = self.space.ring.zero
        acc = [z] * (self.space.n + 1)
        for vec in self.xi.values():
            acc = [a + b for a, b in zip(acc, vec)]
        return tuple(acc)

    def component(self, q):
        w = {q: self.w[q]} if q in self.w else {}
        xi = {q: self.xi[q]} if q in self.xi else {}
        return Form(self.space, w, xi, validate=False)

    def filtration_part(self, q):
        """Sum of all slots <= q."""
        w = {k: v for k, v in self.w.items() if k <= q}
        xi = {k: v for k, v in self.xi.items() if k <= q}
        return Form(self.space, w, xi, validate=False)

    def omega_only(self):
        return Form(self.space, self.w, {}, validate=False)

    def xi_only(self):
        return Form(self.space, {}, self.xi, validate=False)

    # -- arithmetic ----------------------------------------------------------

    def add(self, other):
        self._same(other)
        w = dict(self.w)
        xi = dict(self.xi)
        for q, a in other.w.items():
            _acc(w, q, a, self.space.ring)
        for q, vec in other.xi.items():
            _acc_vec(xi, q, vec, self.space.ring)
        return Form(self.space, w, xi, validate=False)

    def sub(self, other):
        return self.add(other.neg())

    def neg(self):
        R = self.space.ring
        w = {q: R.neg(a) for q, a in self.w.items()}
        xi = {q: tuple(R.neg(b) for b in vec) for q, vec in self.xi.items()}
        return Form(self.space, w, xi, validate=False)

    def scale(self, c):
        F = self.space.field
        if F.is_zero(c):
            return self.space.zero()
        R = self.space.ring
        w = {q: R.scale(a, c) for q, a in self.w.items()}
        xi = {q: tuple(R.scale(b, c) for b in vec)
              for q, vec in self.xi.items()}
        return Form(self.space, w, xi, validate=False)

    def mul_f(self, power=1):
        """Multiply by f^power; shifts every slot up by power."""
        fp = self.space.ring.pow(self.space.f, power)
        R = self.space.ring
        w = {q + power: a * fp for q, a in self.w.items()}
        xi = {q + power: tuple(b * fp for b in vec)
              for q, vec in self.xi.items()}
        return Form(self.space, w, xi, validate=False)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.sub(other)

    def __neg__(self):
        return self.neg()

    def _same(self, other):
        if not isinstance(other, Form) or other.space is not self.space:
            raise FieldMismatch("forms from different spaces")

    def __eq__(self, other):
        if not isinstance(other, Form) or other.space is not self.space:
            return NotImplemented
        return self.w == other.w and self.xi == other.xi

    def __hash__(self):
        return hash((id(self.space),
                     tuple(sorted(self.w.items(), key=lambda t: t[0])),
                     tuple(sorted(self.xi.items(), key=lambda t: t[0]))))

    def __repr__(self):
        bits = []
        for q in sorted(self.w):
            bits.append("[%d] (%s) w" % (q, self.w[q]))
        for q in sorted(self.xi):
            for i, b in enumerate(self.xi[q]):
                if not b.is_zero():
                    bits.append("[%d] (%s) xi%d" % (q, b, i))
        return "Form(" + " + ".join(bits) + ")" if bits else "Form(0)"


def wedge_df(beta):
    return beta.space.wedge_df(beta)


def exterior_d(beta):
    return beta.space.exterior_d(beta)


def twisted_D(beta):
    return beta.space.twisted_D(beta)


def delta_form(alpha):
    return alpha.space.delta_form(alpha)


def satisfies_pole_condition(space, trials=300, seed=0):
    """Sample the order condition needed for division to respect slots:
    |I| + 1 >= |J| + N must force x^I omega to beat x^J xi_j."""
    import random
    rng = random.Random(seed)
    n, N = space.n, space.N
    order = space.ext_ring.order
    for _ in range(trials):
        I = tuple(rng.randrange(4) for _ in range(n + 1))
        J = tuple(rng.randrange(4) for _ in range(n + 1))
        j = rng.randrange(n + 1)
        if sum(I) + 1 >= sum(J) + N:
            a = order.pack((n + 1, 0) + I)
            b = order.pack((n - j, j + 1) + J)
            if not a > b:
                return False
    return True
