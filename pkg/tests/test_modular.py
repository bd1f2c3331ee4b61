"""Randomized evaluation-interpolation driver: Cauchy interpolation,
CRT plus rational reconstruction, per-prime delta-matrix snapshots, and
the probabilistic operator search with its confirmation checks.

The exact driver doubles as the oracle throughout: reconstructed
operators must match it bit for bit, and snapshot iteration must match
the direct reduction of delta iterates over F_p(t).
"""

import random

import pytest

from picardfuchs.algebra import (
    QQ,
    PrimeField,
    RatFunField,
    mpq,
    poly_ring,
)
from picardfuchs.driver import picard_fuchs
from picardfuchs.errors import (
    DegenerateEvaluation,
    InterpolationDegreeExceeded,
    ModularDisagreement,
    NoReconstruction,
    NoSolution,
)
from picardfuchs.forms import FormSpace
from picardfuchs.modular import (
    ModularSnapshot,
    cauchy_interpolate,
    crt_and_ratrec,
    delta_matrix,
    picard_fuchs_modular,
)
from picardfuchs.operators import DiffOperator
from picardfuchs.reduction import ReductionEngine

from test_operators import P
from test_series import legendre_operator

F = RatFunField(QQ, "t")


def pencil_input():
    R = poly_ring(F, ("x0", "x1"))
    x0, x1 = R.gens()
    return R.one, x1 * x1 - R.constant(F.t) * x0 * x0


def legendre_input():
    R = poly_ring(F, ("x", "y", "z"))
    x, y, z = R.gens()
    return R.one, z * y * y - x * (x - z) * (x - R.constant(F.t) * z)


class TestCauchyInterpolate:
    def test_pinned_pole(self):
        p = 101
        K = RatFunField(PrimeField(p), "t")
        pts = [(u, pow(u - 1, -1, p) % p) for u in (0, 2, 3, 4, 5)]
        got = cauchy_interpolate(K, pts)
        assert got == K.make((1,), (p - 1, 1))

    def test_constant_values(self):
        K = RatFunField(PrimeField(101), "t")
        got = cauchy_interpolate(K, [(2, 7), (3, 7), (5, 7)])
        assert got == K.from_int(7)

    def test_zero_values(self):
        K = RatFunField(PrimeField(101), "t")
        assert K.is_zero(cauchy_interpolate(K, [(1, 0), (2, 0), (3, 0)]))

    def test_random_round_trip(self):
        p = 10007
        base = PrimeField(p)
        K = RatFunField(base, "t")
        rng = random.Random(11)
        for _ in range(10):
            num = tuple(rng.randrange(p) for _ in range(rng.randrange(1, 6)))
            den = tuple(rng.randrange(p) for _ in range(5)) + (1,)
            target = K.make(num, den)
            if K.is_zero(target):
                continue
            pts = []
            u = 0
            while len(pts) < 13:
                u += 1
                try:
                    pts.append((u, K.eval_at(target, u)))
                except DegenerateEvaluation:
                    continue
            assert cauchy_interpolate(K, pts) == target

    def test_duplicate_points_rejected(self):
        K = RatFunField(PrimeField(101), "t")
        with pytest.raises(ValueError):
            cauchy_interpolate(K, [(2, 1), (2, 1), (3, 5)])

    def test_no_solution_reported(self):
        # no fraction with num and den degree <= 1 passes through these
        # four points, and the Euclidean candidate fails at a sample u
        p = 13
        K = RatFunField(PrimeField(p), "t")
        bad = None
        for vals in [(v0, v1, v2, v3)
                     for v0 in range(1, p) for v1 in range(1, p)
                     for v2 in range(1, p) for v3 in range(1, p)]:
            pts = list(zip((0, 1, 2, 3), vals))
            try:
                cauchy_interpolate(K, pts)
            except NoSolution:
                bad = pts
                break
        assert bad is not None


class TestCrtRatrec:
    def test_zero(self):
        assert crt_and_ratrec([(10007, 0), (10009, 0)]) == 0

    def test_pinned_fraction(self):
        primes = [536870923, 536870969, 536871017]
        target = mpq(-22, 7)
        residues = [
            (p, (-22 * pow(7, -1, p)) % p) for p in primes]
        assert crt_and_ratrec(residues) == target

    def test_unreconstructible(self):
        # 37 mod 101 is not a ratio of integers bounded by sqrt(101/2)
        with pytest.raises(NoReconstruction):
            crt_and_ratrec([(101, 37)])

    def test_corrupted_residue(self):
        primes = [536870923, 536870969, 536871017, 536871077]
        residues = [(p, (5 * pow(3, -1, p)) % p) for p in primes]
        corrupted = residues[:2] + [(residues[2][0], residues[2][1] ^ 1)]
        corrupted.append(residues[3])
        with pytest.raises(NoReconstruction):
            crt_and_ratrec(corrupted)

    def test_integer_round_trip(self):
        assert crt_and_ratrec([(10007, 42), (10009, 42)]) == 42


class TestDeltaMatrix:
    def _omega_key(self, p, f_exps):
        ring = poly_ring(PrimeField(p), f_exps)
        return ring

    def test_pencil_snapshot(self):
        a, f = pencil_input()
        p = 10007
        snap = delta_matrix(f, a, 1, p, [2, 3, 5, 7, 11])
        assert isinstance(snap, ModularSnapshot)
        assert snap.p == p
        Kp = RatFunField(PrimeField(p), "t")
        # basis is the single monomial omega
        ring_p = poly_ring(PrimeField(p), ("x0", "x1"))
        x0, x1 = ring_p.gens()
        sp = FormSpace(ring_p, x1 * x1 - ring_p.constant(2) * x0 * x0)
        key = sp.encode(sp.omega_form(ring_p.one)).terms[0][0]
        assert snap.monomials == (key,)
        assert snap.matrix == ((Kp.make((1,), (0, 2)),),)
        assert snap.rho0 == (Kp.one,)

    def test_degenerate_points_dropped(self):
        # u = 0 degenerates the pencil; the snapshot must not change
        a, f = pencil_input()
        p = 10007
        clean = delta_matrix(f, a, 1, p, [2, 3, 5, 7, 11])
        mixed = delta_matrix(f, a, 1, p, [0, 2, 3, 5, 7, 11])
        assert mixed == clean

    def test_all_points_degenerate(self):
        a, f = pencil_input()
        with pytest.raises(DegenerateEvaluation):
            delta_matrix(f, a, 1, 10007, [0])

    def test_not_enough_points(self):
        a, f = pencil_input()
        with pytest.raises(InterpolationDegreeExceeded):
            delta_matrix(f, a, 1, 10007, [2, 3])

    def test_t_free_zero_matrix(self):
        R = poly_ring(F, ("x0", "x1"))
        x0, x1 = R.gens()
        f = x0 * x0 + x1 * x1
        p = 10007
        Kp = RatFunField(PrimeField(p), "t")
        snap = delta_matrix(f, R.one, 1, p, [2, 3, 5])
        assert snap.matrix == ((Kp.zero,),)
        assert snap.rho0 == (Kp.one,)

    def test_cross_prime_monomials_agree(self):
        a, f = legendre_input()
        us = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
        s1 = delta_matrix(f, a, 1, 10007, us)
        s2 = delta_matrix(f, a, 1, 20011, us)
        assert s1.monomials == s2.monomials
        assert len(s1.rho0) == len(s1.monomials)
        assert len(s1.matrix) == len(s1.monomials)

    def test_snapshot_iteration_matches_direct_reduction(self):
        # rho_{i+1} = rho_i' - B rho_i over F_p(t) must reproduce the
        # depth-r reduction of the delta iterates computed directly
        a, f = pencil_input()
        p = 101
        snap = delta_matrix(f, a, 1, p, [2, 3, 5, 7])
        Kp = RatFunField(PrimeField(p), "t")
        ring_p = f.ring.with_field(Kp)
        lift = {}
        fp = f.ring.map_coefficients(
            f, lambda c: Kp.make(c[0], c[1]), ring_p)
        ap = a.ring.map_coefficients(
            a, lambda c: Kp.make(c[0], c[1]), ring_p)
        space = FormSpace(ring_p, fp)
        engine = ReductionEngine(space, certificate_mode=False)
        from picardfuchs.forms import delta_form
        rho = engine.reduce_r(space.omega_form(ap), 1,
                              with_certificate=False)
        vec = list(snap.rho0)
        m = len(snap.monomials)
        index = {k: i for i, k in enumerate(snap.monomials)}
        for _ in range(3):
            coords = [Kp.zero] * m
            for k, c in space.encode(rho).terms:
                coords[index[k]] = c
            assert coords == vec
            rho = engine.reduce_r(delta_form(rho), 1,
                                  with_certificate=False)
            vec = [
                Kp.sub(Kp.derive(vec[i]),
                       _dot(Kp, snap.matrix[i], vec))
                for i in range(m)
            ]


def _dot(K, row, vec):
    acc = K.zero
    for b, c in zip(row, vec):
        acc = K.add(acc, K.mul(b, c))
    return acc


class TestEvaluatedReductionCommutes:
    def test_on_random_slot_two_classes(self):
        # evaluating then reducing equals reducing then evaluating
        # away from degenerate points
        a, f = legendre_input()
        R = f.ring
        x, y, z = R.gens()
        alpha_poly = x * y * z
        p = 10007
        rng = random.Random(3)
        space_t = FormSpace(R, f)
        engine_t = ReductionEngine(space_t, certificate_mode=False)
        exact = engine_t.reduce_r(space_t.omega_form(alpha_poly), 1,
                                  with_certificate=False)
        for _ in range(3):
            u = rng.randrange(2, p)
            Fp = PrimeField(p)
            ring_p = R.with_field(Fp)
            ev = lambda c: F.eval_at(c, u, target=Fp)
            fp = R.map_coefficients(f, ev, ring_p)
            sp = FormSpace(ring_p, fp)
            en = ReductionEngine(sp, certificate_mode=False)
            direct = en.reduce_r(sp.omega_form(
                R.map_coefficients(alpha_poly, ev, ring_p)), 1,
                with_certificate=False)
            want = {k: F.eval_at(c, u, target=Fp)
                    for k, c in space_t.encode(exact).terms}
            got = dict(sp.encode(direct).terms)
            assert got == {k: v for k, v in want.items() if v}


class TestModularDriver:
    def test_pencil(self):
        a, f = pencil_input()
        res = picard_fuchs_modular(a, f, 1, seed=5)
        assert res.operator == DiffOperator(QQ, [P(1), P(0, 2)])
        assert res.r_used == 1
        assert res.certificate is None

    def test_t_free(self):
        R = poly_ring(F, ("x0", "x1"))
        x0, x1 = R.gens()
        res = picard_fuchs_modular(R.one, x0 * x0 + x1 * x1, 1, seed=1)
        assert res.operator == DiffOperator(QQ, [(), P(1)])

    def test_plain_rational_input_lifted(self):
        R = poly_ring(QQ, ("x", "y", "z"))
        x, y, z = R.gens()
        res = picard_fuchs_modular(x ** 3, x * y * y - z ** 3, 2, seed=2)
        assert res.operator == DiffOperator(QQ, [(), P(1)])
        assert res.r_used == 1

    def test_legendre_matches_exact(self):
        a, f = legendre_input()
        res = picard_fuchs_modular(a, f, 1, seed=3)
        assert res.operator == legendre_operator()
        assert res.operator == picard_fuchs(a, f, 1).operator

    def test_small_primes_force_more_crt(self):
        # tiny primes under-provision the reconstruction; the budget
        # doubling must bring in enough of them to finish correctly
        a, f = legendre_input()
        res = picard_fuchs_modular(a, f, 1, prime_bits=10, seed=4)
        assert res.operator == legendre_operator()

    def test_corrupted_reconstruction_is_caught(self, monkeypatch):
        import picardfuchs.modular as modular
        real = modular.crt_and_ratrec

        def corrupt(residues):
            return real(residues) + 1

        monkeypatch.setattr(modular, "crt_and_ratrec", corrupt)
        a, f = pencil_input()
        with pytest.raises(ModularDisagreement):
            picard_fuchs_modular(a, f, 1, seed=6)

    def test_seed_controls_prime_choice(self):
        a, f = pencil_input()
        r1 = picard_fuchs_modular(a, f, 1, seed=7)
        r2 = picard_fuchs_modular(a, f, 1, seed=8)
        assert r1.operator == r2.operator
