import pytest

from picardfuchs.algebra import QQ, poly_ring
from picardfuchs.forms import FormSpace
from picardfuchs.groebner import build_P_basis, syzygy_data
from picardfuchs.reduction import ReductionEngine


@pytest.fixture(scope="session")
def cusp():
    # cuspidal cubic curve, the running singular example
    R = poly_ring(QQ, ("x", "y", "z"))
    x, y, z = R.gens()
    return FormSpace(R, x * y * y - z * z * z)


@pytest.fixture(scope="session")
def cusp_gb(cusp):
    return build_P_basis(cusp)


@pytest.fixture(scope="session")
def circle():
    R = poly_ring(QQ, ("x0", "x1"))
    x0, x1 = R.gens()
    return FormSpace(R, x0 * x0 + x1 * x1)


@pytest.fixture(scope="session")
def fermat_cubic_surface():
    R = poly_ring(QQ, ("x0", "x1", "x2", "x3"))
    g = R.gens()
    return FormSpace(R, sum((v ** 3 for v in g), R.zero))


@pytest.fixture(scope="session")
def sextic_bench():
    # the singular sextic threefold with a one-dimensional singular locus
    R = poly_ring(QQ, ("x0", "x1", "x2", "x3"))
    x0, x1, x2, x3 = R.gens()
    f = (2 * x1 * x2 * x3 * (x0 - x1) * (x0 - x2) * (x0 - x3)
         - x0 ** 3 * (x0 ** 3 - x0 ** 2 * x3 + x1 * x2 * x3))
    return FormSpace(R, f)


@pytest.fixture(scope="session")
def sextic_bench_gb(sextic_bench):
    return build_P_basis(sextic_bench)


@pytest.fixture(scope="session")
def sextic_bench_syz(sextic_bench_gb):
    return syzygy_data(sextic_bench_gb)


@pytest.fixture(scope="session")
def sextic_engine(sextic_bench, sextic_bench_gb, sextic_bench_syz):
    return ReductionEngine(sextic_bench, basis=sextic_bench_gb,
                           syzygies=sextic_bench_syz, diagnostics=True)
