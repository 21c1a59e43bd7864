import pytest

from qslkit import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Pay any JIT compilation cost before timing-sensitive tests run.
    _kernels.warmup()
