import pytest

from stringeig import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jit kernels once up front so timed tests measure the
    numerics, not compilation."""
    _kernels.warmup()
