"""Backend selection for the piecewise-cubic kernels.

``RDAVG_NUMBA=0`` in the environment forces the pure-numpy path; otherwise
the loop kernels are compiled with numba when it is importable. Both
backends stay importable as :data:`numpy_kernels` and :data:`numba_kernels`
so tests and the benchmark can run them side by side.
"""

import os
from types import SimpleNamespace

from . import _loops, _numpy_kernels

KERNEL_NAMES = ("pchip_slopes", "hermite_coefs", "poly_solve", "ppoly_eval", "ppoly_integrate")

numpy_kernels = SimpleNamespace(**{name: getattr(_numpy_kernels, name) for name in KERNEL_NAMES})
loop_kernels = SimpleNamespace(**{name: getattr(_loops, name) for name in KERNEL_NAMES})

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

if numba is not None:
    numba_kernels = SimpleNamespace(
        **{name: numba.njit(cache=True)(getattr(_loops, name)) for name in KERNEL_NAMES}
    )
else:  # pragma: no cover
    numba_kernels = None


def numba_requested():
    return os.environ.get("RDAVG_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


if numba_kernels is not None and numba_requested():
    BACKEND = "numba"
    active = numba_kernels
else:
    BACKEND = "numpy"
    active = numpy_kernels
