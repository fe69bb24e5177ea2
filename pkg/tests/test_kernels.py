"""The numba, numpy and plain-loop kernels must agree."""

import numpy as np
import pytest

from rdavg import _kernels

BACKENDS = [("numpy", _kernels.numpy_kernels), ("loops", _kernels.loop_kernels)]
if _kernels.numba_kernels is not None:
    BACKENDS.append(("numba", _kernels.numba_kernels))


def _knots(rng, n):
    x = np.sort(rng.uniform(0, 10, n))
    y = np.cumsum(rng.uniform(-1, 2, n))
    return x, y


@pytest.mark.parametrize("name, k", BACKENDS)
@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_backends_agree(name, k, n):
    rng = np.random.default_rng(n)
    ref = _kernels.numpy_kernels
    for _ in range(20):
        x, y = _knots(rng, n)
        m = k.pchip_slopes(x, y)
        np.testing.assert_allclose(m, ref.pchip_slopes(x, y), rtol=1e-12, atol=1e-12)
        c = k.hermite_coefs(x, y, m)
        np.testing.assert_allclose(c, ref.hermite_coefs(x, y, m), rtol=1e-12, atol=1e-12)
        xs = np.linspace(x[0], x[-1], 17)
        np.testing.assert_allclose(k.ppoly_eval(x, c, xs), ref.ppoly_eval(x, c, xs), rtol=1e-12, atol=1e-12)
        lo, hi = x[0] + 0.1 * (x[-1] - x[0]), x[-1] - 0.2 * (x[-1] - x[0])
        assert k.ppoly_integrate(x, c, lo, hi) == pytest.approx(ref.ppoly_integrate(x, c, lo, hi), rel=1e-12, abs=1e-12)
        if n <= 4:
            np.testing.assert_allclose(k.poly_solve(x, y), ref.poly_solve(x, y), rtol=1e-8, atol=1e-9)


def test_active_backend_matches_flag():
    assert _kernels.BACKEND in ("numba", "numpy")
    if _kernels.BACKEND == "numba":
        assert _kernels.active is _kernels.numba_kernels
    else:
        assert _kernels.active is _kernels.numpy_kernels


def test_numpy_backend_selected_by_env(monkeypatch):
    import importlib

    monkeypatch.setenv("RDAVG_NUMBA", "0")
    mod = importlib.reload(_kernels)
    try:
        assert mod.BACKEND == "numpy"
    finally:
        monkeypatch.delenv("RDAVG_NUMBA")
        importlib.reload(_kernels)
