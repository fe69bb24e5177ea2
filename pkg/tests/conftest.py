from pathlib import Path

import numpy as np
import pytest
from hypothesis import assume
from hypothesis import strategies as st
from scipy.interpolate import PchipInterpolator

from rdavg.rd_model import validate_curve

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


def curve(points, label="a", sequence="s", unit="bpp"):
    return validate_curve(points, unit, label, sequence)


# -- independent oracles ----------------------------------------------------


def oracle_fit(x, y, kind):
    """Fitted callable built with numpy/scipy, not with rdavg."""
    if kind == "pchip":
        return PchipInterpolator(x, y)
    coefs = np.polyfit(x, y, 3)
    return lambda v: np.polyval(coefs, v)


def dense_bd_rate(ref, test, kind, samples=100_001):
    """BD-rate from sampling both fitted log-rate curves on a dense quality grid."""
    lo = max(ref.qualities.min(), test.qualities.min())
    hi = min(ref.qualities.max(), test.qualities.max())
    q = np.linspace(lo, hi, samples)
    f_ref = oracle_fit(ref.qualities, np.log10(ref.rates), kind)
    f_test = oracle_fit(test.qualities, np.log10(test.rates), kind)
    gap = np.trapezoid(f_test(q) - f_ref(q), q) / (hi - lo)
    return 100.0 * (10.0**gap - 1.0)


def dense_bd_psnr(ref, test, kind, samples=100_001):
    lr, lt = np.log10(ref.rates), np.log10(test.rates)
    lo, hi = max(lr.min(), lt.min()), min(lr.max(), lt.max())
    x = np.linspace(lo, hi, samples)
    f_ref = oracle_fit(lr, ref.qualities, kind)
    f_test = oracle_fit(lt, test.qualities, kind)
    return np.trapezoid(f_test(x) - f_ref(x), x) / (hi - lo)


# -- random curve generation --------------------------------------------------


def random_points(rng, n=4, rate_lo=0.02, rate_hi=2.0, q_lo=30.0, q_hi=42.0):
    rates = np.sort(10 ** rng.uniform(np.log10(rate_lo), np.log10(rate_hi), n))
    steps = rng.uniform(0.2, 1.0, n)
    cum = np.concatenate([[0.0], np.cumsum(steps[1:])])
    q = q_lo + (q_hi - q_lo) * cum / cum[-1]
    return list(zip(rates.tolist(), q.tolist()))


def random_pair(rng, n=4):
    """Two 4-point curves on overlapping quality ranges."""
    base_lo = rng.uniform(28, 34)
    ref = random_points(rng, n, q_lo=base_lo, q_hi=base_lo + rng.uniform(4, 8))
    shift = rng.uniform(-1.5, 1.5)
    test = random_points(
        rng, n, rate_lo=0.02 * rng.uniform(0.6, 1.4), rate_hi=2.0 * rng.uniform(0.6, 1.4),
        q_lo=base_lo + shift, q_hi=base_lo + shift + rng.uniform(4, 8),
    )
    return curve(ref, "ref"), curve(test, "test")


@st.composite
def rd_curves(draw, n=4, label="a"):
    log_rates = draw(
        st.lists(st.floats(-2.0, 1.0), min_size=n, max_size=n, unique=True).filter(
            lambda v: min(np.diff(sorted(v))) > 1e-3
        )
    )
    start = draw(st.floats(26.0, 36.0))
    steps = draw(st.lists(st.floats(0.3, 3.0), min_size=n - 1, max_size=n - 1))
    q = [start] + list(start + np.cumsum(steps))
    return curve(list(zip((10.0 ** np.sort(log_rates)).tolist(), q)), label)


@st.composite
def overlapping_pairs(draw, n=4):
    ref = draw(rd_curves(n, "ref"))
    test = draw(rd_curves(n, "test"))
    lo = max(ref.qualities.min(), test.qualities.min())
    hi = min(ref.qualities.max(), test.qualities.max())
    assume(hi - lo > 0.5)
    return ref, test


# -- acceptance reporting -------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion; printed in the terminal summary."""

    def record(number, title, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{name} {'ok' if passed else 'FAILED'}" for name, passed in checks)
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
