import cmath
import functools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: (len(k.split()[0]), k)):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@functools.lru_cache(maxsize=4)
def gaussian_extrema(N: int, draws: int, seed: int = 99):
    """(max, min) of N i.i.d. standard normals, ``draws`` times; no OFDM involved."""
    rng = np.random.default_rng(seed)
    hi = np.empty(draws)
    lo = np.empty(draws)
    step = max(1, 2_000_000 // N)
    for s in range(0, draws, step):
        z = rng.standard_normal((min(step, draws - s), N))
        hi[s : s + len(z)] = z.max(axis=1)
        lo[s : s + len(z)] = z.min(axis=1)
    return hi, lo


def naive_dft_double_loop(X):
    """x[n] = N**-0.5 sum_k X[k] exp(2 pi j k n / N) by explicit summation."""
    N = len(X)
    Xs = [complex(v) for v in X]
    out = np.zeros(N, dtype=complex)
    for n in range(N):
        acc = 0j
        for k in range(N):
            acc += Xs[k] * cmath.exp(2j * cmath.pi * ((k * n) % N) / N)
        out[n] = acc
    return out / np.sqrt(N)


@pytest.fixture(scope="session")
def gauss_extrema():
    return gaussian_extrema
