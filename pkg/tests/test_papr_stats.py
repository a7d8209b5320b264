import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from papr_vlc.analytic import ccdf_papr_complex, ccdf_upapr
from papr_vlc.ofdm_signal import TimeSymbol, batch_generate, make_constellation
from papr_vlc.papr_stats import (
    CcdfCounter, ccdf_std_error, complex_papr, complex_papr_array, db_to_ratio,
    empirical_ccdf, max_combined_z, peak_arrays, peak_triple, symbol_extrema,
)


def test_peak_triple_direct():
    p = peak_triple(TimeSymbol(np.array([1.0, -2.0, 1.0, 0.0]), 1.0))
    assert (p.upapr, p.lpapr, p.papr) == (1.0, 4.0, 4.0)


def test_peak_triple_constant_vector():
    p = peak_triple(TimeSymbol(np.full(8, 0.7), 0.5))
    assert p.upapr == pytest.approx(0.49 / 0.5) and p.lpapr == p.upapr


def test_peak_triple_identity_on_random_symbol():
    for sym in batch_generate(20, 1024, make_constellation(64), seed=4):
        p = peak_triple(sym)
        assert p.papr == max(p.upapr, p.lpapr)


def test_peak_triple_rejects_complex():
    with pytest.raises(TypeError, match="complex_papr"):
        peak_triple(TimeSymbol(np.array([1j, 1.0]), 1.0))


def test_complex_papr():
    assert complex_papr(TimeSymbol(np.array([1, 1j, -1, -1j]), 1.0)) == 1.0
    X = np.zeros(16, complex)
    X[3] = 1.0
    from papr_vlc.ofdm_signal import FrequencyFrame, idft
    sym = idft(FrequencyFrame(X, hermitian=False))
    # one active bin: |x[n]|^2 = 1/N for every n, normalised by E|x|^2 = 1/N
    assert complex_papr(TimeSymbol(sym.x, 1 / 16)) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(TypeError):
        complex_papr(TimeSymbol(np.array([1.0, 2.0]), 1.0))


def test_empirical_ccdf_examples():
    c = empirical_ccdf([1.0, 2.0, 3.0], [0.0, 2.5])
    np.testing.assert_allclose(c.probabilities, [1.0, 1 / 3])
    assert c.samples == 3 and c.kind == "empirical"
    assert empirical_ccdf([np.array([1.0, 2.0])], [5.0]).probabilities[0] == 0.0


def test_empirical_ccdf_errors():
    with pytest.raises(ValueError):
        empirical_ccdf([], [1.0])
    with pytest.raises(ValueError):
        empirical_ccdf([1.0], [2.0, 1.0])


def test_empirical_ccdf_consumes_a_generator_once():
    def values():
        for i in range(200_000):
            yield float(i % 10)
    c = empirical_ccdf(values(), [4.5])
    assert c.probabilities[0] == 0.5


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=200),
       st.lists(st.floats(-100, 100), min_size=1, max_size=20))
def test_ccdf_counts_exact_and_monotone(values, thresholds):
    t = sorted(thresholds)
    c = empirical_ccdf(values, t)
    expected = [sum(v > x for v in values) / len(values) for x in t]
    np.testing.assert_array_equal(c.probabilities, expected)
    assert np.all(np.diff(c.probabilities) <= 0)
    assert np.allclose(c.probabilities * c.samples, np.round(c.probabilities * c.samples))


@given(st.lists(st.floats(0, 10), min_size=1, max_size=50),
       st.lists(st.floats(0, 10), min_size=1, max_size=50))
def test_counter_merge_is_split_invariant(a, b):
    t = np.linspace(0, 10, 11)
    whole = CcdfCounter(t)
    whole.update(a + b)
    left, right = CcdfCounter(t), CcdfCounter(t)
    left.update(a)
    right.update(b)
    m1, m2 = left.merge(right), right.merge(left)
    np.testing.assert_array_equal(m1.counts, whole.counts)
    np.testing.assert_array_equal(m2.counts, whole.counts)
    assert m1.samples == whole.samples


def test_std_error():
    assert ccdf_std_error(0.5, 10_000) == pytest.approx(0.005)
    assert ccdf_std_error(0.0, 100) == 0.0
    assert ccdf_std_error(0.01, 100_000) == pytest.approx(3.146e-4, rel=1e-3)
    with pytest.raises(ValueError):
        ccdf_std_error(1.5, 10)


def test_extrema_are_deterministic_and_worker_independent(monkeypatch):
    symbol_extrema.cache_clear()
    monkeypatch.setenv("PAPR_VLC_THREADS", "1")
    a = symbol_extrema(64, 4, 5000, 3)
    symbol_extrema.cache_clear()
    monkeypatch.setenv("PAPR_VLC_THREADS", "3")
    b = symbol_extrema(64, 4, 5000, 3)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    assert not a[0].flags.writeable
    first = next(batch_generate(1, 64, make_constellation(4), seed=3))
    assert a[0][0] == first.x.max() and a[1][0] == first.x.min()


def test_upapr_lpapr_exchangeable_small_run():
    pk = peak_arrays(256, 4, 20_000, 8)
    t = db_to_ratio(np.arange(6, 12.01, 0.5))
    cu = empirical_ccdf([pk["upapr"]], t)
    cl = empirical_ccdf([pk["lpapr"]], t)
    assert max_combined_z(cu, cl, cu.probabilities >= 1e-2) <= 4


def test_complex_papr_of_gaussian_samples_follows_closed_form():
    # i.i.d. CN(0, 1) samples are the exact model behind 1 - (1 - e^-r)^N
    N, S = 256, 100_000
    rng = np.random.default_rng(17)
    p = np.empty(S)
    for i in range(0, S, 5000):
        z = (rng.standard_normal((5000, N)) + 1j * rng.standard_normal((5000, N))) / math.sqrt(2)
        p[i : i + 5000] = [complex_papr(TimeSymbol(row, 1.0)) for row in z]
    for db in (7.0, 8.0, 9.0, 10.0, 11.0):
        r = 10 ** (db / 10)
        expected = ccdf_papr_complex(r, N)
        assert abs(np.mean(p > r) - expected) <= 3 * math.sqrt(expected * (1 - expected) / S)


def test_complex_ofdm_papr_at_least_one_for_constant_modulus():
    # 4-QAM on all bins: mean power of every symbol is exactly 1
    p = complex_papr_array(64, 4, 2000, seed=5)
    assert p.shape == (2000,) and np.all(p >= 1.0 - 1e-12)


def test_ccdf_increases_with_n():
    t = db_to_ratio(np.arange(7, 12.01, 0.5))
    small = empirical_ccdf([peak_arrays(128, 4, 20_000, 1)["upapr"]], t)
    large = empirical_ccdf([peak_arrays(1024, 4, 20_000, 1)["upapr"]], t)
    se = np.sqrt(small.std_errors() ** 2 + large.std_errors() ** 2)
    assert np.all(large.probabilities >= small.probabilities - 3 * se)
    assert np.all(np.diff(ccdf_upapr(t, 1024)) < 0)
