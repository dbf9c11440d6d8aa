"""Backend equivalence: the numba kernels against the pure-numpy fallback."""

import importlib

import numpy as np
import pytest

from papr_lab import kernels
from papr_lab.constellation import build_constellation, sample_block
from papr_lab.waveform import OfdmConfig

QAM16 = build_constellation("qam16")

numba_available = importlib.util.find_spec("numba") is not None
needs_numba = pytest.mark.skipif(not numba_available, reason="numba not installed")


@pytest.fixture(autouse=True)
def restore_backend():
    yield
    kernels.set_backend(None)


def make_case(n, oversample=4, seed=0):
    cfg = OfdmConfig(n, QAM16, oversample)
    rng = np.random.default_rng(seed)
    block = sample_block(QAM16, n, rng)
    return cfg, block * cfg.cf_scale, rng


def run_both(fn):
    kernels.set_backend("numba")
    a = fn()
    kernels.set_backend("numpy")
    b = fn()
    return a, b


@needs_numba
class TestBackendEquivalence:
    @pytest.mark.parametrize("oversample", [4, 3])  # pow2 grid and the direct path
    @pytest.mark.parametrize("paired", [True, False])
    def test_select_block(self, oversample, paired):
        cfg, w, rng = make_case(12, oversample, seed=3)
        shots = 16
        tails = rng.integers(
            0, 2, kernels.tail_sign_count(12, 1, shots, paired), dtype=np.int8
        ) * 2 - 1

        (s1, p1, m1), (s2, p2, m2) = run_both(
            lambda: kernels.select_block(w, cfg.grid_size, 1, shots, tails, paired)
        )
        np.testing.assert_array_equal(s1, s2)
        np.testing.assert_allclose(p1, p2, rtol=1e-9)
        np.testing.assert_allclose(m1, m2, rtol=1e-9)

    def test_exact_cf(self):
        cfg, w, rng = make_case(11, seed=4)
        prefix = (rng.integers(0, 2, 3, dtype=np.int8) * 2 - 1).astype(np.int8)
        a, b = run_both(lambda: kernels.exact_cf(w, cfg.grid_size, prefix))
        np.testing.assert_allclose(a, b, rtol=1e-11)

    def test_exhaustive_value(self):
        cfg, w, _ = make_case(10, seed=5)
        (sa, va), (sb, vb) = run_both(lambda: kernels.exhaustive_best(w, cfg.grid_size))
        np.testing.assert_allclose(va, vb, rtol=1e-11)
        # optima can tie; both sign vectors must achieve the same value
        for signs in (sa, sb):
            padded = np.zeros(cfg.grid_size, dtype=np.complex128)
            padded[:10] = signs * w
            val = np.max(np.abs(np.fft.ifft(padded, norm="forward")))
            np.testing.assert_allclose(val, va, rtol=1e-11)

    def test_fft_kernel_matches_numpy(self):
        from papr_lab.kernels import _numba, _plans

        rng = np.random.default_rng(6)
        for size in (8, 64, 256, 1024):
            twid, brev = _plans.fft_plan(size)
            a = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            out = np.empty_like(a)
            _numba._inv_dft_pow2(a, out, twid, brev)
            np.testing.assert_allclose(
                out, np.fft.ifft(a, norm="forward"), rtol=1e-12, atol=1e-12
            )


class TestDispatch:
    def test_env_flag_selects_backend(self, monkeypatch):
        monkeypatch.setenv("PAPR_LAB_BACKEND", "numpy")
        kernels.set_backend(None)
        assert kernels.active_backend() == "numpy"

    def test_bad_env_flag_rejected(self, monkeypatch):
        monkeypatch.setenv("PAPR_LAB_BACKEND", "fortran")
        kernels.set_backend(None)
        with pytest.raises(ValueError, match="PAPR_LAB_BACKEND"):
            kernels.active_backend()

    def test_explicit_set_overrides_env(self, monkeypatch):
        monkeypatch.setenv("PAPR_LAB_BACKEND", "numpy")
        kernels.set_backend(None)
        assert kernels.set_backend("numpy") == "numpy"
        assert kernels.active_backend() == "numpy"

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError, match="unknown backend"):
            kernels.set_backend("cython")

    def test_tail_sign_count(self):
        assert kernels.tail_sign_count(8, 1, 10, True) == 10 * 21
        assert kernels.tail_sign_count(8, 1, 10, False) == 2 * 10 * 21
        assert kernels.tail_sign_count(8, 7, 10, True) == 0

    @needs_numba
    def test_warmup_compiles(self):
        kernels.set_backend("numba")
        kernels.warmup()
