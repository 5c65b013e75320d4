import math

import numpy as np
import pytest

import amprestore as ar


def test_dct_round_trip_and_orthonormality():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(64)
    c = ar.dct_forward(x)
    assert np.allclose(ar.dct_inverse(c), x, atol=1e-12)
    assert math.isclose(np.linalg.norm(c), np.linalg.norm(x), rel_tol=1e-12)
    assert np.allclose(ar.dct_forward(np.ones(8)), [math.sqrt(8)] + [0.0] * 7, atol=1e-12)


def test_soft_threshold():
    assert list(ar.soft_threshold(np.array([3.0, -0.5, -2.0]), 1.0)) == [2.0, 0.0, -1.0]
    with pytest.raises(ValueError):
        ar.soft_threshold(np.array([1.0]), -1.0)


def test_amp_recovers_gaussian_instance():
    a, x0, y = ar.make_gaussian_instance(128, 256, 12, seed=3)
    est, trace, converged = ar.amp_recover(y, a)
    assert np.linalg.norm(est - x0) < 1e-2 * np.linalg.norm(x0)
    assert trace[0][0] == 0
    assert np.allclose(a @ x0, y)

    cfg = ar.SolverConfig(max_iters=40, policy="residual:2.5", onsager_cap=0.0)
    amp_est, amp_trace, _ = ar.amp_recover(y, a, cfg)
    ist_est, ist_trace, _ = ar.ist_recover(y, a, cfg)
    assert amp_trace == ist_trace
    assert np.array_equal(amp_est, ist_est)


def test_fixed_point_primitives():
    assert ar.quantize(1.0) == 4096
    assert ar.quantize(100.0) == 32767
    assert ar.dequantize(2048) == 0.5
    assert ar.mac(0, 4096, 4096) == 4096
    assert ar.mac(32000, 32767, 32767) == 32767
    assert ar.trsh(5000, 1000) == 4000
    assert ar.trsh(-500, 1000) == 0

    a, _, y = ar.make_gaussian_instance(64, 128, 4, seed=1)
    ref, _, _ = ar.amp_recover(y, a)
    fx, _, _ = ar.amp_recover_fixed(y, a, fmt="Q3.12")
    assert np.linalg.norm(fx - ref) <= 0.05 * np.linalg.norm(ref)


def test_declick_pipeline(tmp_path):
    t = np.arange(22050) / 44100.0
    clean = 0.3 * np.sin(2 * np.pi * 440 * t) + 0.2 * np.sin(2 * np.pi * 1250 * t)
    dirty, positions = ar.corrupt_clicks(clean, 0.005, seed=42)
    assert len(positions[0]) > 0
    fixed, report = ar.restore(dirty)
    assert ar.rmse(fixed, clean) <= 0.25 * ar.rmse(dirty, clean)
    assert ar.snr_improvement(clean, dirty, fixed) >= 12.0
    assert {r["flag"] for r in report} == {"ok"}

    blocks = ar.segment_blocks(clean, 512, 256)
    assert np.allclose(ar.overlap_add(blocks, 512, 256, len(clean)), clean, atol=1e-12)

    path = str(tmp_path / "x.wav")
    stereo = np.stack([clean, -clean])
    ar.write_wav(path, stereo)
    back, rate = ar.read_wav(path)
    assert rate == 44100
    assert back.shape == (2, clean.size)
    assert np.max(np.abs(back - stereo)) <= 0.5 / 32768 + 1e-12


def test_wav_errors(tmp_path):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFX0000WAVE")
    with pytest.raises(ar.WavError):
        ar.read_wav(str(bad))
