import math

import numpy as np
import pytest

import srmc


def test_transform_is_orthonormal():
    for name in ("wht", "dct", "dft"):
        w = srmc.Transform(name, 64).dense()
        assert np.abs(w @ w.T - np.eye(64)).max() < 1e-10


def test_measure_energy_identity():
    x = srmc.synth_signal("smooth", 256, seed=3)
    spec = srmc.SensingSpec("lr", 256, 64, "dct", seed=5)
    y, sel, z = srmc.measure(spec, x)
    assert len(y) == 64 and min(sel) >= 1
    assert math.isclose(z @ z, 256 / 64 * (x @ x), rel_tol=1e-9)
    assert np.array_equal(y, z[np.array(sel) - 1])


def test_moments_and_bounds():
    x = srmc.synth_signal("ar1", 128, rho=0.8)
    spec = srmc.SensingSpec("rc", 128, 32)
    mom = srmc.moments(spec, x, [1, 2, 3])
    rho = srmc.circular_autocorrelation(x)
    assert mom["cov"][0, 1] == pytest.approx(rho[1] / 32)
    assert srmc.xi(0.0) == 0.5
    assert srmc.invert_bound("lr", 0.01) == pytest.approx(3.2552473, abs=1e-7)
    assert srmc.count_distinct_components(srmc.Transform("dct", 16)) == 5


def test_quantizer():
    q = srmc.lloyd_max_quantizer(0.0, 1.0, 2, 1e-12)
    assert q.reproductions[1] == pytest.approx(math.sqrt(2 / math.pi), abs=1e-6)
    u = srmc.uniform_quantizer(0.0, 1.0, 8, 3.0)
    assert abs(u.dequantize(u.quantize(0.3)) - 0.3) <= u.step / 2
    assert sum(u.probabilities(0.0, 1.0)) == pytest.approx(1.0)


def test_encode_decode_round_trip():
    x = srmc.synth_signal("ar1", 512, rho=0.95, seed=2)
    spec = srmc.SensingSpec("rc", 512, 128, seed=9)
    enc = srmc.encode(x, spec, {"quantizer": {"levels": 64}, "prediction": 2})
    dec = srmc.decode(enc["bytes"])
    assert np.array_equal(dec["yhat"], enc["yhat"])
    assert dec["side_info"]["model"] == "rho"
    assert enc["total_bits"] == enc["header_bits"] + enc["payload_bits"]
    with pytest.raises(ValueError):
        srmc.decode(b"XXXX" + enc["bytes"][4:])


def test_replacement_and_qq():
    assert srmc.replacement_ratio(10, 2) == pytest.approx(0.9)
    x = srmc.synth_signal("smooth", 4096)
    _, _, r = srmc.qq(srmc.SensingSpec("lr", 4096, 1024, "wht"), x, seeds=2)
    assert r > 0.99
