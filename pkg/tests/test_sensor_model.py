"""Single-tile physics: gas law, force-to-volume law, ADC and sampling."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from foottile.calibration import evaluate, normalize
from foottile.errors import DesignError, DomainError
from foottile.sensor_model import (DEFAULT_MODEL, PRESETS, REFERENCE_CURVE, REFERENCE_DESIGN,
                                   DeflectionModel, SensorDesign, bubble_pressure,
                                   compressed_volume, dequantize, hertz_deflection,
                                   hertz_force, quantize, sample, sample_arrays,
                                   saturation_force)

D = REFERENCE_DESIGN


def test_bubble_pressure_examples():
    assert bubble_pressure(100.0, 10.0, 10.0) == 100.0
    assert bubble_pressure(100.0, 10.0, 8.7) == pytest.approx(114.9425, abs=1e-4)
    assert bubble_pressure(100.0, 10.0, 5.0) == pytest.approx(200.0)


@pytest.mark.parametrize("v1,v2", [(0.0, 1.0), (1.0, 0.0), (-1.0, -2.0), (1.0, 1.5)])
def test_bubble_pressure_rejects_bad_volumes(v1, v2):
    with pytest.raises(DomainError):
        bubble_pressure(100.0, v1, v2)


@given(st.floats(50.0, 115.0), st.floats(1e-3, 1e4), st.floats(0.87, 1.0))
def test_gas_law_conservation(p1, v1, frac):
    v2 = frac * v1
    assert bubble_pressure(p1, v1, v2) * v2 == pytest.approx(p1 * v1, rel=1e-9)


def test_bubble_pressure_increases_as_volume_shrinks():
    v2 = np.linspace(100.0, 50.0, 50)
    assert np.all(np.diff(bubble_pressure(100.0, 100.0, v2)) > 0)


def test_zero_force_keeps_sphere_volume():
    assert compressed_volume(0.0, D) == pytest.approx(4.0 / 3.0 * math.pi * 27.0)
    assert D.bubble_volume == pytest.approx(113.097, abs=1e-3)


def test_saturation_volume_is_thirteen_percent_compression():
    v = compressed_volume(saturation_force(D), D) / D.bubble_volume
    # 115 kPa is reached at V1 * 100 / 115, i.e. 13.04 % compression
    assert v == pytest.approx(100.0 / 115.0, rel=1e-12)
    assert abs((1.0 - v) - 0.13) <= 0.001


def test_volume_constant_beyond_saturation():
    fs = saturation_force(D)
    assert compressed_volume(2 * fs, D) == compressed_volume(fs, D)


def test_half_saturation_round_trips_through_reference_curve():
    f = 0.5 * saturation_force(D)
    p2 = bubble_pressure(D.baseline_pressure, D.bubble_volume, compressed_volume(f, D))
    pn = normalize(p2, D)
    assert evaluate(REFERENCE_CURVE, pn) - evaluate(REFERENCE_CURVE, 0.0) == pytest.approx(f, abs=1e-6)
    # independent bisection oracle on the reference force law
    ref = lambda p: evaluate(REFERENCE_CURVE, p) - evaluate(REFERENCE_CURVE, 0.0)
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ref(mid) < f else (lo, mid)
    assert pn == pytest.approx(lo, abs=1e-9)


def test_negative_force_rejected():
    with pytest.raises(DomainError):
        compressed_volume(-1.0, D)


def test_reference_saturation_force_in_published_range():
    assert 25.0 <= saturation_force(D) <= 35.0
    assert saturation_force(D) == pytest.approx(30.0)


def test_saturation_ordering_across_presets():
    sat = {k: saturation_force(v) for k, v in PRESETS.items()}
    assert sat["d10-vf40"] < sat["d12-vf60"]
    for mat in ("vf40", "vf60"):
        assert sat[f"d10-{mat}"] < sat[f"d11-{mat}"] < sat[f"d12-{mat}"]
    for d in (10, 11, 12):
        assert sat[f"d{d}-vf40"] < sat[f"d{d}-vf60"]


def test_doubling_stiffness_raises_saturation():
    stiff = SensorDesign(youngs_modulus=2 * D.youngs_modulus)
    assert DEFAULT_MODEL.stiffness_scale(stiff) == pytest.approx(2 * DEFAULT_MODEL.stiffness_scale(D))
    assert saturation_force(stiff) > saturation_force(D)


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(8.0, 14.0))
def test_stiffness_scale_monotone(e, de, d):
    m = DeflectionModel()
    a = SensorDesign(dome_diameter=d, youngs_modulus=e)
    assert m.stiffness_scale(SensorDesign(dome_diameter=d, youngs_modulus=e + de)) > m.stiffness_scale(a)
    assert m.stiffness_scale(SensorDesign(dome_diameter=d + 0.5, youngs_modulus=e)) > m.stiffness_scale(a)


def test_quantize_examples():
    assert quantize(50.0, D) == 0
    assert quantize(115.0, D) == 1023
    assert abs(quantize(82.5, D) - 512) <= 1
    assert quantize(20.0, D) == 0 and quantize(300.0, D) == 1023


@given(st.floats(50.0, 115.0))
def test_dequantize_within_half_lsb(p):
    lsb = (D.sensor_max - D.sensor_min) / D.full_scale
    assert abs(dequantize(quantize(p, D), D) - p) <= 0.5 * lsb + 1e-12


def test_sample_at_rest_and_saturation():
    s = sample(0.0, D, noise_sigma=0.0, rng_seed=1)
    assert s.pressure == 100.0 and not s.saturated
    s = sample(2 * saturation_force(D), D, noise_sigma=0.0, rng_seed=1)
    assert s.pressure == 115.0 and s.saturated and s.pressure_counts == 1023


def test_sample_determinism():
    a = sample(10.0, D, noise_sigma=0.03, rng_seed=1)
    b = sample(10.0, D, noise_sigma=0.03, rng_seed=2)
    c = sample(10.0, D, noise_sigma=0.03, rng_seed=1)
    assert a != b
    assert a == c


@given(st.floats(0.0, 30.0))
def test_calibration_consistency(f):
    s = sample(f, D, noise_sigma=0.0, rng_seed=0)
    lsb_force = REFERENCE_CURVE.derivative(1.0) * ((D.sensor_max - D.sensor_min)
                                                   / D.full_scale / D.span)
    got = evaluate(REFERENCE_CURVE, normalize(s.pressure, D)) - evaluate(REFERENCE_CURVE, 0.0)
    assert abs(got - f) <= 2 * lsb_force


def test_reading_monotone_in_force():
    f = np.linspace(0.0, 40.0, 500)
    p, counts, _ = sample_arrays(f, D, noise_sigma=0.0)
    assert np.all(np.diff(p) >= 0)
    assert np.all(np.diff(counts) >= 0)


def test_noise_std_matches_sigma():
    rng = np.random.default_rng(0)
    p, _, _ = sample_arrays(np.full(20000, 10.0), D, noise_sigma=0.03, rng=rng)
    assert np.std(normalize(p, D)) == pytest.approx(0.03, rel=0.03)
    p, _, _ = sample_arrays(np.full(20000, 10.0), D, noise_sigma=0.03, rng=rng, noise="student-t")
    assert np.median(np.abs(normalize(p, D) - np.median(normalize(p, D)))) < 0.03


@pytest.mark.parametrize("kw", [
    dict(bubble_radius=7.0),
    dict(baseline_pressure=120.0),
    dict(sensor_min=100.0),
    dict(youngs_modulus=0.0),
])
def test_design_validation(kw):
    with pytest.raises(DesignError):
        SensorDesign(**kw)


def test_ten_mm_dome_with_three_mm_bubble_is_allowed():
    SensorDesign(dome_diameter=10.0, bubble_radius=3.0)
    SensorDesign(dome_diameter=10.0, bubble_radius=6.0)
    with pytest.raises(DesignError):
        SensorDesign(dome_diameter=10.0, bubble_radius=6.01)


def test_design_from_mapping():
    d = SensorDesign.from_mapping({"preset": "d12-vf40", "adc_bits": "12"})
    assert d.dome_diameter == 12.0 and d.youngs_modulus == 0.69 and d.full_scale == 4095
    with pytest.raises(DesignError):
        SensorDesign.from_mapping({"dome_size": "3"})
    with pytest.raises(DesignError):
        SensorDesign.from_mapping({"preset": "d13-vf99"})


@given(st.floats(0.0, 3.0))
def test_hertz_inverse(delta):
    assert hertz_deflection(hertz_force(delta, D), D) == pytest.approx(delta, abs=1e-9)


def test_hertz_reference_stiffness():
    # 4/3 * E / (1 - nu^2) * sqrt(R) for E = 2.17 MPa, nu = 0.5, R = 5.5 mm
    assert hertz_force(1.0, D) == pytest.approx(4 / 3 * 2.17 / 0.75 * math.sqrt(5.5))
