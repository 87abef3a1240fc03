import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from cvqan.params import SystemParams, db_to_linear, linear_to_db, transmittance


def test_db_to_linear_identity_cases():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == 10.0
    # 10^(-0.06), checked against an independent evaluation
    assert db_to_linear(-0.6) == pytest.approx(0.87096, rel=1e-4)


def test_db_rejects_non_finite():
    for bad in (math.inf, -math.inf, math.nan):
        with pytest.raises(ValueError):
            db_to_linear(bad)
    with pytest.raises(ValueError):
        linear_to_db(0.0)
    with pytest.raises(ValueError):
        linear_to_db(-1.0)


@given(st.floats(min_value=-300.0, max_value=300.0))
def test_db_roundtrip(x_db):
    assert linear_to_db(db_to_linear(x_db)) == pytest.approx(x_db, rel=1e-12, abs=1e-12)


def test_transmittance_values():
    assert transmittance(0.0, 0.2, 1) == 1.0
    assert transmittance(30.0, 0.2, 1) == pytest.approx(0.25119, rel=1e-4)
    assert transmittance(30.0, 0.2, 8) == pytest.approx(0.031399, rel=1e-4)


def test_transmittance_monotone_in_length_and_branches():
    t = [transmittance(length, 0.2, 1) for length in (0.0, 10.0, 20.0, 50.0)]
    assert all(a > b for a, b in zip(t, t[1:]))
    t = [transmittance(30.0, 0.2, n) for n in (1, 2, 8, 64)]
    assert all(a > b for a, b in zip(t, t[1:]))


def test_transmittance_invalid_inputs():
    with pytest.raises(ValueError):
        transmittance(30.0, 0.2, 0)
    with pytest.raises(ValueError):
        transmittance(-1.0, 0.2, 1)


BAD_FIELD_VALUES = [
    ("eta", 0.0), ("eta", 1.5), ("beta_rec", 0.0), ("beta_rec", 1.2),
    ("v_el", -0.1), ("v_mod", 0.0), ("rep_rate", 0.0), ("gate_time", 0.0),
    ("atten_db_per_km", float("nan")), ("fiber_km", -1.0), ("loss_qnu_db", -1.0),
    ("rin_sig", -1e-12), ("rin_lo", -1e-12), ("linewidth_a_hz", -1.0),
    ("linewidth_b_hz", -1.0), ("nep", -1e-12), ("det_bandwidth_hz", 0.0),
    ("photon_energy_j", 0.0), ("p_lo_w", 0.0), ("tia_gain_ohm", 0.0),
    ("responsivity", 0.0), ("adc_bits", 0), ("adc_range_v", 0.0),
    ("adc_var_v2", -1e-9), ("cmrr_db", float("inf")), ("dac_rel_uncertainty", -0.01),
]


@pytest.mark.parametrize("field,value", BAD_FIELD_VALUES)
def test_each_out_of_range_field_rejected(field, value, params):
    with pytest.raises(ValueError):
        replace(params, **{field: value})


def test_defaults_are_reference_operating_point(params):
    assert params.eta == 0.42
    assert params.v_el == 0.18
    assert params.beta_rec == 0.97
    assert params.v_mod == 0.5
    assert params.rep_rate == 1e6
    assert params.photon_energy_j == 1.28e-19
    assert params.adc_bits == 10


def test_from_mapping_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        SystemParams.from_mapping({"eta": 0.5, "not_a_field": 1.0})


def test_from_mapping_roundtrip(params):
    loaded = SystemParams.from_mapping({"eta": 0.6, "fiber_km": 10.0})
    assert loaded.eta == 0.6
    assert loaded.fiber_km == 10.0
    assert loaded.v_el == params.v_el


def test_from_mapping_adc_bits_must_be_integer():
    with pytest.raises(ValueError):
        SystemParams.from_mapping({"adc_bits": 10.5})
    assert SystemParams.from_mapping({"adc_bits": 12.0}).adc_bits == 12
