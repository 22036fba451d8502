"""Signal-theory layer: erfc accuracy, error law, penalties, conversions."""

import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from cvqkd.signaling import (
    SnrValue,
    ber_to_snr,
    db_to_linear,
    erfc,
    linear_to_db,
    simultaneous_snr,
    snr_to_ber,
)

mp.mp.dps = 40

# Frozen against the high-precision oracle below.
BER_AT_19_95 = 0.012765534629242  # 0.5*erfc(0.5*sqrt(19.95/2))
BER_AT_9_977 = 0.057131398668


def oracle_erfc(x: float) -> float:
    return float(mp.erfc(mp.mpf(x)))


def oracle_ber(snr: float) -> float:
    return float(0.5 * mp.erfc(0.5 * mp.sqrt(0.5 * mp.mpf(snr))))


class TestErfc:
    def test_matches_oracle_on_working_range(self):
        worst = 0.0
        for i in range(601):
            x = 6.0 * i / 600
            expected = oracle_erfc(x)
            worst = max(worst, abs(erfc(x) - expected) / expected)
        assert worst < 1e-12

    def test_spot_values(self):
        assert erfc(0.0) == 1.0
        assert abs(erfc(1.0) - 0.15729920705028513) < 1e-15
        assert abs(erfc(2.0) - 0.0046777349810472658) < 1e-17
        assert abs(erfc(6.0) - 2.1519736712498913e-17) / 2.15e-17 < 1e-12

    def test_negative_argument_reflection(self):
        assert abs(erfc(-1.0) - (2.0 - erfc(1.0))) < 1e-15

    @given(st.floats(min_value=0.0, max_value=6.0))
    @settings(max_examples=60, deadline=None)
    def test_relative_accuracy_property(self, x):
        expected = oracle_erfc(x)
        assert abs(erfc(x) - expected) <= 1e-12 * expected


class TestSnrToBer:
    def test_13db_operating_point(self):
        assert abs(snr_to_ber(19.95) - BER_AT_19_95) < 1e-12
        assert abs(snr_to_ber(19.95) - 0.0128) < 2e-4

    def test_zero_snr_is_pure_guessing(self):
        assert snr_to_ber(0.0) == 0.5

    def test_halved_13db(self):
        assert abs(snr_to_ber(9.977) - BER_AT_9_977) < 1e-12

    def test_accepts_snr_value(self):
        assert snr_to_ber(SnrValue(19.95)) == snr_to_ber(19.95)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            snr_to_ber(-1.0)

    def test_strictly_decreasing(self):
        grid = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 19.95, 40.0, 100.0]
        values = [snr_to_ber(s) for s in grid]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestBerToSnr:
    def test_half_maps_to_zero(self):
        assert ber_to_snr(0.5).linear == 0.0

    def test_inverse_of_oracle_point(self):
        assert abs(ber_to_snr(0.0128).linear - 19.95) < 0.05

    @given(st.floats(min_value=0.1, max_value=100.0))
    @settings(max_examples=60, deadline=None)
    def test_roundtrip(self, snr):
        back = ber_to_snr(snr_to_ber(snr)).linear
        assert abs(back - snr) <= 1e-8 * snr

    def test_rejects_out_of_range(self):
        for bad in (0.0, -0.1, 0.51, 1.0):
            with pytest.raises(ValueError):
                ber_to_snr(bad)

    def test_decreasing(self):
        assert ber_to_snr(0.01).linear > ber_to_snr(0.1).linear > ber_to_snr(0.4).linear


class TestSimultaneousSnr:
    def test_halving_at_unit_floors(self):
        for v_s in (0.5, 1.0, 19.95, 400.0):
            assert abs(simultaneous_snr(0.5, v_s, 1.0, 1.0).linear - 0.5 * v_s) < 1e-12

    def test_penalty_factor_at_10db_squeezing(self):
        full = 1.0 / 0.1
        factor = simultaneous_snr(0.5, 1.0, 0.1, 1.0).linear / full
        assert abs(factor - 0.1 / 1.1) < 1e-12
        assert abs(factor - 0.0909) < 2e-4

    def test_eta_one_recovers_full_snr(self):
        assert abs(simultaneous_snr(1.0, 19.95, 0.1).linear - 199.5) < 1e-9

    def test_eta_zero_kills_signal(self):
        assert simultaneous_snr(0.0, 19.95, 1.0).linear == 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            simultaneous_snr(1.2, 1.0, 1.0)
        with pytest.raises(ValueError):
            simultaneous_snr(0.5, -1.0, 1.0)
        with pytest.raises(ValueError):
            simultaneous_snr(0.5, 1.0, 0.0)
        with pytest.raises(ValueError):
            simultaneous_snr(0.5, 1.0, 1.0, 0.0)

    @given(
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=0.0, max_value=100.0),
        st.floats(min_value=0.05, max_value=10.0),
        st.floats(min_value=0.05, max_value=10.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotonicity(self, eta, v_s, v_n, v_m):
        base = simultaneous_snr(eta, v_s, v_n, v_m).linear
        assert simultaneous_snr(min(eta + 0.01, 1.0), v_s, v_n, v_m).linear >= base
        assert simultaneous_snr(eta, v_s + 1.0, v_n, v_m).linear >= base
        assert simultaneous_snr(eta, v_s, v_n, v_m + 0.5).linear <= base


class TestDecibels:
    def test_13db(self):
        assert abs(db_to_linear(13.0) - 19.9526231496888) < 1e-12

    def test_zero_db_is_unity(self):
        assert db_to_linear(0.0) == 1.0

    def test_10db_matches_squeezing_convention(self):
        assert abs(db_to_linear(10.0) - 10.0) < 1e-12
        assert abs(db_to_linear(-10.0) - 0.1) < 1e-15

    def test_roundtrip(self):
        for db in (-10.0, 0.0, 6.0, 13.0):
            assert abs(linear_to_db(db_to_linear(db)) - db) < 1e-12

    def test_log_of_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            linear_to_db(0.0)
        with pytest.raises(ValueError):
            linear_to_db(-2.0)

    def test_snr_value_wrapper(self):
        s = SnrValue.from_db(13.0)
        assert abs(s.db - 13.0) < 1e-12
        assert float(s) == s.linear
        with pytest.raises(ValueError):
            SnrValue(-1.0)
        with pytest.raises(ValueError):
            SnrValue(0.0).db
