import pytest
from hypothesis import given, strategies as st

from chilsim.battery import (
    CellParams,
    PackConfig,
    PackState,
    coulomb_step,
    open_circuit_voltage,
    pack_terminal_voltage,
)

CELL = CellParams()
PACK = PackConfig()


class TestOpenCircuitVoltage:
    def test_full_charge_is_v_max(self):
        assert open_circuit_voltage(1.0, CELL) == 4.2

    def test_empty_is_v_cutoff(self):
        assert open_circuit_voltage(0.0, CELL) == 3.0

    def test_midpoint_matches_nominal(self):
        # the affine curve passes through the nominal voltage at 50%
        assert open_circuit_voltage(0.5, CELL) == pytest.approx(3.6, abs=1e-12)

    @pytest.mark.parametrize("soc", [-0.01, 1.01, 2.0])
    def test_domain_error(self, soc):
        with pytest.raises(ValueError):
            open_circuit_voltage(soc, CELL)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_monotone(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert open_circuit_voltage(lo, CELL) <= open_circuit_voltage(hi, CELL)
        if hi - lo > 1e-12:  # gaps below a ulp of the 3.0 base collapse
            assert open_circuit_voltage(lo, CELL) < open_circuit_voltage(hi, CELL)


class TestTerminalVoltage:
    def test_rest_at_half(self):
        assert pack_terminal_voltage(PackState(0.5), 0.0, CELL, PACK) == pytest.approx(
            345.6, abs=1e-9
        )

    def test_rest_at_ninety(self):
        assert pack_terminal_voltage(PackState(0.9), 0.0, CELL, PACK) == pytest.approx(
            391.68, abs=1e-9
        )

    def test_under_charge_current(self):
        v = pack_terminal_voltage(PackState(0.9), 23.0, CELL, PACK)
        assert v == pytest.approx(413.76, abs=1e-9)

    @given(st.floats(0.0, 1.0), st.floats(0.001, 100.0))
    def test_ordering_under_current(self, soc, i):
        rest = pack_terminal_voltage(PackState(soc), 0.0, CELL, PACK)
        loaded = pack_terminal_voltage(PackState(soc), i, CELL, PACK)
        assert loaded > rest
        assert rest == PACK.n_series * open_circuit_voltage(soc, CELL)

    def test_ocv_hook(self):
        flat = lambda soc, cell: 3.5
        v = pack_terminal_voltage(PackState(0.2), 0.0, CELL, PACK, ocv_fn=flat)
        assert v == pytest.approx(96 * 3.5)


class TestCoulombStep:
    def test_zero_current_is_identity(self):
        assert coulomb_step(PackState(0.5), 0.0, 123.0, CELL, PACK).soc == 0.5

    def test_one_c_for_one_hour_fills(self):
        out = coulomb_step(PackState(0.0), 2.7, 3600.0, CELL, PACK)
        assert out.soc == 1.0

    def test_clamped_at_full(self):
        assert coulomb_step(PackState(0.999), 23.0, 60.0, CELL, PACK).soc == 1.0

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            coulomb_step(PackState(0.5), 1.0, 0.0, CELL, PACK)

    @given(
        st.lists(st.floats(0.0, 30.0), min_size=1, max_size=50),
        st.floats(1e-6, 1.0),
    )
    def test_charge_conservation(self, currents, dt):
        # while soc stays strictly interior, the fixed-step sums must agree
        state = PackState(0.3)
        integral = 0.0
        for i in currents:
            nxt = coulomb_step(state, i, dt, CELL, PACK)
            if nxt.soc >= 1.0:
                break
            state = nxt
            integral += i * dt
        delta = (state.soc - 0.3) * 3600.0 * CELL.capacity_ah * PACK.n_parallel
        assert delta == pytest.approx(integral, rel=1e-9, abs=1e-9)


class TestValidation:
    def test_bad_cell_voltages(self):
        with pytest.raises(ValueError):
            CellParams(v_cutoff=4.0, v_nominal=3.6, v_max=4.2)

    def test_bad_pack_dims(self):
        with pytest.raises(ValueError):
            PackConfig(n_series=0)

    def test_bad_soc(self):
        with pytest.raises(ValueError):
            PackState(1.5)
