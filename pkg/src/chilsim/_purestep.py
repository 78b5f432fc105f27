"""Pure-Python plant-stepping kernel.

Fallback for the compiled extension in _stepcore.pyx.  The two must stay
arithmetically identical, expression for expression: runs selected through
either kernel produce bit-identical trajectories, and the parity test
suite holds them to that.

One call advances the plant by up to n_steps RK4 substeps with the duty
held constant, coupling the battery algebraically through the pack
resistance each substep and coulomb-counting the SoC, and stops early when
a mode-relevant threshold crossing asks for an immediate exchange.

Event codes: 0 none, 1 output voltage rose through the CV ceiling (CC
mode), 2 pack current fell through the termination threshold (CV mode).
"""

import math

from .errors import SimulationDiverged

KERNEL_NAME = "pure-python"

EVENT_NONE = 0
EVENT_V_RISE = 1
EVENT_I_FALL = 2

MODE_PRECHARGE = 0
MODE_CC = 1
MODE_CV = 2
MODE_DONE = 3


def step_block(
    i_l,
    v_out,
    t,
    soc,
    duty,
    dt,
    n_steps,
    relay,
    v_source,
    r_internal,
    inductance,
    capacitance,
    n_series,
    v_cutoff,
    ocv_span,
    r_pack,
    cap_denom,
    mode,
    v_ceiling,
    i_cutoff,
    step_base,
):
    """Run up to n_steps substeps; returns (i_l, v_out, t, soc, steps, event)."""
    omd = 1.0 - duty
    prev_v = v_out
    if relay:
        ocv_pack = n_series * (v_cutoff + ocv_span * soc)
        prev_il = (v_out - ocv_pack) / r_pack
        if prev_il < 0.0:
            prev_il = 0.0
    else:
        prev_il = 0.0
    k = 0
    event = EVENT_NONE
    while k < n_steps:
        if relay:
            ocv_pack = n_series * (v_cutoff + ocv_span * soc)
            il = (v_out - ocv_pack) / r_pack
            if il < 0.0:
                il = 0.0
        else:
            il = 0.0

        i0 = i_l
        v0 = v_out
        k1i = (v_source - r_internal * i0 - omd * v0) / inductance
        k1v = (omd * i0 - il) / capacitance
        i1 = i0 + 0.5 * dt * k1i
        v1 = v0 + 0.5 * dt * k1v
        k2i = (v_source - r_internal * i1 - omd * v1) / inductance
        k2v = (omd * i1 - il) / capacitance
        i2 = i0 + 0.5 * dt * k2i
        v2 = v0 + 0.5 * dt * k2v
        k3i = (v_source - r_internal * i2 - omd * v2) / inductance
        k3v = (omd * i2 - il) / capacitance
        i3 = i0 + dt * k3i
        v3 = v0 + dt * k3v
        k4i = (v_source - r_internal * i3 - omd * v3) / inductance
        k4v = (omd * i3 - il) / capacitance
        i_new = i0 + dt * (k1i + 2.0 * k2i + 2.0 * k3i + k4i) / 6.0
        v_new = v0 + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0

        if not (math.isfinite(i_new) and math.isfinite(v_new)):
            raise SimulationDiverged(step_base + k, "dt too large for the chosen L, C")
        if i_new < 0.0:
            i_new = 0.0
        i_l = i_new
        v_out = v_new
        t = t + dt
        soc = soc + il * dt / cap_denom
        if soc < 0.0:
            soc = 0.0
        elif soc > 1.0:
            soc = 1.0
        k += 1

        if mode == MODE_CC and prev_v < v_ceiling and v_out >= v_ceiling:
            event = EVENT_V_RISE
            break
        if mode == MODE_CV and relay:
            ocv_pack = n_series * (v_cutoff + ocv_span * soc)
            il_post = (v_out - ocv_pack) / r_pack
            if il_post < 0.0:
                il_post = 0.0
            if prev_il > i_cutoff and il_post <= i_cutoff:
                event = EVENT_I_FALL
                break
            prev_il = il_post
        prev_v = v_out
    return i_l, v_out, t, soc, k, event
