"""Trace metrics: overshoot, settling, stabilization, steady-state error.

Settling-style metrics return the +infinity sentinel (never an error) when
the signal does not stay inside the band; overshoot measures the peak
after the first crossing of the reference.
"""

import math
from dataclasses import dataclass, field

from .errors import MetricsError


@dataclass(frozen=True)
class MetricsReport:
    overshoot_pct: float
    settling_time: float
    stabilization_time: float
    steady_state_error: float
    peak_value: float
    mode_transition_times: dict = field(default_factory=dict)

    def lines(self):
        out = [
            f"overshoot_pct={self.overshoot_pct!r}",
            f"settling_time={self.settling_time!r}",
            f"stabilization_time={self.stabilization_time!r}",
            f"steady_state_error={self.steady_state_error!r}",
            f"peak_value={self.peak_value!r}",
        ]
        for mode, t in self.mode_transition_times.items():
            out.append(f"transition_{mode}={t!r}")
        return out


def _signal(trace, selector):
    if callable(selector):
        return [selector(r) for r in trace]
    return [getattr(r, selector) for r in trace]


def compute_overshoot(trace, reference, selector="vs") -> float:
    """Percent peak excess over the reference, after the first crossing."""
    if not trace:
        raise MetricsError("no samples")
    values = _signal(trace, selector)
    crossing = None
    for idx, v in enumerate(values):
        if v >= reference:
            crossing = idx
            break
    if crossing is None:
        return 0.0
    peak = max(values[crossing:])
    over = peak - reference
    if over < 0.0:
        over = 0.0
    return 100.0 * over / reference


def compute_settling_time(
    trace, reference, band_fraction=0.02, from_event=0.0, selector="vs"
) -> float:
    """Seconds after from_event until the signal stays within the band.

    The band is +-band_fraction*reference around the reference; the signal
    must remain inside it for the rest of the trace.  Returns math.inf when
    it never does.
    """
    if not trace:
        raise MetricsError("no samples")
    tol = band_fraction * abs(reference)
    last_violation = None
    for idx, rec in enumerate(trace):
        if rec.t < from_event:
            continue
        v = _signal([rec], selector)[0]
        if abs(v - reference) > tol:
            last_violation = idx
    if last_violation is None:
        return 0.0
    if last_violation == len(trace) - 1:
        return math.inf
    return trace[last_violation + 1].t - from_event


def compute_stabilization_time(trace, reference, band_fraction=0.02, selector="vs"):
    """Settling measured from t = 0 (startup regulation)."""
    return compute_settling_time(trace, reference, band_fraction, 0.0, selector)


def mode_transition_times(trace) -> dict:
    """First trace time at which each mode appears, in order of appearance."""
    seen = {}
    for rec in trace:
        if rec.mode not in seen:
            seen[rec.mode] = rec.t
    return seen


def compute_metrics(trace, ref_v, ref_i, band_fraction=0.02) -> MetricsReport:
    """Standard report for a charging trace.

    Voltage overshoot and peak are over the whole trace; stabilization is
    the startup regulation of the output voltage over the precharge segment
    (up to relay closure); settling is the pack current reaching its band
    after the first non-precharge sample.
    """
    if not trace:
        raise MetricsError("no samples")
    transitions = mode_transition_times(trace)
    pre = [r for r in trace if r.mode == "PRECHARGE"]
    if pre:
        stabilization = compute_stabilization_time(pre, ref_v, band_fraction, "vs")
    else:
        stabilization = 0.0
    closure_t = None
    for mode in ("CC", "CV", "DONE"):
        if mode in transitions:
            closure_t = transitions[mode]
            break
    if closure_t is None:
        settling = math.inf
    else:
        settling = compute_settling_time(trace, ref_i, band_fraction, closure_t, "is_")
    final_mode = trace[-1].mode
    tail = trace[max(0, len(trace) - max(1, len(trace) // 10)) :]
    if final_mode == "CC":
        sse = sum(r.is_ for r in tail) / len(tail) - ref_i
    else:
        sse = sum(r.vs for r in tail) / len(tail) - ref_v
    return MetricsReport(
        overshoot_pct=compute_overshoot(trace, ref_v, "vs"),
        settling_time=settling,
        stabilization_time=stabilization,
        steady_state_error=sse,
        peak_value=max(r.vs for r in trace),
        mode_transition_times=transitions,
    )
