"""Self-contained SVG waveform plots, written directly (no plot library).

Output bytes are deterministic for a given trace: fixed layout, fixed
number formatting, no timestamps.
"""

from .errors import MetricsError, UsageError

VALID_SIGNALS = ("vp", "vs", "ip", "is", "soc", "duty", "kp")

_COLORS = {
    "vp": "#1f77b4",
    "vs": "#d62728",
    "ip": "#2ca02c",
    "is": "#ff7f0e",
    "soc": "#9467bd",
    "duty": "#8c564b",
    "kp": "#17becf",
}

_FIELD = {s: s for s in VALID_SIGNALS}
_FIELD["is"] = "is_"

WIDTH, HEIGHT = 900.0, 520.0
ML, MR, MT, MB = 70.0, 20.0, 40.0, 50.0


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _ticks(lo, hi, n=5):
    span = hi - lo
    return [lo + span * k / (n - 1) for k in range(n)]


def render_plot(trace, signals, path, ref_v=400.0, ref_i=23.0):
    """Render the selected signals against time into an SVG file."""
    if not signals:
        raise UsageError(f"no signals selected; valid names: {', '.join(VALID_SIGNALS)}")
    for s in signals:
        if s not in VALID_SIGNALS:
            raise UsageError(
                f"unknown signal {s!r}; valid names: {', '.join(VALID_SIGNALS)}"
            )
    if not trace:
        raise MetricsError("no samples")

    t0, t1 = trace[0].t, trace[-1].t
    if t1 <= t0:
        t1 = t0 + 1.0
    values = []
    for s in signals:
        values.extend(getattr(r, _FIELD[s]) for r in trace)
    ymin = min(values + [0.0])
    ymax = max(values + [ref_v, ref_i])
    if ymax <= ymin:
        ymax = ymin + 1.0
    pad = 0.05 * (ymax - ymin)
    ymin -= pad
    ymax += pad

    pw = WIDTH - ML - MR
    ph = HEIGHT - MT - MB

    def sx(t):
        return ML + (t - t0) / (t1 - t0) * pw

    def sy(v):
        return MT + (ymax - v) / (ymax - ymin) * ph

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" '
        f'height="{HEIGHT:.0f}" viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">'
    )
    out.append(f'<rect width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="white"/>')
    out.append(
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{" ".join(signals)} vs time</text>'
    )
    # axes
    out.append(
        f'<rect x="{_fmt(ML)}" y="{_fmt(MT)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    for tt in _ticks(t0, t1):
        x = sx(tt)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(MT + ph)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(MT + ph + 5)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{_fmt(MT + ph + 20)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tt:.6g}</text>'
        )
    for vv in _ticks(ymin, ymax):
        y = sy(vv)
        out.append(
            f'<line x1="{_fmt(ML - 5)}" y1="{_fmt(y)}" x2="{_fmt(ML)}" '
            f'y2="{_fmt(y)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(ML - 8)}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{vv:.6g}</text>'
        )
    out.append(
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 8:.0f}" text-anchor="middle" '
        'font-family="sans-serif" font-size="13">time [s]</text>'
    )
    out.append(
        f'<text x="16" y="{HEIGHT / 2:.0f}" text-anchor="middle" '
        'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {HEIGHT / 2:.0f})">value</text>'
    )
    # reference lines
    for ref, label in ((ref_v, f"{ref_v:.6g} V"), (ref_i, f"{ref_i:.6g} A")):
        if ymin <= ref <= ymax:
            y = sy(ref)
            out.append(
                f'<line x1="{_fmt(ML)}" y1="{_fmt(y)}" x2="{_fmt(ML + pw)}" '
                f'y2="{_fmt(y)}" stroke="gray" stroke-dasharray="6 3"/>'
            )
            out.append(
                f'<text x="{_fmt(ML + pw - 4)}" y="{_fmt(y - 4)}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11" fill="gray">{label}</text>'
            )
    # mode transition markers
    prev_mode = None
    for r in trace:
        if r.mode != prev_mode:
            if prev_mode is not None:
                x = sx(r.t)
                out.append(
                    f'<line x1="{_fmt(x)}" y1="{_fmt(MT)}" x2="{_fmt(x)}" '
                    f'y2="{_fmt(MT + ph)}" stroke="#999999" stroke-dasharray="2 4"/>'
                )
                out.append(
                    f'<text x="{_fmt(x + 3)}" y="{_fmt(MT + 14)}" '
                    f'font-family="sans-serif" font-size="11" fill="#666666">{r.mode}</text>'
                )
            prev_mode = r.mode
    # one polyline per signal
    for s in signals:
        pts = " ".join(
            f"{_fmt(sx(r.t))},{_fmt(sy(getattr(r, _FIELD[s])))}" for r in trace
        )
        out.append(
            f'<polyline fill="none" stroke="{_COLORS[s]}" stroke-width="1.5" '
            f'points="{pts}"/>'
        )
        idx = signals.index(s)
        out.append(
            f'<text x="{_fmt(ML + 10 + 70 * idx)}" y="{_fmt(MT - 8)}" '
            f'font-family="sans-serif" font-size="12" fill="{_COLORS[s]}">{s}</text>'
        )
    out.append("</svg>")
    data = ("\n".join(out) + "\n").encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(data)
    return path
