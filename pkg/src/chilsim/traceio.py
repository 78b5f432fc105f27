"""Trace CSV serialization.

Header t,vp,vs,ip,is,soc,duty,mode,kp then one row per record.  Numbers
are shortest round-trip decimals, so write followed by read reproduces the
trace exactly and the file bytes are deterministic for a given trace.
"""

from .errors import ChilsimError
from .runner import TraceRecord

CSV_HEADER = "t,vp,vs,ip,is,soc,duty,mode,kp"


def trace_to_csv_bytes(trace) -> bytes:
    lines = [CSV_HEADER]
    for r in trace:
        lines.append(
            f"{r.t!r},{r.vp!r},{r.vs!r},{r.ip!r},{r.is_!r},"
            f"{r.soc!r},{r.duty!r},{r.mode},{r.kp!r}"
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_trace_csv(trace, path):
    """Write the trace; byte-deterministic for a given trace."""
    data = trace_to_csv_bytes(trace)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise ChilsimError(f"cannot write trace to {path}: {exc}") from exc
    return path


def read_trace_csv(path):
    """Parse a trace CSV back into TraceRecord objects."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise ChilsimError(f"cannot read trace from {path}: {exc}") from exc
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ChilsimError(f"{path}: missing or unexpected header")
    trace = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 9:
            raise ChilsimError(f"{path}: bad row {ln!r}")
        trace.append(
            TraceRecord(
                t=float(parts[0]),
                vp=float(parts[1]),
                vs=float(parts[2]),
                ip=float(parts[3]),
                is_=float(parts[4]),
                soc=float(parts[5]),
                duty=float(parts[6]),
                mode=parts[7],
                kp=float(parts[8]),
            )
        )
    return trace
