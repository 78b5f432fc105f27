import random

import pytest

from chilsim.errors import ChilsimError
from chilsim.runner import TraceRecord
from chilsim.traceio import CSV_HEADER, read_trace_csv, trace_to_csv_bytes, write_trace_csv


def test_empty_trace_is_header_only(tmp_path):
    path = tmp_path / "trace.csv"
    write_trace_csv([], path)
    assert path.read_bytes() == b"t,vp,vs,ip,is,soc,duty,mode,kp\n"


def test_two_known_records_pinned_bytes(tmp_path):
    trace = [
        TraceRecord(0.0, 300.0, 300.0, 0.0, 0.0, 0.5, 0.27, "PRECHARGE", 1.0),
        TraceRecord(1e-4, 299.75, 310.5, 1.0, 0.0, 0.5, 0.125, "PRECHARGE", 0.5),
    ]
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    assert path.read_bytes() == (
        b"t,vp,vs,ip,is,soc,duty,mode,kp\n"
        b"0.0,300.0,300.0,0.0,0.0,0.5,0.27,PRECHARGE,1.0\n"
        b"0.0001,299.75,310.5,1.0,0.0,0.5,0.125,PRECHARGE,0.5\n"
    )


def test_round_trip_reproduces_trace(tmp_path):
    rng = random.Random(7)
    trace = [
        TraceRecord(
            t=k * 1e-4 + rng.random() * 1e-9,
            vp=rng.uniform(250, 300),
            vs=rng.uniform(0, 450),
            ip=rng.uniform(0, 60),
            is_=rng.uniform(0, 60),
            soc=rng.random(),
            duty=rng.uniform(0, 0.95),
            mode=rng.choice(["PRECHARGE", "CC", "CV", "DONE"]),
            kp=rng.uniform(0, 1),
        )
        for k in range(200)
    ]
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    assert read_trace_csv(path) == trace
    # writing again produces identical bytes
    first = path.read_bytes()
    write_trace_csv(trace, path)
    assert path.read_bytes() == first


def test_header_mismatch_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,volts\n1,2\n")
    with pytest.raises(ChilsimError, match="header"):
        read_trace_csv(path)


def test_bad_row_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(CSV_HEADER + "\n1,2,3\n")
    with pytest.raises(ChilsimError, match="bad row"):
        read_trace_csv(path)


def test_unwritable_path_has_context():
    with pytest.raises(ChilsimError, match="cannot write"):
        write_trace_csv([], "/nonexistent-dir/trace.csv")
