import json
import math
import random
import struct

import pytest
from hypothesis import given, strategies as st

from chilsim.errors import FrameEncodeError, FrameParseError, UnsupportedFrameError
from chilsim.wire import (
    CTL_END,
    CTL_PAUSE,
    CommandFrame,
    ControlFrame,
    HelloFrame,
    MeasurementFrame,
    config_digest,
    decode_frame,
    encode_frame,
)

ZERO_MEAS_LINE = (
    b'{"type":"meas","seq":0,"t":0.0,"vp":0.0,"vs":0.0,"ip":0.0,"is":0.0,"relay":false}\n'
)


def any_double(rng):
    """Random finite double drawn from raw bit patterns."""
    while True:
        x = struct.unpack("<d", struct.pack("<Q", rng.getrandbits(64)))[0]
        if math.isfinite(x):
            return x


class TestEncode:
    def test_zero_measurement_frame_pinned_bytes(self):
        frame = MeasurementFrame(0, 0.0, 0.0, 0.0, 0.0, 0.0, False)
        assert encode_frame(frame) == ZERO_MEAS_LINE

    def test_event_field_appended_when_present(self):
        frame = MeasurementFrame(3, 0.1, 1.0, 2.0, 3.0, 4.0, True, event="relay_closed")
        line = encode_frame(frame)
        assert line.endswith(b'"relay":true,"event":"relay_closed"}\n')

    def test_nonfinite_rejected(self):
        frame = MeasurementFrame(0, float("inf"), 0.0, 0.0, 0.0, 0.0, False)
        with pytest.raises(FrameEncodeError):
            encode_frame(frame)

    def test_end_has_its_own_type_tag(self):
        line = encode_frame(ControlFrame(CTL_END, "bye"))
        assert json.loads(line)["type"] == "end"

    def test_duty_must_be_in_range(self):
        with pytest.raises(ValueError):
            CommandFrame(0, True, "CC", 0.0, 1.0)


class TestDecode:
    def test_round_trip_of_zero_frame(self):
        frame = decode_frame(ZERO_MEAS_LINE)
        assert isinstance(frame, MeasurementFrame)
        assert encode_frame(frame) == ZERO_MEAS_LINE

    def test_missing_seq_named(self):
        line = b'{"type":"meas","t":0.0,"vp":0.0,"vs":0.0,"ip":0.0,"is":0.0,"relay":false}\n'
        with pytest.raises(FrameParseError) as err:
            decode_frame(line)
        assert "seq" in str(err.value)

    def test_unknown_type_tag(self):
        with pytest.raises(UnsupportedFrameError):
            decode_frame(b'{"type":"mystery"}\n')

    def test_malformed_json_reports_offset(self):
        with pytest.raises(FrameParseError) as err:
            decode_frame(b'{"type":"meas",,}\n')
        assert err.value.offset > 0

    def test_json_nan_constant_rejected(self):
        line = b'{"type":"cmd","seq":1,"ready":true,"mode":"CC","top":NaN,"duty":0.1}\n'
        with pytest.raises(FrameParseError):
            decode_frame(line)

    def test_unknown_fields_ignored(self):
        line = b'{"type":"cmd","seq":1,"ready":true,"mode":"CC","top":0.1,"duty":0.2,"extra":42}\n'
        frame = decode_frame(line)
        assert frame.duty == 0.2

    def test_end_decodes_to_control_frame(self):
        frame = decode_frame(b'{"type":"end","detail":""}\n')
        assert isinstance(frame, ControlFrame) and frame.kind == CTL_END

    def test_ctl_round_trip(self):
        frame = ControlFrame(CTL_PAUSE, "demo")
        assert decode_frame(encode_frame(frame)) == frame

    def test_hello_round_trip(self):
        frame = HelloFrame(1, "plant", 1e-4, {"a": 1.5}, "ff" * 32)
        back = decode_frame(encode_frame(frame))
        assert back == frame

    def test_non_object_rejected(self):
        with pytest.raises(FrameParseError):
            decode_frame(b"[1,2,3]\n")


class TestBitExactRoundTrip:
    def test_duty_bit_identical(self):
        duty = 0.2698338156132157
        cmd = CommandFrame(7, True, "CC", 0.0216999999999998, duty)
        back = decode_frame(encode_frame(cmd))
        assert struct.pack("<d", back.duty) == struct.pack("<d", duty)

    def test_seeded_random_frames(self):
        rng = random.Random(0xC0FFEE)
        for _ in range(2000):
            meas = MeasurementFrame(
                seq=rng.randrange(0, 2**31),
                t_sim=abs(any_double(rng)),
                v_primary=any_double(rng),
                v_secondary=any_double(rng),
                i_primary=any_double(rng),
                i_secondary=any_double(rng),
                relay_closed=bool(rng.getrandbits(1)),
                event=rng.choice([None, "relay_closed", "v_ceiling", "i_cutoff"]),
            )
            assert decode_frame(encode_frame(meas)) == meas

    @given(
        st.integers(0, 2**31),
        st.floats(allow_nan=False, allow_infinity=False),
        st.floats(0.0, 0.999999),
        st.sampled_from(["PRECHARGE", "CC", "CV", "DONE"]),
    )
    def test_command_round_trip_property(self, seq, top, duty, mode):
        cmd = CommandFrame(seq, True, mode, top, duty)
        back = decode_frame(encode_frame(cmd))
        assert back == cmd
        assert struct.pack("<d", back.duty) == struct.pack("<d", cmd.duty)


class TestDigest:
    def test_digest_changes_with_content(self):
        a = {"dt_ctrl": 1e-4, "x": 1.0}
        b = {"dt_ctrl": 1e-4, "x": 1.0000000000000002}
        assert config_digest(a) != config_digest(b)
        assert config_digest(a) == config_digest({"dt_ctrl": 1e-4, "x": 1.0})
        assert len(config_digest(a)) == 64
