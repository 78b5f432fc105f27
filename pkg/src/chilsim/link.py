"""Lockstep link endpoints and transports.

Both endpoints are single-threaded blocking loops.  The plant side sends a
measurement and blocks for the matching command; any number of PAUSE
control frames may arrive in between and only extend the deadline (pause
transparency: wall-clock delays never change simulation results).  The
controller side answers every measurement with exactly one command.

Transports: an in-process queue pair and TCP (plant listens, controller
connects).  Framing is one newline-terminated record per direction.
"""

import queue
import socket
import threading
import time

from .errors import (
    ConfigError,
    FrameParseError,
    HandshakeError,
    PeerTimeoutError,
    ProtocolOrderError,
    RemoteFailureError,
)
from .wire import (
    CTL_END,
    CTL_ERROR,
    CTL_PAUSE,
    CTL_READY,
    CTL_RESUME,
    PROTOCOL_VERSION,
    CommandFrame,
    ControlFrame,
    HelloFrame,
    MeasurementFrame,
    config_digest,
    decode_frame,
    encode_frame,
)

PHASE_HANDSHAKE = "HANDSHAKE"
PHASE_RUNNING = "RUNNING"
PHASE_PAUSED_LOCAL = "PAUSED_LOCAL"
PHASE_PAUSED_REMOTE = "PAUSED_REMOTE"
PHASE_ENDED = "ENDED"

_LEGAL_TRANSITIONS = {
    PHASE_HANDSHAKE: {PHASE_RUNNING, PHASE_ENDED},
    PHASE_RUNNING: {PHASE_PAUSED_LOCAL, PHASE_PAUSED_REMOTE, PHASE_ENDED},
    PHASE_PAUSED_LOCAL: {PHASE_RUNNING, PHASE_ENDED},
    PHASE_PAUSED_REMOTE: {PHASE_RUNNING, PHASE_ENDED},
    PHASE_ENDED: set(),
}


class LinkState:
    """Phase machine plus the strictly increasing sequence counter."""

    def __init__(self, response_timeout=2.0):
        self.phase = PHASE_HANDSHAKE
        self.next_seq = 0
        self.response_timeout = response_timeout
        self.phase_history = [PHASE_HANDSHAKE]

    def transition(self, new_phase):
        if new_phase == self.phase:
            return
        if new_phase not in _LEGAL_TRANSITIONS[self.phase]:
            raise ProtocolOrderError(f"illegal phase change {self.phase} -> {new_phase}")
        self.phase = new_phase
        self.phase_history.append(new_phase)


class InprocTransport:
    """One endpoint of an in-process duplex channel built on two queues."""

    _EOF = object()

    def __init__(self, inbox, outbox):
        self._inbox = inbox
        self._outbox = outbox
        self._closed = False

    @classmethod
    def pair(cls):
        a_to_b = queue.Queue()
        b_to_a = queue.Queue()
        return cls(b_to_a, a_to_b), cls(a_to_b, b_to_a)

    def send_line(self, data: bytes):
        if self._closed:
            raise BrokenPipeError("transport closed")
        self._outbox.put(data)

    def recv_line(self, timeout):
        try:
            item = self._inbox.get(timeout=timeout)
        except queue.Empty:
            raise PeerTimeoutError(f"no frame within {timeout} s") from None
        if item is self._EOF:
            return None
        return item

    def close(self):
        if not self._closed:
            self._closed = True
            self._outbox.put(self._EOF)


class TcpTransport:
    """Line-framed transport over a connected TCP socket."""

    def __init__(self, sock):
        self._sock = sock
        self._buffer = b""
        self._eof = False

    @classmethod
    def connect(cls, host, port, timeout=5.0):
        sock = socket.create_connection((host, port), timeout=timeout)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        return cls(sock)

    def send_line(self, data: bytes):
        self._sock.sendall(data)

    def recv_line(self, timeout):
        deadline = time.monotonic() + timeout
        while b"\n" not in self._buffer:
            if self._eof:
                if self._buffer:
                    data = self._buffer
                    self._buffer = b""
                    raise FrameParseError(
                        "stream ended mid-line (missing newline)", offset=len(data)
                    )
                return None
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise PeerTimeoutError(f"no frame within {timeout} s")
            self._sock.settimeout(remaining)
            try:
                chunk = self._sock.recv(65536)
            except socket.timeout:
                raise PeerTimeoutError(f"no frame within {timeout} s") from None
            if chunk == b"":
                self._eof = True
            else:
                self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line + b"\n"

    def close(self):
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


def should_exchange(step_index: int, tick_ratio: int, event=None) -> bool:
    """True on the controller-tick grid or when an event forces a frame."""
    if not isinstance(tick_ratio, int) or isinstance(tick_ratio, bool) or tick_ratio < 1:
        raise ConfigError(f"tick ratio must be a positive integer, got {tick_ratio!r}")
    return step_index % tick_ratio == 0 or event is not None


class PlantLink:
    """Plant-side endpoint: owns the sequence counter and the session."""

    def __init__(self, transport, response_timeout=2.0):
        self.transport = transport
        self.state = LinkState(response_timeout)

    def _fail(self, exc):
        try:
            self.transport.send_line(encode_frame(ControlFrame(CTL_ERROR, str(exc))))
        except Exception:
            pass
        self.state.transition(PHASE_ENDED)
        raise exc

    def _recv_frame(self, timeout):
        line = self.transport.recv_line(timeout)
        if line is None:
            self._fail(RemoteFailureError("peer closed the link"))
        try:
            return decode_frame(line)
        except FrameParseError as exc:
            self._fail(exc)

    def handshake(self, dt_ctrl, config_obj, digest):
        """Send the parameter-carrying hello, check the echo, await READY."""
        hello = HelloFrame(PROTOCOL_VERSION, "plant", dt_ctrl, config_obj, digest)
        self.transport.send_line(encode_frame(hello))
        reply = self._recv_frame(self.state.response_timeout)
        if isinstance(reply, ControlFrame) and reply.kind == CTL_ERROR:
            self._fail(HandshakeError(f"peer refused session: {reply.detail}"))
        if not isinstance(reply, HelloFrame):
            self._fail(HandshakeError(f"expected hello, got {type(reply).__name__}"))
        if reply.version != PROTOCOL_VERSION:
            self._fail(HandshakeError(f"protocol version {reply.version} != {PROTOCOL_VERSION}"))
        if reply.role != "controller":
            self._fail(HandshakeError(f"expected controller role, got {reply.role!r}"))
        if reply.digest != digest:
            self._fail(HandshakeError("peer echoed a different config digest"))
        ready = self._recv_frame(self.state.response_timeout)
        if not (isinstance(ready, ControlFrame) and ready.kind == CTL_READY):
            self._fail(HandshakeError("expected READY after hello"))
        self.state.transition(PHASE_RUNNING)

    def exchange(self, meas: MeasurementFrame) -> CommandFrame:
        """One lockstep exchange: send meas, block for the echoing command."""
        if self.state.phase != PHASE_RUNNING:
            raise ProtocolOrderError(f"exchange in phase {self.state.phase}")
        if meas.seq != self.state.next_seq:
            raise ProtocolOrderError(
                f"measurement seq {meas.seq} != next_seq {self.state.next_seq}"
            )
        self.transport.send_line(encode_frame(meas))
        while True:
            frame = self._recv_frame(self.state.response_timeout)
            if isinstance(frame, CommandFrame):
                if self.state.phase == PHASE_PAUSED_REMOTE:
                    self.state.transition(PHASE_RUNNING)
                if frame.seq != meas.seq:
                    self._fail(
                        ProtocolOrderError(f"command seq {frame.seq} != sent seq {meas.seq}")
                    )
                self.state.next_seq += 1
                return frame
            if isinstance(frame, ControlFrame):
                if frame.kind == CTL_PAUSE:
                    self.state.transition(PHASE_PAUSED_REMOTE)
                    continue
                if frame.kind == CTL_RESUME:
                    self.state.transition(PHASE_RUNNING)
                    continue
                if frame.kind == CTL_READY:
                    continue
                if frame.kind == CTL_ERROR:
                    self.state.transition(PHASE_ENDED)
                    raise RemoteFailureError(frame.detail)
                if frame.kind == CTL_END:
                    self.state.transition(PHASE_ENDED)
                    raise RemoteFailureError("peer ended session mid-exchange")
            else:
                self._fail(ProtocolOrderError(f"unexpected {type(frame).__name__} inbound"))

    def end(self):
        """Terminate the session cleanly."""
        if self.state.phase != PHASE_ENDED:
            try:
                self.transport.send_line(encode_frame(ControlFrame(CTL_END)))
            finally:
                self.state.transition(PHASE_ENDED)
        self.transport.close()


def lockstep_exchange(link: PlantLink, meas: MeasurementFrame):
    """Functional form of PlantLink.exchange; returns (command, link state)."""
    cmd = link.exchange(meas)
    return cmd, link.state


class ControllerServer:
    """Controller-side endpoint: answers measurements until END.

    tick_factory(hello) must return a callable meas -> cmd; it runs after a
    successful handshake so the tick can be built from the hello-carried
    parameters.  pause_demo > 0 emits that many PAUSE heartbeats (plus the
    closing RESUME) before every reply without touching any computed value;
    heartbeats are also emitted while a slow tick is still computing.
    """

    def __init__(
        self,
        transport,
        tick_factory,
        response_timeout=2.0,
        pause_threshold=0.5,
        pause_demo=0,
        expect_digest=None,
    ):
        self.transport = transport
        self.tick_factory = tick_factory
        self.state = LinkState(response_timeout)
        self.pause_threshold = pause_threshold
        self.pause_demo = pause_demo
        self.expect_digest = expect_digest
        self._write_lock = threading.Lock()

    def _send(self, frame):
        with self._write_lock:
            self.transport.send_line(encode_frame(frame))

    def _refuse(self, exc):
        try:
            self._send(ControlFrame(CTL_ERROR, str(exc)))
        except Exception:
            pass
        self.state.transition(PHASE_ENDED)
        raise exc

    def handshake(self) -> HelloFrame:
        line = self.transport.recv_line(self.state.response_timeout)
        if line is None:
            self._refuse(HandshakeError("peer closed before hello"))
        try:
            hello = decode_frame(line)
        except FrameParseError as exc:
            self._refuse(exc)
        if not isinstance(hello, HelloFrame):
            self._refuse(HandshakeError(f"expected hello, got {type(hello).__name__}"))
        if hello.version != PROTOCOL_VERSION:
            self._refuse(
                HandshakeError(f"protocol version {hello.version} != {PROTOCOL_VERSION}")
            )
        if hello.role != "plant":
            self._refuse(HandshakeError(f"expected plant role, got {hello.role!r}"))
        if hello.config is None:
            self._refuse(HandshakeError("plant hello carries no config"))
        if self.expect_digest is not None and hello.digest != self.expect_digest:
            self._refuse(HandshakeError("config digest does not match the expected one"))
        self._send(HelloFrame(PROTOCOL_VERSION, "controller", hello.dt_ctrl, None, hello.digest))
        self._send(ControlFrame(CTL_READY))
        self.state.transition(PHASE_RUNNING)
        return hello

    def _reply(self, tick, meas):
        paused = self.pause_demo > 0
        for _ in range(self.pause_demo):
            self._send(ControlFrame(CTL_PAUSE, "demo"))
        done = threading.Event()
        beats = []

        def heartbeat():
            while not done.wait(self.pause_threshold):
                with self._write_lock:
                    if done.is_set():
                        return
                    self.transport.send_line(
                        encode_frame(ControlFrame(CTL_PAUSE, "computing"))
                    )
                    beats.append(1)

        beater = threading.Thread(target=heartbeat, daemon=True)
        beater.start()
        try:
            cmd = tick(meas)
        finally:
            done.set()
        beater.join()
        if paused or beats:
            self._send(ControlFrame(CTL_RESUME))
        self._send(cmd)

    def serve(self):
        """Run the session loop; returns the number of exchanges served."""
        hello = self.handshake()
        tick = self.tick_factory(hello)
        served = 0
        while True:
            line = self.transport.recv_line(self.state.response_timeout)
            if line is None:
                self._refuse(RemoteFailureError("peer closed without END"))
            try:
                frame = decode_frame(line)
            except FrameParseError as exc:
                self._refuse(exc)
            if isinstance(frame, MeasurementFrame):
                if frame.seq != self.state.next_seq:
                    self._refuse(
                        ProtocolOrderError(
                            f"measurement seq {frame.seq} != next_seq {self.state.next_seq}"
                        )
                    )
                self._reply(tick, frame)
                self.state.next_seq += 1
                served += 1
                continue
            if isinstance(frame, ControlFrame):
                if frame.kind == CTL_END:
                    self.state.transition(PHASE_ENDED)
                    self.transport.close()
                    return served
                if frame.kind == CTL_PAUSE:
                    self.state.transition(PHASE_PAUSED_REMOTE)
                    continue
                if frame.kind == CTL_RESUME:
                    self.state.transition(PHASE_RUNNING)
                    continue
                if frame.kind == CTL_ERROR:
                    self.state.transition(PHASE_ENDED)
                    raise RemoteFailureError(frame.detail)
                continue
            self._refuse(ProtocolOrderError(f"unexpected {type(frame).__name__} inbound"))


def serve_controller(transport, tick_factory, **kwargs):
    """Run a ControllerServer to completion (functional form)."""
    return ControllerServer(transport, tick_factory, **kwargs).serve()


def open_plant_listener(host, port):
    """Bind the plant-side listening socket; returns the server socket."""
    srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    srv.bind((host, port))
    srv.listen(1)
    return srv


def accept_plant_connection(srv, timeout=30.0):
    """Accept one controller connection on the listening socket."""
    srv.settimeout(timeout)
    try:
        conn, _ = srv.accept()
    except socket.timeout:
        raise PeerTimeoutError("no controller connected") from None
    conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return TcpTransport(conn)
