"""Teleoperation server: the line protocol over TCP plus a WebSocket mirror.

Layout: two listener threads (raw TCP, and an HTTP listener that upgrades
`/bt` to a WebSocket) feed received lines into per-connection sessions; a
single simulation-loop thread consumes latched drive commands and pushes one
telemetry frame per tick while the active session is in controller mode.
Only one session may exist at a time; later connections are answered with
`ERR busy` and closed.  Command effects are serialized through a queue, so
sessions never touch simulation state directly.

The WebSocket side implements the small server subset needed here
(RFC 6455 handshake, unfragmented text frames, ping/pong, close); each
WebSocket message carries exactly one protocol line including its trailing
newline, byte-identical to the TCP stream.
"""

from __future__ import annotations

import base64
import hashlib
import queue
import socket
import struct
import threading
import time
from typing import Optional

from .protocol import (
    DEFAULT_KEYMAP,
    ERR_BUSY,
    KeyMap,
    SessionState,
    encode_telemetry,
    handle_line,
)
from .robot import RobotParams
from .teleop import TeleopSim
from .world import WorldScenario

DEFAULT_TCP_PORT = 7305
DEFAULT_HTTP_PORT = 8080
WS_PATH = "/bt"
_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class _Transport:
    """Common line-oriented send/receive interface for both carriers."""

    def send_line(self, line: str) -> None:
        raise NotImplementedError

    def recv_line(self) -> Optional[str]:
        """Next received line without its newline; None once disconnected."""
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError


class _TcpTransport(_Transport):
    def __init__(self, conn: socket.socket):
        self.conn = conn
        self._buffer = b""
        self._send_lock = threading.Lock()

    def send_line(self, line: str) -> None:
        data = (line + "\n").encode("utf-8")
        with self._send_lock:
            self.conn.sendall(data)

    def recv_line(self) -> Optional[str]:
        while b"\n" not in self._buffer:
            if len(self._buffer) > 65536:
                return None  # no sane frame is this long; drop the session
            try:
                chunk = self.conn.recv(4096)
            except OSError:
                return None
            if not chunk:
                return None
            self._buffer += chunk
        raw, _, self._buffer = self._buffer.partition(b"\n")
        return raw.rstrip(b"\r").decode("utf-8", errors="replace")

    def close(self) -> None:
        try:
            self.conn.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.conn.close()


class _WebSocketTransport(_Transport):
    """Server end of an already-upgraded WebSocket connection."""

    def __init__(self, conn: socket.socket, initial: bytes = b""):
        self.conn = conn
        self._buffer = initial
        self._send_lock = threading.Lock()

    def send_line(self, line: str) -> None:
        self._send_frame(0x1, (line + "\n").encode("utf-8"))

    def _send_frame(self, opcode: int, payload: bytes) -> None:
        header = bytes([0x80 | opcode])
        n = len(payload)
        if n < 126:
            header += bytes([n])
        elif n < 1 << 16:
            header += bytes([126]) + struct.pack(">H", n)
        else:
            header += bytes([127]) + struct.pack(">Q", n)
        with self._send_lock:
            self.conn.sendall(header + payload)

    def _read_exact(self, n: int) -> Optional[bytes]:
        while len(self._buffer) < n:
            try:
                chunk = self.conn.recv(4096)
            except OSError:
                return None
            if not chunk:
                return None
            self._buffer += chunk
        data, self._buffer = self._buffer[:n], self._buffer[n:]
        return data

    def recv_line(self) -> Optional[str]:
        while True:
            head = self._read_exact(2)
            if head is None:
                return None
            opcode = head[0] & 0x0F
            masked = bool(head[1] & 0x80)
            length = head[1] & 0x7F
            if length == 126:
                ext = self._read_exact(2)
                if ext is None:
                    return None
                length = struct.unpack(">H", ext)[0]
            elif length == 127:
                ext = self._read_exact(8)
                if ext is None:
                    return None
                length = struct.unpack(">Q", ext)[0]
            if length > 65536:
                return None  # no sane frame is this long; drop the session
            mask = self._read_exact(4) if masked else b"\x00" * 4
            if mask is None:
                return None
            payload = self._read_exact(length) if length else b""
            if payload is None:
                return None
            if masked:
                payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            if opcode == 0x8:  # close
                try:
                    self._send_frame(0x8, payload[:2])
                except OSError:
                    pass
                return None
            if opcode == 0x9:  # ping
                self._send_frame(0xA, payload)
                continue
            if opcode == 0x1:
                return payload.decode("utf-8", errors="replace").rstrip("\r\n")
            # binary/continuation frames are not part of this protocol
            continue

    def close(self) -> None:
        try:
            self._send_frame(0x8, struct.pack(">H", 1000))
        except OSError:
            pass
        try:
            self.conn.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.conn.close()


def _websocket_accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _upgrade_websocket(conn: socket.socket) -> Optional[_WebSocketTransport]:
    """Read the HTTP request; upgrade /bt, reject everything else."""
    conn.settimeout(5.0)
    data = b""
    while b"\r\n\r\n" not in data:
        chunk = conn.recv(4096)
        if not chunk:
            return None
        data += chunk
        if len(data) > 65536:
            return None
    raw_head, leftover = data.split(b"\r\n\r\n", 1)
    head = raw_head.decode("latin-1")
    lines = head.split("\r\n")
    request = lines[0].split(" ")
    headers = {}
    for line in lines[1:]:
        name, _, value = line.partition(":")
        headers[name.strip().lower()] = value.strip()
    if len(request) < 2 or request[0] != "GET" or request[1] != WS_PATH:
        conn.sendall(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\n\r\n")
        return None
    key = headers.get("sec-websocket-key")
    if headers.get("upgrade", "").lower() != "websocket" or not key:
        conn.sendall(b"HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\n\r\n")
        return None
    accept = _websocket_accept_key(key)
    conn.sendall(
        (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        ).encode("ascii")
    )
    conn.settimeout(None)
    return _WebSocketTransport(conn, initial=leftover)


class _Session:
    def __init__(self, transport: _Transport):
        self.transport = transport
        self.state = SessionState.UNPAIRED


class TeleopServer:
    """Runs the protocol listeners and the fixed-tick simulation loop."""

    def __init__(
        self,
        scenario: WorldScenario,
        *,
        tcp_port: int = DEFAULT_TCP_PORT,
        http_port: int = DEFAULT_HTTP_PORT,
        keymap: KeyMap = DEFAULT_KEYMAP,
        robot_params: Optional[RobotParams] = None,
        host: str = "127.0.0.1",
    ):
        keymap.validate()
        self.keymap = keymap
        self.host = host
        self.sim = TeleopSim(scenario, robot_params=robot_params)
        self._requested_ports = (tcp_port, http_port)
        self.tcp_port = tcp_port
        self.http_port = http_port
        self._commands: queue.Queue = queue.Queue()
        self._session: Optional[_Session] = None
        self._session_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._listeners: list[socket.socket] = []

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        tcp_port, http_port = self._requested_ports
        tcp_listener = socket.create_server((self.host, tcp_port))
        http_listener = socket.create_server((self.host, http_port))
        self.tcp_port = tcp_listener.getsockname()[1]
        self.http_port = http_listener.getsockname()[1]
        self._listeners = [tcp_listener, http_listener]
        self._threads = [
            threading.Thread(
                target=self._accept_loop, args=(tcp_listener, False), daemon=True
            ),
            threading.Thread(
                target=self._accept_loop, args=(http_listener, True), daemon=True
            ),
            threading.Thread(target=self._sim_loop, daemon=True),
        ]
        for t in self._threads:
            t.start()

    def stop(self) -> None:
        self._stop.set()
        for listener in self._listeners:
            try:
                listener.close()
            except OSError:
                pass
        with self._session_lock:
            if self._session is not None:
                self._session.transport.close()
                self._session = None
        for t in self._threads:
            t.join(timeout=2.0)

    def serve_forever(self) -> None:
        self.start()
        try:
            while not self._stop.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    # -- connection handling -------------------------------------------------

    def _accept_loop(self, listener: socket.socket, websocket: bool) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = listener.accept()
            except OSError:
                return
            threading.Thread(
                target=self._handle_connection, args=(conn, websocket), daemon=True
            ).start()

    def _handle_connection(self, conn: socket.socket, websocket: bool) -> None:
        if websocket:
            try:
                transport = _upgrade_websocket(conn)
            except OSError:
                transport = None
            if transport is None:
                conn.close()
                return
        else:
            transport = _TcpTransport(conn)

        with self._session_lock:
            if self._session is not None:
                busy = True
            else:
                busy = False
                session = _Session(transport)
                self._session = session
        if busy:
            try:
                transport.send_line(ERR_BUSY)
            except OSError:
                pass
            transport.close()
            return

        try:
            while not self._stop.is_set():
                line = transport.recv_line()
                if line is None:
                    break
                session.state, reply, command = handle_line(
                    session.state, line, self.keymap
                )
                try:
                    transport.send_line(reply)
                except OSError:
                    break
                if command is not None:
                    self._commands.put(command)
        finally:
            with self._session_lock:
                if self._session is session:
                    self._session = None
            transport.close()

    # -- simulation loop -----------------------------------------------------

    def _sim_loop(self) -> None:
        tick = self.sim.params.tick_s
        next_deadline = time.monotonic() + tick
        while not self._stop.is_set():
            delay = next_deadline - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            next_deadline += tick

            command = None
            while True:
                try:
                    command = self._commands.get_nowait()
                except queue.Empty:
                    break
            frame = self.sim.tick(command)

            with self._session_lock:
                session = self._session
            if session is not None and session.state is SessionState.CONTROLLER:
                try:
                    session.transport.send_line(encode_telemetry(frame))
                except OSError:
                    with self._session_lock:
                        if self._session is session:
                            self._session = None
                    session.transport.close()
