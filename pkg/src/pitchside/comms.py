"""The say/hear message fabric.

All 22 agents share one low-bandwidth, unreliable channel: an agent may say
at most once per decision period, payloads are capped at 20 bytes, each
listener hears at most one message per cycle, and a listener may name a
priority teammate whose messages win delivery.  Non-priority delivery picks
the candidate with the lowest (enqueue order, sender id) so replays are
deterministic.

The wire codec packs typed messages into little-endian frames::

    kind:u8 | sender:u8 | cycle:u32 | payload (<= 14 bytes)

so a full frame never exceeds 20 bytes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

MAX_PAYLOAD = 20
MAX_WIRE_BODY = 14

KINDS = ("setplayStep", "ballInfo", "tacticSwitch", "custom")
_KIND_IDS = {k: i + 1 for i, k in enumerate(KINDS)}
_ID_KINDS = {i: k for k, i in _KIND_IDS.items()}

# Sentinel step ids used by the setplay executor's announcements.
STEP_FINISH = 255
STEP_ABORT = 254


class MessageTooLongError(ValueError):
    pass


class RateLimitError(ValueError):
    pass


class EncodeError(ValueError):
    pass


class DecodeError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


@dataclass(frozen=True)
class TeamMessage:
    sender: str  # agent id, e.g. 'L7'
    cycle: int
    kind: str
    payload: bytes = b""


@dataclass
class ChannelConfig:
    range: float = 50.0
    drop_probability: float = 0.05
    priority_teammate: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError("drop_probability must lie in [0, 1]")


@dataclass
class _Pending:
    message: TeamMessage
    sender_pos: tuple[float, float]
    order: int


class Channel:
    """Owned by the match loop; mutated only between world steps."""

    def __init__(self, config: ChannelConfig | None = None):
        self.config = config or ChannelConfig()
        self._pending: list[_Pending] = []
        self._said: set[str] = set()
        self._period: int | None = None
        self._order = 0

    def begin_period(self, period: int) -> None:
        if period != self._period:
            self._period = period
            self._said = set()

    def enqueue_say(self, message: TeamMessage, sender_pos: tuple[float, float]) -> None:
        if len(message.payload) > MAX_PAYLOAD:
            raise MessageTooLongError(
                f"payload is {len(message.payload)} bytes; limit is {MAX_PAYLOAD}"
            )
        if message.sender in self._said:
            raise RateLimitError(f"{message.sender} already spoke this period")
        self._said.add(message.sender)
        self._pending.append(_Pending(message, sender_pos, self._order))
        self._order += 1

    def set_priority(self, listener: str, teammate: str | None) -> None:
        if teammate is None:
            self.config.priority_teammate.pop(listener, None)
        else:
            self.config.priority_teammate[listener] = teammate

    def deliver_heard(self, positions: dict[str, tuple[float, float]], cycle: int, rng) -> dict[str, TeamMessage]:
        """Deliver queued says: at most one heard message per listener.

        ``positions`` maps on-pitch agent ids to positions; listeners are its
        keys in sorted order (deterministic rng consumption).
        """
        delivered: dict[str, TeamMessage] = {}
        if not self._pending:
            return delivered
        pending = self._pending
        self._pending = []
        drop = self.config.drop_probability
        rng_needed = drop > 0.0
        for listener in sorted(positions):
            lpos = positions[listener]
            candidates = []
            for p in pending:
                if p.message.sender == listener:
                    continue
                dx = p.sender_pos[0] - lpos[0]
                dy = p.sender_pos[1] - lpos[1]
                if math.hypot(dx, dy) > self.config.range:
                    continue
                if rng_needed and rng.random() < drop:
                    continue
                candidates.append(p)
            if not candidates:
                continue
            priority = self.config.priority_teammate.get(listener)
            chosen = None
            if priority is not None:
                for p in candidates:
                    if p.message.sender == priority:
                        chosen = p
                        break
            if chosen is None:
                chosen = min(candidates, key=lambda p: (p.order, p.message.sender))
            delivered[listener] = chosen.message
        return delivered


# --- wire codec ---------------------------------------------------------

def _sender_byte(agent_id: str) -> int:
    team, num = agent_id[0], int(agent_id[1:])
    if team not in "LR" or not 1 <= num <= 11:
        raise EncodeError(f"bad agent id {agent_id!r}")
    return (16 if team == "R" else 0) | num


def _sender_id(byte: int, offset: int) -> str:
    team = "R" if byte & 16 else "L"
    num = byte & 15
    if not 1 <= num <= 11:
        raise DecodeError(f"bad sender byte {byte:#x}", offset)
    return f"{team}{num}"


QUANTUM = 0.1  # meters per grid step for positions in messages


def _quantize(value: float, offset_hint: str) -> int:
    q = round(value / QUANTUM)
    if not -32768 <= q <= 32767:
        raise EncodeError(f"{offset_hint} {value} does not fit the wire grid")
    return q


def encode_message(kind: str, fields: dict) -> bytes:
    """Full wire frame for a typed message.

    fields must include 'sender' and 'cycle' plus the kind-specific body:
      setplayStep: setplay_id, step_id, participants (bitmask of nums 1..11)
      ballInfo:    x, y, vx, vy (quantized to the 0.1 m grid)
      tacticSwitch: tactic_index
      custom:      data (raw bytes, <= 14)
    """
    if kind not in _KIND_IDS:
        raise EncodeError(f"unknown message kind {kind!r}")
    header = struct.pack(
        "<BBI", _KIND_IDS[kind], _sender_byte(fields["sender"]), fields["cycle"] & 0xFFFFFFFF
    )
    if kind == "setplayStep":
        sid, step = fields["setplay_id"], fields["step_id"]
        mask = fields["participants"]
        if not 0 <= sid <= 0xFFFF or not 0 <= step <= 0xFF or not 0 <= mask <= 0xFFFF:
            raise EncodeError("setplayStep field out of range")
        body = struct.pack("<HBH", sid, step, mask)
    elif kind == "ballInfo":
        body = struct.pack(
            "<hhhh",
            _quantize(fields["x"], "x"),
            _quantize(fields["y"], "y"),
            _quantize(fields["vx"], "vx"),
            _quantize(fields["vy"], "vy"),
        )
    elif kind == "tacticSwitch":
        idx = fields["tactic_index"]
        if not 0 <= idx <= 0xFF:
            raise EncodeError("tactic index out of range")
        body = struct.pack("<B", idx)
    else:  # custom
        body = bytes(fields["data"])
        if len(body) > MAX_WIRE_BODY:
            raise EncodeError(f"custom body is {len(body)} bytes; wire limit is {MAX_WIRE_BODY}")
    frame = header + body
    assert len(frame) <= MAX_PAYLOAD
    return frame


def decode_message(data: bytes) -> tuple[str, dict]:
    if len(data) < 6:
        raise DecodeError("frame shorter than the 6-byte header", len(data))
    kind_id, sender_byte, cycle = struct.unpack_from("<BBI", data, 0)
    kind = _ID_KINDS.get(kind_id)
    if kind is None:
        raise DecodeError(f"unknown kind id {kind_id}", 0)
    sender = _sender_id(sender_byte, 1)
    body = data[6:]
    fields: dict = {"sender": sender, "cycle": cycle}
    if kind == "setplayStep":
        if len(body) != 5:
            raise DecodeError(f"setplayStep body must be 5 bytes, got {len(body)}", 6)
        sid, step, mask = struct.unpack("<HBH", body)
        fields.update(setplay_id=sid, step_id=step, participants=mask)
    elif kind == "ballInfo":
        if len(body) != 8:
            raise DecodeError(f"ballInfo body must be 8 bytes, got {len(body)}", 6)
        x, y, vx, vy = struct.unpack("<hhhh", body)
        fields.update(x=x * QUANTUM, y=y * QUANTUM, vx=vx * QUANTUM, vy=vy * QUANTUM)
    elif kind == "tacticSwitch":
        if len(body) != 1:
            raise DecodeError(f"tacticSwitch body must be 1 byte, got {len(body)}", 6)
        fields.update(tactic_index=body[0])
    else:
        fields.update(data=body)
    return kind, fields


def body_setplay_step(setplay_id: int, step_id: int, participants: int) -> bytes:
    return struct.pack("<HBH", setplay_id, step_id, participants)


def body_ball_info(x: float, y: float, vx: float, vy: float) -> bytes:
    return struct.pack(
        "<hhhh", _quantize(x, "x"), _quantize(y, "y"), _quantize(vx, "vx"), _quantize(vy, "vy")
    )


def body_tactic_switch(tactic_index: int) -> bytes:
    return struct.pack("<B", tactic_index)


def parse_body(message: TeamMessage) -> dict:
    """Decode a TeamMessage's kind-specific body into fields."""
    frame = (
        struct.pack(
            "<BBI", _KIND_IDS[message.kind], _sender_byte(message.sender), message.cycle & 0xFFFFFFFF
        )
        + message.payload
    )
    _, fields = decode_message(frame)
    return fields


def message_to_wire(message: TeamMessage) -> bytes:
    """Full wire frame of a message whose payload is the kind-specific body."""
    if message.kind not in _KIND_IDS:
        raise EncodeError(f"unknown message kind {message.kind!r}")
    if len(message.payload) > MAX_WIRE_BODY:
        raise EncodeError(
            f"body is {len(message.payload)} bytes; wire limit is {MAX_WIRE_BODY}"
        )
    return (
        struct.pack(
            "<BBI", _KIND_IDS[message.kind], _sender_byte(message.sender), message.cycle & 0xFFFFFFFF
        )
        + message.payload
    )


def message_from_wire(data: bytes) -> TeamMessage:
    kind, fields = decode_message(data)
    return TeamMessage(sender=fields["sender"], cycle=fields["cycle"], kind=kind, payload=data[6:])
