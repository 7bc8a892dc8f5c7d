"""Sender-side stream queues, fragmentation and pluggable stream schedulers.

Every association owns one queue per stream plus a scheduler that picks the
stream to take the next chunk from.  The scheduler runs in one of two
modes:

* non-interleaving: once the first fragment of a message has been produced,
  the scheduler stays locked on that stream until the end fragment is out.
  This is the classic sender-side head-of-line blocking.
* interleaving: the scheduler re-selects a stream after every single chunk,
  regardless of fragmentation.

Budgets are counted in payload bytes; a chunk is only produced if its whole
payload fits the remaining budget (no partial chunks).
"""

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum


class SchedulerKind(Enum):
    ROUND_ROBIN = "round_robin"
    PRIORITY = "priority"
    FCFS = "fcfs"


class SchedulerMode(Enum):
    INTERLEAVING = "interleaving"
    NON_INTERLEAVING = "non_interleaving"


@dataclass(eq=False)
class UserMessage:
    sid: int
    payload: bytes
    ordered: bool = True
    ppid: int = 0
    enqueue_time: float = 0.0
    lifetime: float | None = None
    # Bookkeeping filled in by the endpoint: the stream sequence number
    # (SSN or MID) is assigned when the first fragment is emitted.
    seq: int | None = None
    abandoned: bool = False

    def __post_init__(self) -> None:
        if not self.payload:
            raise ValueError("user message payload must be non-empty")

    @property
    def expiry(self) -> float | None:
        if self.lifetime is None:
            return None
        return self.enqueue_time + self.lifetime


@dataclass(frozen=True)
class OutChunk:
    """One fragment ready to become a DATA or I-DATA chunk.

    The TSN (and, for the first fragment of a message, the SSN/MID) are
    assigned later by the endpoint at transmission time.
    """

    message: UserMessage
    sid: int
    fsn: int
    payload: bytes
    begin: bool
    end: bool

    @property
    def unordered(self) -> bool:
        return not self.message.ordered

    @property
    def ppid(self) -> int:
        return self.message.ppid


def fragment(msg: UserMessage, max_fragment: int) -> list[OutChunk]:
    """Split a message into ceil(len/max_fragment) fragments, FSNs 0..n-1."""
    if max_fragment < 1:
        raise ValueError("max_fragment must be >= 1")
    count = math.ceil(len(msg.payload) / max_fragment)
    chunks = []
    for fsn in range(count):
        piece = msg.payload[fsn * max_fragment : (fsn + 1) * max_fragment]
        chunks.append(
            OutChunk(
                message=msg,
                sid=msg.sid,
                fsn=fsn,
                payload=piece,
                begin=(fsn == 0),
                end=(fsn == count - 1),
            )
        )
    return chunks


class UnknownStreamError(ValueError):
    pass


@dataclass
class StreamQueue:
    sid: int
    priority: int = 0
    messages: deque[UserMessage] = field(default_factory=deque)
    # cursor into the head message while it is being fragmented
    in_progress_fsn: int = 0
    in_progress_offset: int = 0
    started: bool = False

    def append(self, msg: UserMessage) -> None:
        self.messages.append(msg)

    @property
    def pending(self) -> bool:
        return bool(self.messages)

    @property
    def head(self) -> UserMessage | None:
        return self.messages[0] if self.messages else None

    @property
    def in_progress(self) -> UserMessage | None:
        return self.messages[0] if self.started else None

    def pending_messages(self) -> int:
        """Messages with at least one byte still to produce."""
        return len(self.messages)

    def queued_bytes(self) -> int:
        total = 0
        for i, msg in enumerate(self.messages):
            total += len(msg.payload)
            if i == 0 and self.started:
                total -= self.in_progress_offset
        return total

    def next_fragment_size(self, max_fragment: int) -> int | None:
        head = self.head
        if head is None:
            return None
        remaining = len(head.payload) - (self.in_progress_offset if self.started else 0)
        return min(remaining, max_fragment)

    def pop_fragment(self, max_fragment: int) -> OutChunk:
        head = self.messages[0]
        offset = self.in_progress_offset if self.started else 0
        fsn = self.in_progress_fsn if self.started else 0
        piece = head.payload[offset : offset + max_fragment]
        end = offset + len(piece) >= len(head.payload)
        chunk = OutChunk(
            message=head,
            sid=self.sid,
            fsn=fsn,
            payload=piece,
            begin=(fsn == 0),
            end=end,
        )
        if end:
            self.messages.popleft()
            self.started = False
            self.in_progress_fsn = 0
            self.in_progress_offset = 0
        else:
            self.started = True
            self.in_progress_fsn = fsn + 1
            self.in_progress_offset = offset + len(piece)
        return chunk

    def drop_in_progress(self) -> UserMessage | None:
        """Discard the partially produced head message, if any."""
        if not self.started:
            return None
        msg = self.messages.popleft()
        self.started = False
        self.in_progress_fsn = 0
        self.in_progress_offset = 0
        return msg

    def remove(self, msg: UserMessage) -> bool:
        if msg in self.messages:
            if self.started and self.messages[0] is msg:
                self.drop_in_progress()
            else:
                self.messages.remove(msg)
            return True
        return False


class Scheduler:
    """Stream scheduler over a set of per-stream queues.

    The policy is fixed at construction time; the paper's schedulers are
    application-configurable but never change mid-association.
    """

    def __init__(
        self,
        kind: SchedulerKind,
        mode: SchedulerMode,
        stream_count: int,
        priorities: dict[int, int] | None = None,
    ) -> None:
        if stream_count < 1:
            raise ValueError("stream_count must be >= 1")
        self.kind = kind
        self.mode = mode
        self.stream_count = stream_count
        self.queues: dict[int, StreamQueue] = {
            sid: StreamQueue(sid, priority=(priorities or {}).get(sid, 0))
            for sid in range(stream_count)
        }
        self.cursor = 0  # next sid favoured by round-robin selection
        self.locked_sid: int | None = None

    def enqueue(self, msg: UserMessage) -> None:
        if msg.sid not in self.queues:
            raise UnknownStreamError(
                f"stream {msg.sid} outside negotiated count {self.stream_count}"
            )
        self.queues[msg.sid].append(msg)

    @property
    def has_pending(self) -> bool:
        return any(q.pending for q in self.queues.values())

    def _cyclic(self, candidates: list[int]) -> int:
        for sid in candidates:
            if sid >= self.cursor:
                return sid
        return candidates[0]

    def _select_sid(self) -> int | None:
        if self.mode is SchedulerMode.NON_INTERLEAVING and self.locked_sid is not None:
            return self.locked_sid
        candidates = [sid for sid, q in sorted(self.queues.items()) if q.pending]
        if not candidates:
            return None
        if self.kind is SchedulerKind.ROUND_ROBIN:
            return self._cyclic(candidates)
        if self.kind is SchedulerKind.PRIORITY:
            top = max(self.queues[sid].priority for sid in candidates)
            return self._cyclic(
                [sid for sid in candidates if self.queues[sid].priority == top]
            )
        # FCFS: earliest head-of-queue enqueue time, ties to the lowest sid
        return min(candidates, key=lambda sid: (self.queues[sid].head.enqueue_time, sid))

    def peek_next_size(self, max_fragment: int) -> int | None:
        sid = self._select_sid()
        if sid is None:
            return None
        return self.queues[sid].next_fragment_size(max_fragment)

    def pop_next_chunk(self, max_fragment: int) -> OutChunk | None:
        """Produce the next chunk under the configured policy, or None."""
        if max_fragment < 1:
            raise ValueError("max_fragment must be >= 1")
        sid = self._select_sid()
        if sid is None:
            return None
        chunk = self.queues[sid].pop_fragment(max_fragment)
        if self.mode is SchedulerMode.NON_INTERLEAVING:
            if chunk.end:
                self.locked_sid = None
                self.cursor = (sid + 1) % self.stream_count
            else:
                self.locked_sid = sid
        else:
            self.cursor = (sid + 1) % self.stream_count
        return chunk

    def next_chunks(self, budget: int, max_fragment: int) -> list[OutChunk]:
        """Produce chunks until the budget is exhausted or queues run dry."""
        if budget < max_fragment:
            raise ValueError("budget must cover at least one full fragment")
        out: list[OutChunk] = []
        remaining = budget
        while True:
            size = self.peek_next_size(max_fragment)
            if size is None or size > remaining:
                break
            out.append(self.pop_next_chunk(max_fragment))
            remaining -= size
        return out

    def reset_lock(self) -> UserMessage | None:
        """Clear the non-interleaving lock after its message is abandoned.

        Unsent fragments of the in-progress message are dropped.  No-op when
        no lock is held.
        """
        if self.locked_sid is None:
            return None
        queue = self.queues[self.locked_sid]
        self.locked_sid = None
        return queue.drop_in_progress()

    def abandon(self, msg: UserMessage) -> bool:
        """Drop a message's unsent bytes from its stream queue."""
        queue = self.queues.get(msg.sid)
        if queue is None:
            return False
        if self.locked_sid == msg.sid and queue.in_progress is msg:
            self.reset_lock()
            return True
        if queue.in_progress is msg:
            return queue.drop_in_progress() is not None
        return queue.remove(msg)
