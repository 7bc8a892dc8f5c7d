"""SCTP packet and chunk codecs for the base and interleaving chunk families.

Everything here is a pure function over immutable values.  The wire image
follows RFC 4960 / RFC 3758 / RFC 8260 field layouts: a 12-byte common
header followed by chunks, each padded to a 4-byte boundary; the declared
chunk length excludes the padding.  The CRC-32C checksum is computed over
the whole packet with the checksum field zeroed and is stored in
little-endian byte order (RFC 4960 appendix B), which is what Wireshark
and kernel stacks expect.
"""

from dataclasses import dataclass, field
from struct import pack, unpack_from

from .crc import crc32c

# chunk type codes
CT_DATA = 0
CT_INIT = 1
CT_INIT_ACK = 2
CT_SACK = 3
CT_COOKIE_ECHO = 10
CT_COOKIE_ACK = 11
CT_IDATA = 64
CT_FORWARD_TSN = 192
CT_IFORWARD_TSN = 194

# data chunk flag bits
_FLAG_E = 0x01
_FLAG_B = 0x02
_FLAG_U = 0x04
_FLAG_I = 0x08

# feature identifiers carried in the Supported Extensions parameter
# (one byte per supported chunk type code, parameter type 0x8008)
FEATURE_INTERLEAVING = CT_IDATA
FEATURE_FORWARD_TSN = CT_FORWARD_TSN

PARAM_STATE_COOKIE = 0x0007
PARAM_SUPPORTED_EXTENSIONS = 0x8008

COMMON_HEADER_LEN = 12
DATA_HEADER_LEN = 16  # chunk header + tsn/sid/ssn/ppid
IDATA_HEADER_LEN = 20  # chunk header + tsn/sid/res/mid/(ppid|fsn)
MAX_CHUNK_LEN = 0xFFFF


class EncodeError(ValueError):
    """A chunk cannot be represented on the wire."""


class DecodeError(ValueError):
    """Base class for packet decoding failures."""


class TruncatedPacketError(DecodeError):
    pass


class ChecksumMismatchError(DecodeError):
    pass


class ChunkLengthError(DecodeError):
    pass


def _pad(length: int) -> int:
    return -length % 4


@dataclass(frozen=True)
class ChunkFlags:
    """U/B/E/I bits of DATA and I-DATA chunks.

    An unfragmented message carries begin and end both set; middle
    fragments carry neither.
    """

    unordered: bool = False
    begin: bool = False
    end: bool = False
    immediate: bool = False

    def to_byte(self) -> int:
        return (
            (_FLAG_E if self.end else 0)
            | (_FLAG_B if self.begin else 0)
            | (_FLAG_U if self.unordered else 0)
            | (_FLAG_I if self.immediate else 0)
        )

    @classmethod
    def from_byte(cls, value: int) -> "ChunkFlags":
        return cls(
            unordered=bool(value & _FLAG_U),
            begin=bool(value & _FLAG_B),
            end=bool(value & _FLAG_E),
            immediate=bool(value & _FLAG_I),
        )


UNFRAGMENTED = ChunkFlags(begin=True, end=True)


@dataclass(frozen=True)
class DataChunk:
    flags: ChunkFlags
    tsn: int
    sid: int
    ssn: int
    ppid: int
    payload: bytes

    wire_type = CT_DATA


@dataclass(frozen=True)
class IDataChunk:
    """Interleaving data chunk.

    ``ppid_or_fsn`` holds the PPID when the begin flag is set (the first
    fragment's FSN is implicitly 0) and the FSN otherwise.
    """

    flags: ChunkFlags
    tsn: int
    sid: int
    mid: int
    ppid_or_fsn: int
    payload: bytes
    reserved: int = 0

    wire_type = CT_IDATA

    @property
    def fsn(self) -> int:
        return 0 if self.flags.begin else self.ppid_or_fsn


@dataclass(frozen=True)
class SackChunk:
    cum_tsn_ack: int
    a_rwnd: int
    gap_blocks: tuple[tuple[int, int], ...] = ()
    dup_tsns: tuple[int, ...] = ()

    wire_type = CT_SACK

    def covers(self, tsn: int, bits: int = 32) -> bool:
        from .serial import serial_diff, serial_le

        if serial_le(tsn, self.cum_tsn_ack, bits):
            return True
        offset = serial_diff(tsn, self.cum_tsn_ack, bits)
        return any(start <= offset <= end for start, end in self.gap_blocks)


@dataclass(frozen=True)
class ForwardTsnChunk:
    new_cum_tsn: int
    skipped: tuple[tuple[int, int], ...] = ()  # (sid, ssn)

    wire_type = CT_FORWARD_TSN


@dataclass(frozen=True)
class IForwardTsnChunk:
    new_cum_tsn: int
    skipped: tuple[tuple[int, int, int], ...] = ()  # (sid, flags, mid); low flag bit = unordered

    wire_type = CT_IFORWARD_TSN


@dataclass(frozen=True)
class InitChunk:
    initiate_tag: int
    a_rwnd: int
    outbound_streams: int
    inbound_streams: int
    initial_tsn: int
    supported_extensions: frozenset[int] = frozenset()

    wire_type = CT_INIT


@dataclass(frozen=True)
class InitAckChunk:
    initiate_tag: int
    a_rwnd: int
    outbound_streams: int
    inbound_streams: int
    initial_tsn: int
    supported_extensions: frozenset[int] = frozenset()
    cookie: bytes = b""

    wire_type = CT_INIT_ACK


@dataclass(frozen=True)
class CookieEchoChunk:
    cookie: bytes

    wire_type = CT_COOKIE_ECHO


@dataclass(frozen=True)
class CookieAckChunk:
    wire_type = CT_COOKIE_ACK


@dataclass(frozen=True)
class UnknownChunk:
    """Chunk of a type this stack does not know; kept opaque, never an error."""

    chunk_type: int
    chunk_flags: int
    body: bytes


Chunk = (
    DataChunk
    | IDataChunk
    | SackChunk
    | ForwardTsnChunk
    | IForwardTsnChunk
    | InitChunk
    | InitAckChunk
    | CookieEchoChunk
    | CookieAckChunk
    | UnknownChunk
)


@dataclass(frozen=True)
class CommonHeader:
    src_port: int
    dst_port: int
    verification_tag: int
    # Derived on encode and verified on decode; excluded from equality so
    # that round-tripping a packet built with checksum=0 compares equal.
    checksum: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SctpPacket:
    header: CommonHeader
    chunks: tuple[Chunk, ...]


def _encode_params(params: list[tuple[int, bytes]]) -> bytes:
    out = b""
    for ptype, value in params:
        plen = 4 + len(value)
        out += pack("!HH", ptype, plen) + value + b"\x00" * _pad(plen)
    return out


def _decode_params(body: bytes) -> list[tuple[int, bytes]]:
    params = []
    pos = 0
    while pos + 4 <= len(body):
        ptype, plen = unpack_from("!HH", body, pos)
        if plen < 4 or pos + plen > len(body):
            raise ChunkLengthError(f"parameter length {plen} out of range")
        params.append((ptype, body[pos + 4 : pos + plen]))
        pos += plen + _pad(plen)
    return params


def _encode_init_body(chunk: InitChunk | InitAckChunk) -> bytes:
    body = pack(
        "!LLHHL",
        chunk.initiate_tag,
        chunk.a_rwnd,
        chunk.outbound_streams,
        chunk.inbound_streams,
        chunk.initial_tsn,
    )
    params: list[tuple[int, bytes]] = []
    if chunk.supported_extensions:
        params.append(
            (PARAM_SUPPORTED_EXTENSIONS, bytes(sorted(chunk.supported_extensions)))
        )
    if isinstance(chunk, InitAckChunk) and chunk.cookie:
        params.append((PARAM_STATE_COOKIE, chunk.cookie))
    return body + _encode_params(params)


def _decode_init_body(chunk_type: int, body: bytes) -> InitChunk | InitAckChunk:
    if len(body) < 16:
        raise ChunkLengthError("INIT/INIT-ACK body shorter than 16 bytes")
    tag, a_rwnd, out_streams, in_streams, initial_tsn = unpack_from("!LLHHL", body)
    extensions: frozenset[int] = frozenset()
    cookie = b""
    for ptype, value in _decode_params(body[16:]):
        if ptype == PARAM_SUPPORTED_EXTENSIONS:
            extensions = frozenset(value)
        elif ptype == PARAM_STATE_COOKIE:
            cookie = value
        # other parameters are tolerated and dropped
    if chunk_type == CT_INIT:
        return InitChunk(tag, a_rwnd, out_streams, in_streams, initial_tsn, extensions)
    return InitAckChunk(
        tag, a_rwnd, out_streams, in_streams, initial_tsn, extensions, cookie
    )


def encode_chunk(chunk: Chunk) -> bytes:
    """Encode one chunk including its padding to a 4-byte boundary."""
    if isinstance(chunk, DataChunk):
        if not chunk.payload:
            raise EncodeError("DATA payload must be non-empty")
        flags = chunk.flags.to_byte()
        body = (
            pack("!LHHL", chunk.tsn, chunk.sid, chunk.ssn, chunk.ppid) + chunk.payload
        )
    elif isinstance(chunk, IDataChunk):
        if not chunk.payload:
            raise EncodeError("I-DATA payload must be non-empty")
        flags = chunk.flags.to_byte()
        body = (
            pack(
                "!LHHLL",
                chunk.tsn,
                chunk.sid,
                chunk.reserved,
                chunk.mid,
                chunk.ppid_or_fsn,
            )
            + chunk.payload
        )
    elif isinstance(chunk, SackChunk):
        for start, end in chunk.gap_blocks:
            if not 1 <= start <= end:
                raise EncodeError(f"invalid gap block ({start},{end})")
        flags = 0
        body = pack(
            "!LLHH",
            chunk.cum_tsn_ack,
            chunk.a_rwnd,
            len(chunk.gap_blocks),
            len(chunk.dup_tsns),
        )
        for start, end in chunk.gap_blocks:
            body += pack("!HH", start, end)
        for tsn in chunk.dup_tsns:
            body += pack("!L", tsn)
    elif isinstance(chunk, ForwardTsnChunk):
        flags = 0
        body = pack("!L", chunk.new_cum_tsn)
        for sid, ssn in chunk.skipped:
            body += pack("!HH", sid, ssn)
    elif isinstance(chunk, IForwardTsnChunk):
        flags = 0
        body = pack("!L", chunk.new_cum_tsn)
        for sid, skip_flags, mid in chunk.skipped:
            body += pack("!HHL", sid, skip_flags, mid)
    elif isinstance(chunk, (InitChunk, InitAckChunk)):
        flags = 0
        body = _encode_init_body(chunk)
    elif isinstance(chunk, CookieEchoChunk):
        flags = 0
        body = chunk.cookie
    elif isinstance(chunk, CookieAckChunk):
        flags = 0
        body = b""
    elif isinstance(chunk, UnknownChunk):
        flags = chunk.chunk_flags
        body = chunk.body
    else:
        raise EncodeError(f"cannot encode {type(chunk).__name__}")

    length = 4 + len(body)
    if length > MAX_CHUNK_LEN:
        raise EncodeError(f"chunk length {length} exceeds 16-bit length field")
    wire_type = chunk.chunk_type if isinstance(chunk, UnknownChunk) else chunk.wire_type
    return pack("!BBH", wire_type, flags, length) + body + b"\x00" * _pad(length)


_MIN_CHUNK_LEN = {
    CT_DATA: DATA_HEADER_LEN + 1,
    CT_IDATA: IDATA_HEADER_LEN + 1,
    CT_SACK: 16,
    CT_INIT: 20,
    CT_INIT_ACK: 20,
    CT_COOKIE_ECHO: 4,
    CT_COOKIE_ACK: 4,
    CT_FORWARD_TSN: 8,
    CT_IFORWARD_TSN: 8,
}


def decode_chunk(chunk_type: int, flags: int, body: bytes) -> Chunk:
    if chunk_type == CT_DATA:
        tsn, sid, ssn, ppid = unpack_from("!LHHL", body)
        return DataChunk(ChunkFlags.from_byte(flags), tsn, sid, ssn, ppid, body[12:])
    if chunk_type == CT_IDATA:
        tsn, sid, reserved, mid, ppid_or_fsn = unpack_from("!LHHLL", body)
        return IDataChunk(
            ChunkFlags.from_byte(flags), tsn, sid, mid, ppid_or_fsn, body[16:], reserved
        )
    if chunk_type == CT_SACK:
        cum, a_rwnd, n_gaps, n_dups = unpack_from("!LLHH", body)
        if len(body) < 12 + 4 * (n_gaps + n_dups):
            raise ChunkLengthError("SACK body shorter than its gap/dup counts")
        pos = 12
        gaps = []
        for _ in range(n_gaps):
            gaps.append(unpack_from("!HH", body, pos))
            pos += 4
        dups = []
        for _ in range(n_dups):
            dups.append(unpack_from("!L", body, pos)[0])
            pos += 4
        return SackChunk(cum, a_rwnd, tuple(gaps), tuple(dups))
    if chunk_type in (CT_INIT, CT_INIT_ACK):
        return _decode_init_body(chunk_type, body)
    if chunk_type == CT_COOKIE_ECHO:
        return CookieEchoChunk(body)
    if chunk_type == CT_COOKIE_ACK:
        return CookieAckChunk()
    if chunk_type == CT_FORWARD_TSN:
        (new_cum,) = unpack_from("!L", body)
        if (len(body) - 4) % 4:
            raise ChunkLengthError("FORWARD-TSN stream list not a multiple of 4")
        skipped = [unpack_from("!HH", body, pos) for pos in range(4, len(body), 4)]
        return ForwardTsnChunk(new_cum, tuple(skipped))
    if chunk_type == CT_IFORWARD_TSN:
        (new_cum,) = unpack_from("!L", body)
        if (len(body) - 4) % 8:
            raise ChunkLengthError("I-FORWARD-TSN stream list not a multiple of 8")
        skipped = [unpack_from("!HHL", body, pos) for pos in range(4, len(body), 8)]
        return IForwardTsnChunk(new_cum, tuple(skipped))
    return UnknownChunk(chunk_type, flags, body)


def encode_packet(pkt: SctpPacket) -> bytes:
    """Serialize a packet and fill in its CRC-32C checksum."""
    header = pack(
        "!HHL", pkt.header.src_port, pkt.header.dst_port, pkt.header.verification_tag
    )
    chunks = b"".join(encode_chunk(c) for c in pkt.chunks)
    checksum = crc32c(header + b"\x00\x00\x00\x00" + chunks)
    return header + pack("<L", checksum) + chunks


def decode_packet(data: bytes) -> SctpPacket:
    """Parse a packet, verifying the checksum before touching any chunk.

    Unknown chunk types decode to ``UnknownChunk`` values rather than
    errors, so arbitrary byte injections stay inspectable.
    """
    if len(data) < COMMON_HEADER_LEN:
        raise TruncatedPacketError(
            f"packet of {len(data)} bytes is shorter than the 12-byte common header"
        )
    src_port, dst_port, verification_tag = unpack_from("!HHL", data)
    stored = unpack_from("<L", data, 8)[0]
    computed = crc32c(data[:8] + b"\x00\x00\x00\x00" + data[12:])
    if stored != computed:
        raise ChecksumMismatchError(
            f"checksum 0x{stored:08X} does not match computed 0x{computed:08X}"
        )

    chunks: list[Chunk] = []
    pos = COMMON_HEADER_LEN
    while pos < len(data):
        if pos + 4 > len(data):
            raise TruncatedPacketError("trailing bytes shorter than a chunk header")
        chunk_type, flags, length = unpack_from("!BBH", data, pos)
        minimum = _MIN_CHUNK_LEN.get(chunk_type, 4)
        if length < minimum:
            raise ChunkLengthError(
                f"chunk type {chunk_type} length {length} below minimum {minimum}"
            )
        if pos + length > len(data):
            raise TruncatedPacketError("chunk length exceeds packet size")
        chunks.append(decode_chunk(chunk_type, flags, data[pos + 4 : pos + length]))
        pos += length + _pad(length)
    return SctpPacket(
        CommonHeader(src_port, dst_port, verification_tag, stored), tuple(chunks)
    )


def is_data_chunk(chunk: Chunk) -> bool:
    return isinstance(chunk, (DataChunk, IDataChunk))
