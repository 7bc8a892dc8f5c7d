import random
from struct import pack, unpack_from

import pytest
from helpers import random_packet

from sctpsim.crc import crc32c
from sctpsim.wire import (
    ChecksumMismatchError,
    ChunkFlags,
    ChunkLengthError,
    CommonHeader,
    DataChunk,
    EncodeError,
    IDataChunk,
    InitChunk,
    SackChunk,
    SctpPacket,
    TruncatedPacketError,
    UnknownChunk,
    decode_packet,
    encode_chunk,
    encode_packet,
)


def make_packet(*chunks):
    return SctpPacket(CommonHeader(5000, 5001, 0xDEADBEEF), tuple(chunks))


def test_idata_header_arithmetic():
    # 20-byte fixed I-DATA header + 4 payload bytes -> length field 24, no padding
    chunk = IDataChunk(ChunkFlags(begin=True, end=True), 1, 0, 0, 50, b"abcd")
    wire = encode_chunk(chunk)
    assert unpack_from("!H", wire, 2)[0] == 24
    assert len(wire) == 24


def test_data_chunk_padding():
    # 16-byte header + 1 payload byte -> length 17, padded to 20 on the wire
    chunk = DataChunk(ChunkFlags(begin=True, end=True), 1, 0, 0, 0, b"x")
    wire = encode_chunk(chunk)
    assert unpack_from("!H", wire, 2)[0] == 17
    assert len(wire) == 20
    assert wire[17:20] == b"\x00\x00\x00"


def test_round_trip_random_packets():
    rng = random.Random(0x51C7)
    for _ in range(1000):
        pkt = random_packet(rng)
        assert decode_packet(encode_packet(pkt)) == pkt


def test_chunk_alignment():
    rng = random.Random(3)
    for _ in range(100):
        wire = encode_packet(random_packet(rng))
        pos = 12
        while pos < len(wire):
            assert (pos - 12) % 4 == 0
            length = unpack_from("!H", wire, pos + 2)[0]
            pos += length + (-length % 4)


def test_stored_checksum_matches_recomputation():
    rng = random.Random(11)
    for _ in range(50):
        wire = bytearray(encode_packet(random_packet(rng)))
        stored = unpack_from("<L", wire, 8)[0]
        wire[8:12] = b"\x00\x00\x00\x00"
        assert crc32c(bytes(wire)) == stored


def test_truncated_buffer():
    with pytest.raises(TruncatedPacketError):
        decode_packet(b"\x00" * 11)


def test_bit_flip_detected():
    rng = random.Random(99)
    for _ in range(200):
        wire = bytearray(encode_packet(random_packet(rng)))
        while True:
            pos = rng.randrange(len(wire))
            if not 8 <= pos < 12:  # skip the checksum field itself
                break
        wire[pos] ^= 1 << rng.randrange(8)
        with pytest.raises(ChecksumMismatchError):
            decode_packet(bytes(wire))


def test_unknown_chunk_type_is_opaque():
    wire = bytearray(encode_packet(make_packet(UnknownChunk(99, 3, b"hello"))))
    pkt = decode_packet(bytes(wire))
    assert pkt.chunks == (UnknownChunk(99, 3, b"hello"),)


def test_chunk_length_below_minimum():
    # hand-assemble a DATA chunk whose declared length is 16 (no payload)
    header = pack("!HHL", 1, 2, 3)
    body = pack("!BBH", 0, 0, 16) + pack("!LHHL", 0, 0, 0, 0)
    checksum = crc32c(header + b"\x00\x00\x00\x00" + body)
    with pytest.raises(ChunkLengthError):
        decode_packet(header + pack("<L", checksum) + body)


def test_declared_length_beyond_packet():
    header = pack("!HHL", 1, 2, 3)
    body = pack("!BBH", 10, 0, 64) + b"tiny"
    checksum = crc32c(header + b"\x00\x00\x00\x00" + body)
    with pytest.raises(TruncatedPacketError):
        decode_packet(header + pack("<L", checksum) + body)


def test_empty_payload_rejected():
    with pytest.raises(EncodeError):
        encode_chunk(DataChunk(ChunkFlags(begin=True, end=True), 0, 0, 0, 0, b""))


def test_oversized_payload_rejected():
    chunk = DataChunk(ChunkFlags(begin=True, end=True), 0, 0, 0, 0, b"x" * 65532)
    with pytest.raises(EncodeError):
        encode_chunk(chunk)


def test_ppid_fsn_single_field():
    # the same 32-bit field is written either way; interpretation follows B
    first = IDataChunk(ChunkFlags(begin=True), 1, 0, 7, 0xAABB, b"p")
    later = IDataChunk(ChunkFlags(), 2, 0, 7, 3, b"p")
    assert encode_chunk(first)[16:20] == pack("!L", 0xAABB)
    assert first.fsn == 0
    assert later.fsn == 3


def test_init_extensions_survive_the_wire():
    chunk = InitChunk(1, 2, 3, 4, 5, frozenset({64, 192}))
    pkt = decode_packet(encode_packet(make_packet(chunk)))
    assert pkt.chunks[0].supported_extensions == frozenset({64, 192})


def test_sack_gap_validation():
    with pytest.raises(EncodeError):
        encode_chunk(SackChunk(0, 0, gap_blocks=((0, 2),)))
    with pytest.raises(EncodeError):
        encode_chunk(SackChunk(0, 0, gap_blocks=((5, 3),)))


def test_sack_covers():
    sack = SackChunk(cum_tsn_ack=9, a_rwnd=0, gap_blocks=((2, 3),))
    assert sack.covers(9) and sack.covers(4)
    assert not sack.covers(10)
    assert sack.covers(11) and sack.covers(12)
    assert not sack.covers(13)
