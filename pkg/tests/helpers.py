"""Shared generators for fuzz-style tests."""

import random

from sctpsim.wire import (
    ChunkFlags,
    CommonHeader,
    CookieAckChunk,
    CookieEchoChunk,
    DataChunk,
    ForwardTsnChunk,
    IDataChunk,
    IForwardTsnChunk,
    InitAckChunk,
    InitChunk,
    SackChunk,
    SctpPacket,
    UnknownChunk,
)


def random_flags(rng: random.Random) -> ChunkFlags:
    return ChunkFlags(
        unordered=rng.random() < 0.5,
        begin=rng.random() < 0.5,
        end=rng.random() < 0.5,
        immediate=rng.random() < 0.2,
    )


def random_payload(rng: random.Random, lo: int = 1, hi: int = 64) -> bytes:
    return rng.randbytes(rng.randint(lo, hi))


def random_chunk(rng: random.Random):
    kind = rng.randrange(10)
    if kind == 0:
        return DataChunk(
            flags=random_flags(rng),
            tsn=rng.getrandbits(32),
            sid=rng.getrandbits(16),
            ssn=rng.getrandbits(16),
            ppid=rng.getrandbits(32),
            payload=random_payload(rng),
        )
    if kind == 1:
        return IDataChunk(
            flags=random_flags(rng),
            tsn=rng.getrandbits(32),
            sid=rng.getrandbits(16),
            mid=rng.getrandbits(32),
            ppid_or_fsn=rng.getrandbits(32),
            payload=random_payload(rng),
        )
    if kind == 2:
        gaps = []
        offset = 0
        for _ in range(rng.randrange(4)):
            start = offset + rng.randint(1, 5)
            end = start + rng.randrange(4)
            gaps.append((start, end))
            offset = end + 1
        dups = tuple(rng.getrandbits(32) for _ in range(rng.randrange(3)))
        return SackChunk(
            cum_tsn_ack=rng.getrandbits(32),
            a_rwnd=rng.getrandbits(32),
            gap_blocks=tuple(gaps),
            dup_tsns=dups,
        )
    if kind == 3:
        skips = tuple(
            (rng.getrandbits(16), rng.getrandbits(16)) for _ in range(rng.randrange(4))
        )
        return ForwardTsnChunk(new_cum_tsn=rng.getrandbits(32), skipped=skips)
    if kind == 4:
        skips = tuple(
            (rng.getrandbits(16), rng.randrange(2), rng.getrandbits(32))
            for _ in range(rng.randrange(4))
        )
        return IForwardTsnChunk(new_cum_tsn=rng.getrandbits(32), skipped=skips)
    if kind == 5:
        return InitChunk(
            initiate_tag=rng.getrandbits(32),
            a_rwnd=rng.getrandbits(32),
            outbound_streams=rng.randint(1, 0xFFFF),
            inbound_streams=rng.randint(1, 0xFFFF),
            initial_tsn=rng.getrandbits(32),
            supported_extensions=frozenset(
                rng.sample([64, 192, 194], rng.randrange(4))
            ),
        )
    if kind == 6:
        return InitAckChunk(
            initiate_tag=rng.getrandbits(32),
            a_rwnd=rng.getrandbits(32),
            outbound_streams=rng.randint(1, 0xFFFF),
            inbound_streams=rng.randint(1, 0xFFFF),
            initial_tsn=rng.getrandbits(32),
            supported_extensions=frozenset(rng.sample([64, 192], rng.randrange(3))),
            cookie=random_payload(rng, 1, 32),
        )
    if kind == 7:
        return CookieEchoChunk(cookie=random_payload(rng, 0, 32))
    if kind == 8:
        return CookieAckChunk()
    return UnknownChunk(
        chunk_type=rng.choice([5, 6, 7, 8, 9, 14, 99, 130, 200]),
        chunk_flags=rng.getrandbits(8),
        body=random_payload(rng, 0, 32),
    )


def random_packet(rng: random.Random) -> SctpPacket:
    header = CommonHeader(
        src_port=rng.getrandbits(16),
        dst_port=rng.getrandbits(16),
        verification_tag=rng.getrandbits(32),
    )
    chunks = tuple(random_chunk(rng) for _ in range(rng.randint(1, 4)))
    return SctpPacket(header, chunks)
