"""Classic pcap emission with raw-IPv4 framing (link type 101).

Raw IP avoids fabricating MAC addresses while remaining decodable by
standard analyzers.  The writer produces the classic microsecond format
(magic 0xA1B2C3D4, version 2.4); a matching reader is provided for tests
and for the negotiation checks that inspect recorded traffic.
"""

import struct
from dataclasses import dataclass

PCAP_MAGIC = 0xA1B2C3D4
PCAP_VERSION = (2, 4)
LINKTYPE_RAW_IPV4 = 101
SNAPLEN = 65535

IPPROTO_SCTP = 132
IPPROTO_UDP = 17

_GLOBAL_HEADER = struct.Struct("<LHHlLLL")
_RECORD_HEADER = struct.Struct("<LLLL")


def pcap_write(path: str, records: list[tuple[float, bytes]]) -> None:
    """Write ``(timestamp_seconds, ip_packet_bytes)`` records to ``path``.

    Timestamps must be non-decreasing; captured and original lengths are
    equal (nothing is truncated).
    """
    last = None
    for ts, _ in records:
        if last is not None and ts < last:
            raise ValueError(f"timestamps must be non-decreasing ({ts} after {last})")
        last = ts
    with open(path, "wb") as fh:
        fh.write(
            _GLOBAL_HEADER.pack(
                PCAP_MAGIC, *PCAP_VERSION, 0, 0, SNAPLEN, LINKTYPE_RAW_IPV4
            )
        )
        for ts, packet in records:
            sec = int(ts)
            usec = round((ts - sec) * 1_000_000)
            if usec == 1_000_000:
                sec += 1
                usec = 0
            fh.write(_RECORD_HEADER.pack(sec, usec, len(packet), len(packet)))
            fh.write(packet)


def pcap_read(path: str) -> list[tuple[float, bytes]]:
    """Read back a file produced by :func:`pcap_write`."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, major, minor, _, _, _, network = _GLOBAL_HEADER.unpack_from(data)
    if magic != PCAP_MAGIC:
        raise ValueError(f"bad pcap magic 0x{magic:08X}")
    if (major, minor) != PCAP_VERSION or network != LINKTYPE_RAW_IPV4:
        raise ValueError("unsupported pcap flavour")
    records = []
    pos = _GLOBAL_HEADER.size
    while pos < len(data):
        sec, usec, incl, orig = _RECORD_HEADER.unpack_from(data, pos)
        pos += _RECORD_HEADER.size
        if incl != orig or pos + incl > len(data):
            raise ValueError("corrupt pcap record")
        records.append((sec + usec / 1_000_000, data[pos : pos + incl]))
        pos += incl
    return records


def _ip_checksum(header: bytes) -> int:
    total = 0
    for i in range(0, len(header), 2):
        total += (header[i] << 8) | header[i + 1]
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


def ipv4_pack(src: str, dst: str, protocol: int, payload: bytes, ident: int = 0) -> bytes:
    """Wrap ``payload`` in a minimal IPv4 header (no options)."""
    import socket

    header = struct.pack(
        "!BBHHHBBH4s4s",
        0x45,
        0,
        20 + len(payload),
        ident & 0xFFFF,
        0,
        64,
        protocol,
        0,
        socket.inet_aton(src),
        socket.inet_aton(dst),
    )
    checksum = _ip_checksum(header)
    return header[:10] + struct.pack("!H", checksum) + header[12:] + payload


@dataclass(frozen=True)
class Ipv4Packet:
    src: str
    dst: str
    protocol: int
    payload: bytes


def ipv4_unpack(data: bytes) -> Ipv4Packet:
    import socket

    if len(data) < 20 or data[0] != 0x45:
        raise ValueError("not a plain IPv4 header")
    total_len = struct.unpack_from("!H", data, 2)[0]
    protocol = data[9]
    src = socket.inet_ntoa(data[12:16])
    dst = socket.inet_ntoa(data[16:20])
    return Ipv4Packet(src, dst, protocol, data[20:total_len])
