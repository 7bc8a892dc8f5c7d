"""CRC-32C (Castagnoli) as used by the SCTP packet checksum.

Table-driven, reflected polynomial 0x1EDC6F41 (reflected form 0x82F63B78),
initial value and final XOR of all ones.  The check value for b"123456789"
is 0xE3069283.
"""

_POLY_REFLECTED = 0x82F63B78


def _build_table() -> list[int]:
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            if crc & 1:
                crc = (crc >> 1) ^ _POLY_REFLECTED
            else:
                crc >>= 1
        table.append(crc)
    return table


_TABLE = _build_table()


def crc32c(data: bytes) -> int:
    """CRC-32C of ``data`` as an unsigned 32-bit integer."""
    crc = 0xFFFFFFFF
    for byte in data:
        crc = (crc >> 8) ^ _TABLE[(crc ^ byte) & 0xFF]
    return crc ^ 0xFFFFFFFF
