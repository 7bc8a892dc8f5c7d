"""Serial number arithmetic for wrap-around sequence spaces (TSN, SSN, MID).

Comparison follows the RFC 1982 convention: ``a < b`` iff ``(b - a)`` taken
modulo the sequence space lies strictly between 0 and half the space.  The
exact half-way point compares as neither smaller nor greater.
"""


def serial_lt(a: int, b: int, bits: int) -> bool:
    """True iff serial number ``a`` precedes ``b`` in a ``bits``-wide space."""
    half = 1 << (bits - 1)
    return 0 < ((b - a) & ((1 << bits) - 1)) < half


def serial_gt(a: int, b: int, bits: int) -> bool:
    return serial_lt(b, a, bits)


def serial_le(a: int, b: int, bits: int) -> bool:
    return a == b or serial_lt(a, b, bits)


def serial_add(a: int, n: int, bits: int) -> int:
    return (a + n) & ((1 << bits) - 1)


def serial_diff(a: int, b: int, bits: int) -> int:
    """Distance from ``b`` forward to ``a``, in [0, 2**bits)."""
    return (a - b) & ((1 << bits) - 1)


def serial_max(a: int, b: int, bits: int) -> int:
    return b if serial_lt(a, b, bits) else a
