"""
Histogram file format
=====================
Versioned binary layout, all integers big-endian:

    magic      b"DLSH"
    version    u8
    m, ell     u32, u32
    r, d       u32 length + unsigned magnitude bytes
    B_max      u64
    precision  u32
    cells      u64 count, then per cell:
                 Delta                 i64
                 u_lo, u_hi            numerator (u32 length + signed bytes),
                                       denominator (u32 length + unsigned bytes)
                 mass                  u32 length + ASCII decimal, 40 significant digits
    crc        u32, CRC-32 of everything before it
"""

import struct
import zlib
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from dlog_simulator.exceptions import (
    HistogramChecksumError,
    HistogramVersionError,
    MalformedHistogramError,
)
from dlog_simulator.histogram.builder import Histogram, HistogramCell

MAGIC = b"DLSH"
FORMAT_VERSION = 1
CRC = struct.Struct(">I")

# magic, version, m, ell, one-byte r and d, B_max, precision, count, crc
MIN_SIZE = (
    len(MAGIC) + struct.calcsize(">BII") + 2 * 5 + struct.calcsize(">QIQ") + CRC.size
)


def _unsigned_bytes(value: int) -> bytes:
    return value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big")


def _signed_bytes(value: int) -> bytes:
    size = (value + (value < 0)).bit_length() // 8 + 1
    return value.to_bytes(size, "big", signed=True)


def _blob(payload: bytes) -> bytes:
    return struct.pack(">I", len(payload)) + payload


def serialize(hist: Histogram) -> bytes:
    out = bytearray(MAGIC)
    out += struct.pack(">BII", FORMAT_VERSION, hist.m, hist.ell)
    out += _blob(_unsigned_bytes(hist.r))
    out += _blob(_unsigned_bytes(hist.d))
    out += struct.pack(">QIQ", hist.B_max, hist.precision_bits, len(hist.cells))
    for cell in hist.cells:
        out += struct.pack(">q", cell.Delta)
        for bound in (cell.u_lo, cell.u_hi):
            out += _blob(_signed_bytes(bound.numerator))
            out += _blob(_unsigned_bytes(bound.denominator))
        out += _blob(str(cell.mass).encode("ascii"))
    out += CRC.pack(zlib.crc32(out))
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise MalformedHistogramError(
                f"truncated input: need {size} bytes at offset {self.pos}"
            )
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def blob(self) -> bytes:
        (size,) = self.unpack(">I")
        return self.take(size)

    def unsigned(self) -> int:
        return int.from_bytes(self.blob(), "big")

    def signed(self) -> int:
        return int.from_bytes(self.blob(), "big", signed=True)


def deserialize(data: bytes) -> Histogram:
    """
    The CRC is checked before any field is parsed, so a corrupted length
    prefix reports as a checksum failure. Without a length field a stream cut
    inside the cells is indistinguishable from corruption and fails the CRC
    too; one cut inside the fixed-size frame is reported as truncated.

    Raises:
        HistogramVersionError: unknown version byte.
        HistogramChecksumError: CRC-32 mismatch.
        MalformedHistogramError: bad magic, truncated frame or invalid field.
    """
    if data[: len(MAGIC)] != MAGIC or len(data) <= len(MAGIC):
        raise MalformedHistogramError("not a histogram file (bad magic)")
    version = data[len(MAGIC)]
    if version != FORMAT_VERSION:
        raise HistogramVersionError(f"unsupported histogram version {version}")
    if len(data) < MIN_SIZE:
        raise MalformedHistogramError(
            f"truncated input: {len(data)} bytes, the smallest file has {MIN_SIZE}"
        )

    body = data[:-CRC.size]
    (stored_crc,) = CRC.unpack(data[-CRC.size :])
    if zlib.crc32(body) != stored_crc:
        raise HistogramChecksumError("CRC-32 mismatch")

    reader = _Reader(body)
    reader.take(len(MAGIC) + 1)
    m, ell = reader.unpack(">II")
    r = reader.unsigned()
    d = reader.unsigned()
    B_max, precision_bits, count = reader.unpack(">QIQ")

    cells = []
    for _ in range(count):
        (Delta,) = reader.unpack(">q")
        bounds = []
        for _bound in range(2):
            numerator = reader.signed()
            denominator = reader.unsigned()
            if denominator == 0:
                raise MalformedHistogramError("zero denominator in cell bound")
            bounds.append(Fraction(numerator, denominator))
        try:
            mass = Decimal(reader.blob().decode("ascii"))
        except (UnicodeDecodeError, InvalidOperation) as e:
            raise MalformedHistogramError(f"invalid mass field: {e}") from e
        if not bounds[0] < bounds[1] or mass < 0:
            raise MalformedHistogramError(f"invalid cell {bounds} mass={mass}")
        cells.append(
            HistogramCell(Delta=Delta, u_lo=bounds[0], u_hi=bounds[1], mass=mass)
        )

    if reader.pos != len(body):
        raise MalformedHistogramError(f"{len(body) - reader.pos} trailing bytes")

    return Histogram(
        m=m,
        ell=ell,
        r=r,
        d=d,
        B_max=B_max,
        precision_bits=precision_bits,
        cells=tuple(cells),
    )
