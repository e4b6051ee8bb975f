#!/usr/bin/env python3
"""Writes the golden files read by test_codec and the acceptance suite.

Independent of the C++ code: only struct and zlib. Re-run to regenerate;
the outputs are committed and must not change.
"""
import os
import struct
import zlib

HERE = os.path.dirname(os.path.abspath(__file__))


def dims_bytes(dims):
    return struct.pack("<B", len(dims)) + b"".join(struct.pack("<Q", d) for d in dims)


def field(dims, dtype, values):
    fmt = {1: "<f", 2: "<d", 3: "<Q"}[dtype]
    body = b"".join(struct.pack(fmt, v) for v in values)
    return b"PMSZF\0" + struct.pack("<BB", 1, dtype) + dims_bytes(dims) + body


def varint(n):
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        out.append(b | (0x80 if n else 0))
        if not n:
            return bytes(out)


def edits(ids, values, xi, tau):
    payload = bytearray()
    prev = 0
    for i in ids:
        payload += varint(i - prev)
        prev = i
    for v in values:
        payload += struct.pack("<d", v)
    head = b"PMSZE\0" + struct.pack("<BddQ", 1, xi, tau, len(ids))
    return head + bytes(payload) + struct.pack("<I", zlib.crc32(bytes(payload)) & 0xFFFFFFFF)


def payload(dims, origin, xi, width, codes):
    bits = 0
    for k, c in enumerate(codes):
        bits |= c << (k * width)
    nbytes = (len(codes) * width + 7) // 8
    return (b"PMSZQ\0" + struct.pack("<B", 1) + dims_bytes(dims) +
            struct.pack("<ddB", origin, xi, width) + bits.to_bytes(nbytes, "little"))


FILES = {
    "field_3x3_f64.bin": field([3, 3], 2, [0.5 * i - 1.25 for i in range(9)]),
    "field_4x3x2_f32.bin": field([4, 3, 2], 1, [0.25 * i * (-1) ** i for i in range(24)]),
    "edits_small.bin": edits([5, 9, 300], [1.0, 2.0, -0.125], 0.5, 0.5 / 1024),
    "edits_empty.bin": edits([], [], 0.1, 0.1 / 1024),
    "labels_3x3.bin": field([3, 3], 3, [0, 0, 2, 0, 4, 2, 6, 4, 8]),
    "payload_3x2.bin": payload([3, 2], -1.0, 0.25, 3, [0, 1, 2, 3, 4, 5]),
}

if __name__ == "__main__":
    for name, data in FILES.items():
        with open(os.path.join(HERE, name), "wb") as fh:
            fh.write(data)
