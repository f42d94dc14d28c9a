"""Instance (de)serialization.

Text format: a header line ``CQK1 <n>`` followed by the values of
d, a, b, l, u (n each) and finally r, whitespace separated, with
infinities spelled ``inf``/``-inf``; or ``SPX1 <n> <r>`` followed by
the n values of y.

Binary format: magic ``CQKB`` or ``SPXB``, the length n as a 64-bit
little-endian unsigned integer, then raw little-endian float64 values
in the same field order (r last for CQK, r first for SPX).  The
binary round-trip is bit-exact.
"""

import struct

import numpy as np

from .core import CqkInstance, SimplexInstance

__all__ = ["write_instance", "read_instance", "FormatError"]

_CQK_MAGIC = b"CQKB"
_SPX_MAGIC = b"SPXB"


class FormatError(ValueError):
    """Unrecognized or corrupt instance file."""


def _fmt(v):
    if v == np.inf:
        return "inf"
    if v == -np.inf:
        return "-inf"
    return f"{v:.17g}"


def write_instance(path, inst, binary=False):
    if isinstance(inst, CqkInstance):
        _write_cqk(path, inst, binary)
    elif isinstance(inst, SimplexInstance):
        _write_spx(path, inst, binary)
    else:
        raise TypeError(f"cannot serialize {type(inst).__name__}")


def _write_cqk(path, inst, binary):
    n = inst.n
    if binary:
        with open(path, "wb") as fh:
            fh.write(_CQK_MAGIC)
            fh.write(struct.pack("<Q", n))
            for arr in (inst.d, inst.a, inst.b, inst.l, inst.u):
                fh.write(arr.astype("<f8").tobytes())
            fh.write(struct.pack("<d", float(inst.r)))
    else:
        with open(path, "w") as fh:
            fh.write(f"CQK1 {n}\n")
            for arr in (inst.d, inst.a, inst.b, inst.l, inst.u):
                fh.write(" ".join(_fmt(v) for v in arr))
                fh.write("\n")
            fh.write(_fmt(float(inst.r)) + "\n")


def _write_spx(path, inst, binary):
    n = inst.n
    if binary:
        with open(path, "wb") as fh:
            fh.write(_SPX_MAGIC)
            fh.write(struct.pack("<Q", n))
            fh.write(struct.pack("<d", float(inst.r)))
            fh.write(inst.y.astype("<f8").tobytes())
    else:
        with open(path, "w") as fh:
            fh.write(f"SPX1 {n} {_fmt(float(inst.r))}\n")
            fh.write(" ".join(_fmt(v) for v in inst.y))
            fh.write("\n")


def read_instance(path, dtype=np.float64):
    """Read either format, sniffing text header or binary magic."""
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head == _CQK_MAGIC:
            (n,) = struct.unpack("<Q", fh.read(8))
            body = np.frombuffer(fh.read(5 * n * 8), dtype="<f8")
            if body.size != 5 * n:
                raise FormatError("truncated CQKB payload")
            (r,) = struct.unpack("<d", fh.read(8))
            d, a, b, l, u = (body[i * n:(i + 1) * n].copy() for i in range(5))
            return CqkInstance(d=d.astype(dtype), a=a.astype(dtype),
                               b=b.astype(dtype), l=l.astype(dtype),
                               u=u.astype(dtype), r=r)
        if head == _SPX_MAGIC:
            (n,) = struct.unpack("<Q", fh.read(8))
            (r,) = struct.unpack("<d", fh.read(8))
            y = np.frombuffer(fh.read(n * 8), dtype="<f8")
            if y.size != n:
                raise FormatError("truncated SPXB payload")
            return SimplexInstance(y=y.copy().astype(dtype), r=r)
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise FormatError("empty instance file")
    kind = tokens[0]
    if kind == "CQK1":
        n = int(tokens[1])
        vals = np.array([float(t) for t in tokens[2:]])
        if vals.size != 5 * n + 1:
            raise FormatError(f"expected {5 * n + 1} values, got {vals.size}")
        d, a, b, l, u = (vals[i * n:(i + 1) * n] for i in range(5))
        return CqkInstance(d=d.astype(dtype), a=a.astype(dtype),
                           b=b.astype(dtype), l=l.astype(dtype),
                           u=u.astype(dtype), r=float(vals[-1]))
    if kind == "SPX1":
        n = int(tokens[1])
        r = float(tokens[2])
        y = np.array([float(t) for t in tokens[3:]])
        if y.size != n:
            raise FormatError(f"expected {n} values, got {y.size}")
        return SimplexInstance(y=y.astype(dtype), r=r)
    raise FormatError(f"unknown instance header {kind!r}")
