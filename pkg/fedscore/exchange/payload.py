"""Wire format for the score matrices clients send to the coordinator.

Layout, little-endian throughout::

    magic   4 bytes  b"FSCR"
    version u16
    rows    u32
    cols    u16
    cols x u8 label-space column indices
    zero padding up to a 4-byte boundary
    rows * cols float32 values, row-major
"""

import struct
from dataclasses import dataclass

import numpy as np

from fedscore.core import LabelSpace, ScoreMatrix
from fedscore.errors import PayloadError

MAGIC = b"FSCR"
VERSION = 1
BYTES_PER_WEIGHT = 4

_HEADER = struct.Struct("<4sHIH")


def _padding(cols: int) -> int:
    return -(_HEADER.size + cols) % 4


def payload_size(rows: int, cols: int) -> int:
    return _HEADER.size + cols + _padding(cols) + 4 * rows * cols


def encode_score_payload(scores: ScoreMatrix) -> bytes:
    indices = scores.col_indices
    if max(indices) > 0xFF:
        raise PayloadError(f"column index {max(indices)} does not fit in one byte")
    if scores.rows > 0xFFFFFFFF:
        raise PayloadError(f"{scores.rows} rows do not fit in a u32")
    parts = [
        _HEADER.pack(MAGIC, VERSION, scores.rows, len(indices)),
        bytes(indices),
        b"\x00" * _padding(len(indices)),
        scores.values.astype("<f4").tobytes(order="C"),
    ]
    return b"".join(parts)


def decode_score_payload(payload: bytes, label_space: LabelSpace) -> ScoreMatrix:
    """Inverse of encode_score_payload; values come back float32-quantised."""
    if len(payload) < _HEADER.size:
        raise PayloadError(f"payload of {len(payload)} bytes is shorter than the header")
    magic, version, rows, cols = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise PayloadError(f"bad magic {magic!r}")
    if version != VERSION:
        raise PayloadError(f"unsupported payload version {version}")
    expected = payload_size(rows, cols)
    if len(payload) != expected:
        raise PayloadError(f"payload is {len(payload)} bytes, header implies {expected}")

    indices = payload[_HEADER.size:_HEADER.size + cols]
    if cols == 0:
        raise PayloadError("payload carries no columns")
    if any(k >= len(label_space) for k in indices):
        raise PayloadError(f"column index outside a label space of {len(label_space)}")
    if any(a >= b for a, b in zip(indices, indices[1:])):
        raise PayloadError(f"column indices {list(indices)} are not strictly increasing")
    labels = tuple(label_space.labels[k] for k in indices)
    start = _HEADER.size + cols + _padding(cols)
    if rows == 0:
        return ScoreMatrix(np.zeros((0, cols)), labels, label_space)
    values = np.frombuffer(payload, dtype="<f4", count=rows * cols, offset=start)
    if not np.all(np.isfinite(values)):
        raise PayloadError("payload carries non-finite scores")
    return ScoreMatrix(values.astype(np.float64).reshape(rows, cols), labels, label_space)


@dataclass(frozen=True)
class PayloadAccount:
    """Bytes one client would send per iteration: scores versus full weights."""

    client: str
    iteration: int
    score_payload_bytes: int
    weight_payload_bytes: int

    @property
    def ratio(self) -> float:
        return self.score_payload_bytes / self.weight_payload_bytes


def account_payload(client: str, iteration: int, scores: ScoreMatrix, parameter_count: int) -> PayloadAccount:
    if parameter_count < 1:
        raise ValueError(f"parameter_count must be >= 1, got {parameter_count}")
    return PayloadAccount(
        client=client,
        iteration=iteration,
        score_payload_bytes=len(encode_score_payload(scores)),
        weight_payload_bytes=BYTES_PER_WEIGHT * parameter_count,
    )
