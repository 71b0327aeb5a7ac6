import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fedscore.core import LabelSpace, ScoreMatrix
from fedscore.errors import PayloadError
from fedscore.exchange import (MAGIC, PayloadAccount, account_payload, decode_score_payload,
                               encode_score_payload, payload_size)
from tests.utils import ANIMALS, animals, random_scores

SPACE = LabelSpace(ANIMALS)


@st.composite
def score_matrices(draw):
    cols = draw(st.lists(st.sampled_from(ANIMALS), min_size=1, max_size=4, unique=True))
    rows = draw(st.integers(0, 12))
    values = draw(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=rows * len(cols),
                           max_size=rows * len(cols)))
    cols = SPACE.ordered(cols)
    return ScoreMatrix(np.array(values, dtype=np.float64).reshape(rows, len(cols)), cols, SPACE)


@given(score_matrices())
def test_decoded_scores_are_the_float32_quantisation(scores):
    payload = encode_score_payload(scores)
    assert len(payload) == payload_size(scores.rows, len(scores.cols))
    decoded = decode_score_payload(payload, SPACE)
    assert decoded.cols == scores.cols
    assert np.array_equal(decoded.values, scores.values.astype(np.float32).astype(np.float64))


def test_two_label_public_set_payload_size(animals):
    scores = random_scores(np.random.default_rng(0), 2000, animals, ("cat", "dog"))
    payload = encode_score_payload(scores)
    assert len(payload) == payload_size(2000, 2) == 16016
    magic, version, rows, cols = struct.unpack_from("<4sHIH", payload)
    assert (magic, version, rows, cols) == (MAGIC, 1, 2000, 2)
    assert payload[12:16] == b"\x00\x01\x00\x00"


def test_padding_keeps_values_aligned():
    for cols in range(1, 9):
        header = payload_size(0, cols)
        assert header % 4 == 0
        assert header - 12 - cols < 4


def _payload() -> bytearray:
    return bytearray(encode_score_payload(ScoreMatrix(np.full((2, 2), 0.5), ("cat", "dog"), SPACE)))


@pytest.mark.parametrize("corrupt", [
    lambda p: p[:8],
    lambda p: p[:-1],
    lambda p: p + b"\x00",
    lambda p: b"XXXX" + p[4:],
    lambda p: p[:4] + b"\x02\x00" + p[6:],
    lambda p: p[:13] + b"\x09" + p[14:],
])
def test_malformed_payloads_are_rejected(corrupt):
    with pytest.raises(PayloadError):
        decode_score_payload(bytes(corrupt(_payload())), SPACE)


@pytest.mark.parametrize("indices", [b"\x01\x00", b"\x01\x01"])
def test_column_indices_must_be_strictly_increasing(indices):
    payload = _payload()
    payload[12:14] = indices
    with pytest.raises(PayloadError, match="strictly increasing"):
        decode_score_payload(bytes(payload), SPACE)


def test_header_without_columns_is_rejected():
    with pytest.raises(PayloadError, match="no columns"):
        decode_score_payload(struct.pack("<4sHIH", MAGIC, 1, 0, 0), SPACE)


def test_non_finite_scores_are_rejected():
    payload = _payload()
    payload[16:20] = struct.pack("<f", float("nan"))
    with pytest.raises(PayloadError, match="non-finite"):
        decode_score_payload(bytes(payload), SPACE)


def test_account_payload_compares_scores_with_weights(animals):
    scores = random_scores(np.random.default_rng(1), 2000, animals, ("cat", "dog"))
    account = account_payload("user_1", 3, scores, parameter_count=4106)
    assert account == PayloadAccount("user_1", 3, 16016, 16424)
    assert account.ratio == pytest.approx(16016 / 16424)
    with pytest.raises(ValueError):
        account_payload("user_1", 3, scores, parameter_count=0)
