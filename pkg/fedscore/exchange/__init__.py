from .payload import (MAGIC, PayloadAccount, account_payload, decode_score_payload,
                      encode_score_payload, payload_size)

__all__ = [
    "MAGIC",
    "PayloadAccount",
    "account_payload",
    "decode_score_payload",
    "encode_score_payload",
    "payload_size",
]
