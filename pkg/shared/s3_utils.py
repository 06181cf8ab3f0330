# shared/s3_utils.py
"""Helpers for archiving proof reports in S3."""

from __future__ import annotations

import logging
from typing import Any, Dict

import boto3

logger = logging.getLogger(__name__)

_s3 = None


def _client():
    global _s3
    if _s3 is None:
        _s3 = boto3.client("s3")
    return _s3


def parse_s3_uri(uri: str) -> tuple[str, str]:
    """s3://bucket/key -> (bucket, key)."""
    if not uri.startswith("s3://"):
        raise ValueError(f"not an s3 uri: {uri!r}")
    bucket, _, key = uri[len("s3://") :].partition("/")
    if not bucket or not key:
        raise ValueError(f"s3 uri needs a bucket and a key: {uri!r}")
    return bucket, key


def put_report(bucket: str, key: str, body: bytes, metadata: Dict[str, Any] | None = None) -> None:
    """Store a serialized report in S3 with optional metadata."""
    extra: Dict[str, Any] = {}
    if metadata:
        # S3 metadata must be strings
        extra["Metadata"] = {k: str(v) for k, v in metadata.items()}

    _client().put_object(Bucket=bucket, Key=key, Body=body, **extra)
    logger.info("Report archived", extra={"bucket": bucket, "key": key})


def get_report(bucket: str, key: str) -> bytes:
    """Download and return the report bytes."""
    resp = _client().get_object(Bucket=bucket, Key=key)
    return resp["Body"].read()


def get_report_metadata(bucket: str, key: str) -> Dict[str, str]:
    return _client().head_object(Bucket=bucket, Key=key).get("Metadata", {})
