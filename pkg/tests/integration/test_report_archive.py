"""
Integration test for report archiving in S3 (moto).

Goal:
- put_report stores the body with string metadata.
- get_report / get_report_metadata read it back.
- parse_s3_uri splits bucket and key and rejects anything else.
"""
import boto3
import pytest
from moto import mock_aws

from shared import s3_utils

BUCKET = "proof-reports"


@pytest.fixture
def s3_bucket(monkeypatch):
    monkeypatch.setenv("AWS_DEFAULT_REGION", "us-east-1")
    monkeypatch.setenv("AWS_ACCESS_KEY_ID", "testing")
    monkeypatch.setenv("AWS_SECRET_ACCESS_KEY", "testing")
    with mock_aws():
        boto3.client("s3", region_name="us-east-1").create_bucket(Bucket=BUCKET)
        # the helper caches its client; build a fresh one inside the mock
        monkeypatch.setattr(s3_utils, "_s3", None)
        yield BUCKET


def test_report_round_trip_with_metadata(s3_bucket):
    """Metadata values come back as strings."""
    body = b'{"verdict": "Theorem 1.1 constants: VERIFIED"}'
    s3_utils.put_report(s3_bucket, "reports/C4.json", body, {"verdict": "VERIFIED", "boxes": 12})

    assert s3_utils.get_report(s3_bucket, "reports/C4.json") == body
    assert s3_utils.get_report_metadata(s3_bucket, "reports/C4.json") == {"verdict": "VERIFIED", "boxes": "12"}


def test_report_without_metadata(s3_bucket):
    """A report stored without metadata reads back an empty mapping."""
    s3_utils.put_report(s3_bucket, "reports/plain.json", b"{}")
    assert s3_utils.get_report_metadata(s3_bucket, "reports/plain.json") == {}


def test_parse_s3_uri():
    """Only s3://bucket/key URIs are accepted."""
    assert s3_utils.parse_s3_uri("s3://proof-reports/reports/C1-C2.json") == ("proof-reports", "reports/C1-C2.json")
    for bad in ("proof-reports/key", "s3://proof-reports", "s3:///key"):
        with pytest.raises(ValueError):
            s3_utils.parse_s3_uri(bad)
