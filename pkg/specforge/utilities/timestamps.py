from datetime import datetime, timezone


def utc_timestamp():
    """Current UTC time as an ISO 8601 string with second precision."""
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


def fixed_clock(value='2000-01-01T00:00:00+00:00'):
    """Clock that always returns value, for reproducible artifacts."""
    return lambda: value
