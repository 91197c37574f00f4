"""Thread-count control for the few places that fan work out."""

import os


def thread_cap(default: int | None = None) -> int:
    """Number of worker threads to use.

    Honors the APSPEC_THREADS environment variable when it parses as a
    positive integer; otherwise falls back to `default` or the CPU count.
    """
    raw = os.environ.get("APSPEC_THREADS", "")
    try:
        n = int(raw)
        if n >= 1:
            return n
    except ValueError:
        pass
    if default is not None and default >= 1:
        return default
    return os.cpu_count() or 1
