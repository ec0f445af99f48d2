"""FFT entry point honoring the thread-count environment variable.

All spectral work funnels through these wrappers so that
``LEVYFIELD_THREADS`` is the single knob for internal parallelism.  The
transforms are deterministic for a fixed input regardless of the worker
count.
"""

from __future__ import annotations

import os

import scipy.fft as _sfft

__all__ = ["fftn", "ifftn", "worker_count"]


def worker_count() -> int:
    raw = os.environ.get("LEVYFIELD_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def fftn(values):
    return _sfft.fftn(values, workers=worker_count())


def ifftn(values):
    return _sfft.ifftn(values, workers=worker_count())
