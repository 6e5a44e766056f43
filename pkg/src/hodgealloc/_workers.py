"""Worker-count policy for the optionally parallel operations."""

from __future__ import annotations

import os

ENV_VAR = "HODGE_ALLOC_THREADS"


def worker_cap(requested: int | None = None) -> int:
    """Resolve the number of workers to use.

    Explicit argument wins, then the HODGE_ALLOC_THREADS environment
    variable, then 1 (sequential). Results never depend on this value;
    it only bounds concurrency.
    """
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return 1
