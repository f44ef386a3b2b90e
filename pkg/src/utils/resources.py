import os
import time
from contextlib import contextmanager
from typing import Iterator

import psutil


def rss_mib() -> float:
    return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)


@contextmanager
def measured(into: dict) -> Iterator[dict]:
    start = time.perf_counter()
    try:
        yield into
    finally:
        into["seconds"] = round(time.perf_counter() - start, 3)
        into["rss_mib"] = round(rss_mib(), 1)
