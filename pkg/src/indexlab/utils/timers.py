"""Utilitaires pour mesure de temps."""

import time
from collections.abc import Generator
from contextlib import contextmanager

from indexlab.logging_conf import get_logger

logger = get_logger(__name__)


@contextmanager
def timer(name: str) -> Generator[None, None, None]:
    """Context manager pour mesurer le temps d'exécution (journalisé en DEBUG)."""
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    logger.debug(f"[TIMER] {name}: {elapsed:.4f}s", extra={"timer": name, "elapsed_s": elapsed})
