"""Utilitaires pour gestion de seed."""

import random

import numpy as np

from indexlab.config import settings


def set_seed(seed: int | None = None) -> None:
    """Configure le seed pour reproductibilité."""
    value = settings.seed if seed is None else seed
    random.seed(value)
    np.random.seed(value)


def make_rng(offset: int = 0) -> np.random.Generator:
    """Générateur numpy déterministe dérivé du seed global."""
    return np.random.default_rng(settings.seed + offset)
