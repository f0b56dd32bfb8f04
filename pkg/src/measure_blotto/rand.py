"""Seedable random streams and the Beta(a, 1), Gamma and Dirichlet samplers."""
from __future__ import annotations

import numpy as np

from .errors import NonPositiveShape, PlayerCountTooSmall

_MASK64 = (1 << 64) - 1


class RngStream:
    """A reproducible random stream identified by ``(seed, stream)``.

    Child streams from :meth:`split` extend the spawn key, so players,
    shards and probes each get an independent generator whose output depends
    only on the seed and the path of ids that led to it.
    """

    __slots__ = ("seed", "key", "generator")

    def __init__(self, seed: int, stream: int | tuple[int, ...] = 0):
        key = (stream,) if isinstance(stream, int) else tuple(stream)
        self.seed = int(seed) & _MASK64
        self.key = tuple(int(s) & _MASK64 for s in key)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    @property
    def stream(self) -> int:
        return self.key[0]

    def split(self, i: int) -> "RngStream":
        return RngStream(self.seed, self.key + (int(i),))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key})"


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def beta_a1_from_uniform(a: float, u):
    """Inverse transform for Beta(a, 1), whose CDF is ``x**a``."""
    if not a > 0:
        raise NonPositiveShape(f"Beta shape must be positive, got {a!r}")
    return np.power(u, 1.0 / a)


def sample_beta_a1(a: float, rng, size=None):
    if not a > 0:
        raise NonPositiveShape(f"Beta shape must be positive, got {a!r}")
    return beta_a1_from_uniform(a, as_generator(rng).random(size))


def sample_gamma(shape: float, rng, size=None):
    """Gamma(shape, 1) variates.

    numpy's generator uses rejection sampling for ``shape < 1`` and
    Marsaglia-Tsang otherwise; both are exact.
    """
    if not shape > 0:
        raise NonPositiveShape(f"Gamma shape must be positive, got {shape!r}")
    return as_generator(rng).standard_gamma(shape, size)


def sample_dirichlet(alpha: float, k: int, rng, size: int | None = None) -> np.ndarray:
    """Symmetric Dir(alpha, ..., alpha) draws by normalizing Gamma variates.

    Returns shape ``(k,)``, or ``(size, k)`` when ``size`` is given.  A row
    whose Gamma variates all underflow to zero is redrawn.
    """
    if not alpha > 0:
        raise NonPositiveShape(f"Dirichlet concentration must be positive, got {alpha!r}")
    if k < 2:
        raise PlayerCountTooSmall(f"Dirichlet needs at least 2 components, got {k}")
    gen = as_generator(rng)
    rows = 1 if size is None else int(size)
    y = gen.standard_gamma(alpha, (rows, k))
    s = y.sum(axis=1)
    dead = s == 0
    while dead.any():
        y[dead] = gen.standard_gamma(alpha, (int(dead.sum()), k))
        s[dead] = y[dead].sum(axis=1)
        dead = s == 0
    x = y / s[:, None]
    return x[0] if size is None else x
