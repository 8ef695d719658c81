"""Portable seeded randomness for reproducible instances and estimators.

All randomness in this package flows through :class:`PortableRng`, a thin
wrapper over the Philox4x64-10 counter-based generator (Salmon et al.,
"Parallel random numbers: as easy as 1, 2, 3"; the same construction ships
in the Random123 C library and in NumPy as ``np.random.Philox``).  Derived
quantities are computed from the raw 64-bit word stream with fixed,
documented recipes so that a given seed yields byte-identical streams on
any platform:

* ``uniform``: take the top 53 bits of a word, scale by 2**-53.
* ``normal``: Box-Muller on consecutive uniform pairs (first word maps to
  the radius, second to the angle).
* ``integers_below(n)``: rejection sampling on raw words below the largest
  multiple of n, then modulo n.
* ``subset(n, k)``: partial Fisher-Yates shuffle of range(n) driven by
  ``integers_below``, taking the first k entries (sorted).

Golden test vectors for seeds 0 and 42 are pinned in the test suite.
"""

from __future__ import annotations

import math

import numpy as np

_U64 = np.uint64
_TWO53 = float(1 << 53)


class PortableRng:
    """Deterministic stream of doubles/integers keyed by a 64-bit seed."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        self.seed = int(seed)
        self._bitgen = np.random.Philox(key=self.seed)

    def spawn(self, stream: int) -> "PortableRng":
        """Independent substream; keyed by a fixed mix of seed and index."""
        # splitmix64-style finalizer keeps substream keys well separated.
        z = (self.seed + 0x9E3779B97F4A7C15 * (stream + 1)) & (2**64 - 1)
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & (2**64 - 1)
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & (2**64 - 1)
        return PortableRng(z ^ (z >> 31))

    def raw(self, n: int) -> np.ndarray:
        return np.asarray(self._bitgen.random_raw(n), dtype=_U64)

    def uniform(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1)."""
        return (self.raw(n) >> _U64(11)).astype(np.float64) / _TWO53

    def normal(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller on uniform pairs."""
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        # shift u1 into (0, 1] so log() is finite
        u1 = 1.0 - u[:m]
        u2 = u[m:]
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return z[:n]

    def integer_below(self, n: int) -> int:
        """One integer uniform on {0, .., n-1} by rejection on raw words."""
        if n <= 0:
            raise ValueError("n must be positive")
        bound = (2**64 // n) * n
        while True:
            w = int(self.raw(1)[0])
            if w < bound:
                return w % n

    def subset(self, n: int, k: int) -> np.ndarray:
        """Sorted uniform k-subset of range(n) via partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = list(range(n))
        for i in range(k):
            j = i + self.integer_below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.array(sorted(pool[:k]), dtype=np.int64)

    def unit_vector(self, d: int) -> np.ndarray:
        """Uniform point on the unit sphere (normalized Gaussian draw)."""
        while True:
            g = self.normal(d)
            norm = float(np.linalg.norm(g))
            if norm > 1e-12:
                return g / norm

    def unit_vectors(self, m: int, d: int) -> np.ndarray:
        """m rows of uniform unit vectors in R^d."""
        g = self.normal(m * d).reshape(m, d)
        norms = np.linalg.norm(g, axis=1)
        bad = norms <= 1e-12
        while np.any(bad):
            g[bad] = self.normal(int(bad.sum()) * d).reshape(-1, d)
            norms = np.linalg.norm(g, axis=1)
            bad = norms <= 1e-12
        return g / norms[:, None]

    def orthonormal_subspace(self, d: int, j: int) -> np.ndarray:
        """(j, d) orthonormal basis of a rotation-invariant j-subspace.

        Gaussian matrix + QR, redrawn when the draw is near-degenerate;
        this is the standard construction of the rotation-invariant
        distribution on j-dimensional subspaces.
        """
        if not 1 <= j <= d:
            raise ValueError("need 1 <= j <= d")
        while True:
            g = self.normal(d * j).reshape(d, j)
            q, r = np.linalg.qr(g)
            diag = np.abs(np.diag(r))
            if np.all(diag > 1e-8):
                return q.T.copy()
