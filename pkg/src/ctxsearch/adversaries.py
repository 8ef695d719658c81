"""Instance generators: hidden vectors and context sequences.

All generation is driven by the package's portable counter-based RNG, so
a given (kind, d, T, seed) produces byte-identical instances on any
platform.  Kinds:

* ``fixed``                   - caller supplies v and the contexts.
* ``uniform-random-contexts`` - v uniform in the box (clamped slightly
  off the boundary), contexts uniform on the sphere.
* ``coordinate-cycling``      - contexts cycle through the coordinate
  axes, splitting the game into d independent 1-D games.
* ``subset-instance``         - the hard instance for midpoint cutting:
  v = 0 and each context is the normalized indicator of a random
  (d/4)-subset of the coordinates; requires d divisible by 8.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import PortableRng

INSTANCE_KINDS = ("fixed", "uniform-random-contexts", "coordinate-cycling",
                  "subset-instance")
_BOUNDARY_CLAMP = 1e-6
UNIT_NORM_TOL = 1e-12


class BadDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    d: int
    T: int
    seed: int = 0
    v: tuple | None = None
    contexts: tuple | None = None   # only for kind="fixed"

    def __post_init__(self):
        if self.kind not in INSTANCE_KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.d < 1 or self.T < 1:
            raise ValueError("need d >= 1 and T >= 1")
        if self.kind == "subset-instance" and self.d % 8 != 0:
            raise BadDimensionError(
                f"subset-instance needs d divisible by 8, got {self.d}")
        if self.kind == "fixed":
            if self.v is None or self.contexts is None:
                raise ValueError("fixed instances need explicit v and contexts")
        if self.v is not None:
            arr = np.asarray(self.v, dtype=np.float64)
            if arr.shape != (self.d,) or np.any(arr < 0) or np.any(arr > 1):
                raise ValueError("v must lie in the unit box")


def generate(spec: InstanceSpec) -> tuple[np.ndarray, np.ndarray]:
    """(v, contexts) with contexts of shape (T, d), unit rows."""
    rng = PortableRng(spec.seed)
    if spec.kind == "fixed":
        v = np.asarray(spec.v, dtype=np.float64)
        contexts = np.asarray(spec.contexts, dtype=np.float64)
        if contexts.shape != (spec.T, spec.d):
            raise ValueError("contexts must have shape (T, d)")
    elif spec.kind == "uniform-random-contexts":
        if spec.v is not None:
            v = np.asarray(spec.v, dtype=np.float64)
        else:
            v = rng.uniform(spec.d)
            v = np.clip(v, _BOUNDARY_CLAMP, 1.0 - _BOUNDARY_CLAMP)
        contexts = rng.unit_vectors(spec.T, spec.d)
    elif spec.kind == "coordinate-cycling":
        if spec.v is not None:
            v = np.asarray(spec.v, dtype=np.float64)
        else:
            v = rng.uniform(spec.d)
            v = np.clip(v, _BOUNDARY_CLAMP, 1.0 - _BOUNDARY_CLAMP)
        contexts = np.zeros((spec.T, spec.d))
        for t in range(spec.T):
            contexts[t, t % spec.d] = 1.0
    else:  # subset-instance
        v = np.zeros(spec.d)
        k = spec.d // 4
        scale = 1.0 / np.sqrt(k)
        contexts = np.zeros((spec.T, spec.d))
        for t in range(spec.T):
            idx = rng.subset(spec.d, k)
            contexts[t, idx] = scale
    norms = np.linalg.norm(contexts, axis=1)
    bad = np.abs(norms - 1.0) > UNIT_NORM_TOL
    if np.any(bad):
        contexts = contexts / norms[:, None]
    return v, contexts


def subset_overlap_fraction(spec: InstanceSpec, limit: int = 200) -> float:
    """Fraction of context pairs s < t <= limit with coordinate overlap
    at most d/8; a sanity statistic for the hard instance."""
    if spec.kind != "subset-instance":
        raise ValueError("overlap statistic applies to subset instances")
    _, contexts = generate(spec)
    supp = contexts[:limit] > 0
    n = len(supp)
    good = 0
    total = 0
    cap = spec.d // 8
    inter = supp.astype(np.int64) @ supp.astype(np.int64).T
    for s in range(n):
        for t in range(s + 1, n):
            total += 1
            if inter[s, t] <= cap:
                good += 1
    return good / max(total, 1)


def instance_to_json_dict(spec: InstanceSpec) -> dict:
    """Replay-ready export: the spec plus the realized instance."""
    v, contexts = generate(spec)
    return {
        "kind": spec.kind,
        "d": spec.d,
        "T": spec.T,
        "seed": spec.seed,
        "v": v.tolist(),
        "contexts": contexts.tolist(),
    }
