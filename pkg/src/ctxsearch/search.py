"""The guessing game: losses, feedback, and the knowledge-set update loop.

One round: the learner sees only the current knowledge set and a unit
context u, commits a guess p, and learns whether the hidden value
theta = <u, v> satisfies p <= theta (a "sale").  The knowledge set is then
clipped to the consistent halfspace.  Ties (p exactly equal to theta)
count as sales, which is the loss-free side under pricing loss.

Policies never see v: the round driver computes the truth-dependent
fields only after the guess is committed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Halfspace, Polytope, clip, extent

LOSS_KINDS = ("symmetric", "pricing", "power", "one-sided")


@dataclass(frozen=True)
class LossSpec:
    """Loss family: symmetric |theta-p|, pricing, |theta-p|^beta, or
    one-sided (theta-p)^beta on sales and 1 otherwise."""

    kind: str
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind in ("power", "one-sided"):
            if self.beta is None or self.beta <= 0:
                raise ValueError(f"{self.kind} loss needs beta > 0")


def evaluate_loss(spec: LossSpec, theta: float, p: float) -> float:
    if spec.kind == "symmetric":
        return abs(theta - p)
    if spec.kind == "pricing":
        return theta - p if p <= theta else theta
    if spec.kind == "power":
        return abs(theta - p) ** spec.beta
    # one-sided: discontinuous above, polynomial below
    return (theta - p) ** spec.beta if p <= theta else 1.0


@dataclass(frozen=True)
class Feedback:
    """sale is true iff the guess did not exceed the hidden dot product."""

    sale: bool


@dataclass
class RoundRecord:
    t: int
    context: np.ndarray
    guess: float
    truth_dot: float          # logged for analysis only; never shown to policies
    sale: bool
    loss: float
    width: float
    policy_diagnostics: dict = field(default_factory=dict)


# A policy maps (knowledge set, context) -> guess.  Stateful policies are
# objects with a __call__ of this shape.
Policy = Callable[[Polytope, np.ndarray], float]


def play_round(state: Polytope, v: np.ndarray, u: np.ndarray, t: int,
               policy: Policy, spec: LossSpec) -> tuple[Polytope, RoundRecord]:
    """Run one round and clip the knowledge set on the consistent side."""
    u = np.asarray(u, dtype=np.float64)
    guess = float(policy(state, u))
    diagnostics = dict(getattr(policy, "last_diagnostics", {}) or {})
    theta = float(np.asarray(v, dtype=np.float64) @ u)
    sale = guess <= theta
    if sale:
        new_state = clip(state, Halfspace(-u, -guess))   # keep <u,x> >= p
    else:
        new_state = clip(state, Halfspace(u, guess))     # keep <u,x> <= p
    ext = extent(state, u)
    record = RoundRecord(
        t=t,
        context=u,
        guess=guess,
        truth_dot=theta,
        sale=sale,
        loss=evaluate_loss(spec, theta, guess),
        width=ext.width,
        policy_diagnostics=diagnostics,
    )
    return new_state, record
