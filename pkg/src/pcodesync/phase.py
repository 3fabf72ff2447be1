"""Circle arithmetic and the desynchronization phase response.

Phases live on the unit circle, represented canonically in the half-open
interval [0, 2*pi). A pulse received at phase phi shifts the listener by

    F(phi) = -l * (phi - 2*pi/n)    for 0 <= phi < 2*pi/n
    F(phi) = 0                      for 2*pi/n <= phi

with coupling strength 0 < l < 1, so the post-pulse phase on the active
branch is (1 - l)*phi + l*(2*pi/n): a contraction toward the slot width
2*pi/n with ratio (1 - l). The interval [0, 2*pi/n) where the response is
nonzero is the effective interval; outside it a pulse leaves the listener
untouched, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi

# A phase angle is a plain float holding the canonical representative.
PhaseAngle = float


def canonicalize(raw: float) -> PhaseAngle:
    """Map an angle in radians to its canonical representative in [0, 2*pi).

    Non-finite input is rejected. The wrap point 2*pi collapses to 0, as
    does a negative angle so close to a multiple of 2*pi that the sign
    fixup rounds back onto the wrap point (fmod itself is exact).
    """
    if not math.isfinite(raw):
        raise ValueError(f"phase must be finite, got {raw!r}")
    r = math.fmod(raw, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


def forward_diff(a: PhaseAngle, b: PhaseAngle) -> float:
    """Forward circular difference (a - b) mod 2*pi, in [0, 2*pi)."""
    return canonicalize(a - b)


@dataclass(frozen=True)
class PrcConfig:
    """Response parameters for a network of n oscillators.

    slot is the target neighbor gap 2*pi/n. It is computed once here so
    that every branch decision and every update uses the identical
    constant; recomputing it at each call site could round differently
    and make the classifier disagree with the update.
    """

    n: int
    l: float
    slot: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not (0.0 < self.l < 1.0) or not math.isfinite(self.l):
            raise ValueError(f"l must lie in the open interval (0, 1), got {self.l!r}")
        object.__setattr__(self, "slot", TWO_PI / self.n)


def prc_response(phi: PhaseAngle, cfg: PrcConfig) -> float:
    """Phase shift induced by a pulse received at phase phi.

    Non-negative, at most l*slot (attained at phi = 0), zero on
    [slot, 2*pi). Both branches agree at the slot boundary, so the
    response is continuous there.
    """
    if phi < cfg.slot:
        return cfg.l * (cfg.slot - phi)
    return 0.0


def apply_prc(phi: PhaseAngle, cfg: PrcConfig) -> PhaseAngle:
    """Post-pulse phase: (1 - l)*phi + l*slot below the slot, identity above.

    The active branch is monotone in phi and maps the effective interval
    into itself, so a pulse never reorders listeners and never pushes one
    to the firing point. Repeated application converges to the slot
    geometrically with ratio (1 - l).
    """
    if phi < cfg.slot:
        return (1.0 - cfg.l) * phi + cfg.l * cfg.slot
    return phi
