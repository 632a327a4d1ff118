"""Slicing ramps: the piecewise-linear cut profile and its smooth approximant.

gamma_h is the normalized two-kink ramp rising from 0 to 1 across a window of
width h.  smooth_ramp is its mollification: the steeper clamp with plateau
margin eps is convolved with a polynomial bump of width eps, evaluated in
closed form so that support, slopes, and the Lipschitz constant are exact
rational statements rather than quadrature output.

The bump is (15/(16 eps)) (1 - (u/eps)^2)^2 on [-eps, eps]: C^1, unit mass,
even.  The convolution is therefore C^2, identically 0 left of the window,
identically 1 right of it, with derivative supported in the open window.  Its
maximal slope is exactly 1/(h - 2 eps) whenever eps <= h/4 (the bump then
fits inside the linear stretch); as eps shrinks the smooth ramp converges
uniformly to gamma_h and the slope tends to 1/h.

Everything here computes over Fraction; callers may pass ints, floats, or
Fractions and floats are converted exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class SlicingProfile:
    """Cut location t, window width h > 0, mollification radius 0 < eps < h/2.

    eps defaults to h/4, the largest radius for which the smooth ramp still
    attains the full clamp slope.
    """

    t: Fraction
    h: Fraction
    eps: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "h", Fraction(self.h))
        if self.h <= 0:
            raise ValueError(f"window width must be positive, got {self.h}")
        eps = self.h / 4 if self.eps is None else Fraction(self.eps)
        if not 0 < eps < self.h / 2:
            raise ValueError(f"mollification radius must lie in (0, {self.h}/2), got {eps}")
        object.__setattr__(self, "eps", eps)


def gamma_h(s, profile: SlicingProfile) -> Fraction:
    """(|s - t| - |s - (t+h)| + h) / (2h): 0 left of the window, 1 right of
    it, linear with slope 1/h inside."""
    s = Fraction(s)
    t, h = profile.t, profile.h
    return (abs(s - t) - abs(s - (t + h)) + h) / (2 * h)


def _clamp(x: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return lo if x < lo else hi if x > hi else x


def _bump_mass(x: Fraction, eps: Fraction) -> Fraction:
    # integral of the bump from -eps to x, for x in [-eps, eps]
    v = x / eps
    return Fraction(15, 16) * (v - 2 * v**3 / 3 + v**5 / 5) + Fraction(1, 2)


def _bump_moment(x: Fraction, eps: Fraction) -> Fraction:
    # integral of u * bump(u) from -eps to x
    v = x / eps
    return Fraction(-5, 32) * eps * (1 - v * v) ** 3


def _ramp_pieces(s: Fraction, profile: SlicingProfile):
    # convolution window endpoints against the clamp with corners a < b
    a = profile.t + profile.eps
    b = profile.t + profile.h - profile.eps
    lo = _clamp(s - b, -profile.eps, profile.eps)
    hi = _clamp(s - a, -profile.eps, profile.eps)
    return a, b - a, lo, hi


def smooth_ramp(s, profile: SlicingProfile) -> Fraction:
    """Closed-form convolution of the margin-eps clamp with the bump."""
    s = Fraction(s)
    a, width, lo, hi = _ramp_pieces(s, profile)
    mass_lo, mass_hi = _bump_mass(lo, profile.eps), _bump_mass(hi, profile.eps)
    moment = _bump_moment(hi, profile.eps) - _bump_moment(lo, profile.eps)
    return mass_lo + ((s - a) * (mass_hi - mass_lo) - moment) / width


def smooth_ramp_derivative(s, profile: SlicingProfile) -> Fraction:
    """Exact derivative of smooth_ramp: bump mass seen by the sloped stretch,
    divided by its width.  Identically 0 outside (t, t+h)."""
    s = Fraction(s)
    _, width, lo, hi = _ramp_pieces(s, profile)
    return (_bump_mass(hi, profile.eps) - _bump_mass(lo, profile.eps)) / width


def lipschitz_estimate(fn, interval, samples: int, seed: int = 0) -> Fraction:
    """Max slope |fn(s1)-fn(s2)| / |s1-s2| over a uniform grid's adjacent
    pairs plus seeded random pairs; a lower bound on the true constant."""
    if samples < 2:
        raise ValueError("need at least two samples")
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    if hi <= lo:
        raise ValueError("interval must have positive length")
    grid = [lo + (hi - lo) * k / (samples - 1) for k in range(samples)]
    values = [fn(s) for s in grid]
    best = Fraction(0)
    for (s1, v1), (s2, v2) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        best = max(best, abs(v2 - v1) / (s2 - s1))
    rng = random.Random(seed)
    denom = 4 * samples
    for _ in range(samples):
        s1 = lo + (hi - lo) * Fraction(rng.randint(0, denom), denom)
        s2 = lo + (hi - lo) * Fraction(rng.randint(0, denom), denom)
        if s1 == s2:
            continue
        best = max(best, abs(fn(s1) - fn(s2)) / abs(s1 - s2))
    return best
