"""The radial-stretch quasi-conformal map phi_alpha(z) = z^alpha zbar^(alpha-1).

In polar form the map is r e^{i theta} -> r^(2 alpha - 1) e^{i theta}: angles
pass through untouched, so removed arc stacks keep their angular data while
their radii move from r^k to (r^(2 alpha - 1))^k.  The dilatation is the
constant L = 1/(2 alpha - 1), which transports completeness questions between
parameter points of the slit-disc family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .geometry import ParamRT
from .numerics import Real, is_exact, pow_maybe_exact
from .wiener import Classification, classify_domain


@dataclass(frozen=True)
class QCParams:
    alpha: Real

    def __post_init__(self) -> None:
        limit = Fraction(1, 2) if is_exact(self.alpha) else 0.5
        if not (self.alpha > limit):
            raise ValueError("alpha must exceed 1/2 strictly (the map collapses moduli at 1/2)")

    @property
    def exponent(self) -> Real:
        """The radial power 2 alpha - 1."""
        if is_exact(self.alpha):
            return 2 * Fraction(self.alpha) - 1
        return 2.0 * float(self.alpha) - 1.0


class BeltramiData(NamedTuple):
    f_z: complex
    f_zbar: complex
    ratio: Real  # |f_zbar| / |f_z| = |alpha - 1| / alpha, constant in z


def apply(alpha: QCParams, z: complex) -> complex:
    """phi_alpha(z); the origin maps to itself by continuity.

    Computed as z * |z|^(2 alpha - 2): multiplying by a positive real keeps
    the argument exactly, and alpha = 1 returns z unchanged (|z|^0 = 1.0).
    """
    if z == 0j:
        return 0j
    return z * abs(z) ** (2.0 * float(alpha.alpha) - 2.0)


def beltrami(alpha: QCParams, z: complex) -> BeltramiData:
    """Wirtinger derivatives f_z = a z^(a-1) zbar^(a-1), f_zbar = (a-1) z^a zbar^(a-2).

    Both share the modulus |z|^(2a-2); f_z is real positive and f_zbar turns
    by e^{2 i arg z}, so the Beltrami ratio is the constant |a-1|/a.
    """
    if z == 0j:
        raise ValueError("Wirtinger derivatives undefined at the origin")
    a = float(alpha.alpha)
    m = abs(z) ** (2.0 * a - 2.0)
    theta = math.atan2(z.imag, z.real)
    f_z = complex(a * m, 0.0)
    f_zbar = (a - 1.0) * m * complex(math.cos(2.0 * theta), math.sin(2.0 * theta))
    if is_exact(alpha.alpha):
        ratio: Real = abs(Fraction(alpha.alpha) - 1) / Fraction(alpha.alpha)
    else:
        ratio = abs(a - 1.0) / a
    return BeltramiData(f_z=f_z, f_zbar=f_zbar, ratio=ratio)


def qc_constant(alpha: QCParams) -> Real:
    """Dilatation constant L with (L-1)/(L+1) = |alpha-1|/alpha: L = 1/(2 alpha - 1).

    Exact (Fraction) for exact alpha; alpha = 2/3 gives L = 3.
    """
    ex = alpha.exponent
    if is_exact(ex):
        return 1 / Fraction(ex)
    return 1.0 / float(ex)


def transport_params(params: ParamRT, alpha: QCParams) -> ParamRT:
    """Image parameters (r^(2 alpha - 1), t) of the slit-disc family.

    Exact when r and the exponent admit a perfect rational root, e.g.
    (1/8)^(1/3) = 1/2; the ParamRT flags report when the image radius leaves
    the stated (0, 1/4) range.
    """
    new_r = pow_maybe_exact(params.r, alpha.exponent)
    if not (new_r < 1):
        raise ValueError(f"image radius r^{alpha.exponent} = {new_r} leaves the unit disc")
    return ParamRT(new_r, params.t)


def feasibility_interval(alpha: QCParams, r: Real) -> tuple[Real, Real] | None:
    """The t-interval [r^2, r^(4(2 alpha - 1))] on which the source domain is
    complete and the image is not; empty (None) when alpha > 3/4.

    Nonempty iff 2 >= 4(2 alpha - 1), i.e. alpha <= 3/4; the returned ends
    are exact when the powers are.
    """
    lo = pow_maybe_exact(r, 2)
    hi = pow_maybe_exact(r, 4 * alpha.exponent)
    if is_exact(lo) and is_exact(hi):
        empty = lo > hi
    else:
        empty = float(lo) > float(hi)
    return None if empty else (lo, hi)


@dataclass(frozen=True)
class CounterexampleChain:
    """Source-domain verdict, map data, image-domain verdict: one complete
    transport of a Bergman-complete domain onto a non-complete one."""

    alpha: Real
    source: ParamRT
    source_classification: Classification
    qc_constant: Real
    beltrami_ratio: Real
    image: ParamRT
    image_classification: Classification
    t_interval: tuple[Real, Real]

    @property
    def succeeds(self) -> bool:
        return (
            self.source_classification == Classification.EXHAUSTIVE_HENCE_COMPLETE
            and self.image_classification == Classification.NOT_COMPLETE
        )


def counterexample_chain(alpha: QCParams, r: Real | None = None, t: Real | None = None) -> CounterexampleChain:
    """Build the full completeness-transport chain for one feasible (r, t).

    Defaults: r = 1/8 and t the geometric midpoint r^(1 + 2(2 alpha - 1)) of
    the feasibility interval, which reproduces (1/8, 1/32) at alpha = 2/3.
    """
    if r is None:
        r = Fraction(1, 8)
    interval = feasibility_interval(alpha, r)
    if interval is None:
        raise ValueError(
            f"empty feasibility region: needs t in [r^2, r^(4(2a-1))] = "
            f"[{pow_maybe_exact(r, 2)}, {pow_maybe_exact(r, 4 * alpha.exponent)}], "
            f"nonempty only for alpha <= 3/4 (alpha = {alpha.alpha})"
        )
    if t is None:
        if is_exact(alpha.exponent):
            t = pow_maybe_exact(r, 1 + 2 * Fraction(alpha.exponent))
        else:
            t = float(r) ** (1.0 + 2.0 * float(alpha.exponent))
    lo, hi = interval
    inside = (lo <= t <= hi) if (is_exact(t) and is_exact(lo) and is_exact(hi)) else (float(lo) <= float(t) <= float(hi))
    if not inside:
        raise ValueError(f"t = {t} outside the feasibility interval [{lo}, {hi}]")
    source = ParamRT(r, t)
    image = transport_params(source, alpha)
    bel = beltrami(alpha, 0.25 + 0j)
    return CounterexampleChain(
        alpha=alpha.alpha,
        source=source,
        source_classification=classify_domain(source),
        qc_constant=qc_constant(alpha),
        beltrami_ratio=bel.ratio,
        image=image,
        image_classification=classify_domain(image),
        t_interval=interval,
    )
