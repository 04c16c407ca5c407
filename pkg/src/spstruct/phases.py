"""Interference quantities for a pair of states relative to two orthogonal subspaces.

Given orthogonal subspaces X and Y with sum Z, ``alpha`` measures how far
``p`` on Z departs from the incoherent sum of its X and Y parts, ``rho`` is
the largest such departure the magnitudes allow, and ``omega = alpha / rho``
is the cosine of the relative phase in a complex Hilbert model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import OrthogonalToSubspace, PhaseUndefined, SPModel
from .geometry import Subspace, as_subspace, ortho_sum, project
from .models import HilbertModel

#: Coefficient of the square-root term in the stated continuity bound.
CONTINUITY_COEFFICIENT = 0.5
#: Coefficient that the Inequality axiom actually supports; tight in Hilbert models.
SOUND_CONTINUITY_COEFFICIENT = 1.0


@dataclass(frozen=True)
class PhaseContext:
    X: Subspace
    Y: Subspace
    Z: Subspace

    @property
    def model(self) -> SPModel:
        return self.Z.model


def phase_context(model: SPModel, X, Y) -> PhaseContext:
    """Bundle orthogonal ``X`` and ``Y`` with their sum; raises NotOrthogonal otherwise."""
    X, Y = as_subspace(model, X), as_subspace(model, Y)
    return PhaseContext(X, Y, ortho_sum(model, X, Y))


class PhaseQuantities(NamedTuple):
    alpha: float
    rho: float
    omega: Optional[float]
    phi: Optional[float]


def _part(ctx: PhaseContext, S: Subspace, a, b):
    # weights and projected similarity; an undefined projection only ever
    # multiplies a zero weight, so the product is taken as zero
    floor = ctx.model.tol.rho_floor
    pa, pb = S.weight(a), S.weight(b)
    if pa <= floor or pb <= floor:
        return pa, pb, 0.0
    m = ctx.model
    return pa, pb, m._similarity(project(m, a, S), project(m, b, S))


def _alpha_rho(ctx: PhaseContext, a, b) -> tuple[float, float]:
    m = ctx.model
    a, b = m.check_state(a), m.check_state(b)
    paZ, pbZ, qZ = _part(ctx, ctx.Z, a, b)
    floor = m.tol.rho_floor
    if paZ <= floor or pbZ <= floor:
        raise OrthogonalToSubspace("alpha and rho need both states non-orthogonal to X + Y")
    paX, pbX, qX = _part(ctx, ctx.X, a, b)
    paY, pbY, qY = _part(ctx, ctx.Y, a, b)
    # the leading term carries p(a, Z) p(b, Z), which equals p(a, b) when b lies
    # in Z; with it alpha and rho both scale by p(a, t(a, Z)) outside Z
    alpha = paZ * pbZ * qZ - paX * pbX * qX - paY * pbY * qY
    rho = 2.0 * math.sqrt(max(0.0, paX * pbX * paY * pbY * qX * qY))
    return alpha, rho


def alpha(ctx: PhaseContext, a, b) -> float:
    return _alpha_rho(ctx, a, b)[0]


def rho(ctx: PhaseContext, a, b) -> float:
    return _alpha_rho(ctx, a, b)[1]


def omega(ctx: PhaseContext, a, b) -> Optional[float]:
    """``alpha / rho``, or None when ``rho <= rho_floor``."""
    al, rh = _alpha_rho(ctx, a, b)
    if rh <= ctx.model.tol.rho_floor:
        return None
    return al / rh


def phase(ctx: PhaseContext, a, b) -> float:
    """Relative phase ``arg<t(a,Y), t(b,Y)> - arg<t(a,X), t(b,X)>`` in ``[0, 2*pi)``.

    Projections are taken as the normalized orthogonal projections of the
    given vectors, so the result does not depend on global phases of ``a``
    or ``b``.  Only defined on linear models, for states orthogonal to
    neither subspace, and only when both projected overlaps are non-zero.
    """
    m = ctx.model
    if not m.is_linear:
        raise PhaseUndefined("phases need a linear model")
    a, b = m.check_state(a), m.check_state(b)
    floor = m.tol.rho_floor
    overlaps = []
    for S in (ctx.X, ctx.Y):
        if min(S.weight(a), S.weight(b)) <= floor:
            raise PhaseUndefined("a state is orthogonal to one of the subspaces")
        V = S.vectors
        ta = V @ (V.conj().T @ m.embed(a))
        tb = V @ (V.conj().T @ m.embed(b))
        ip = np.vdot(ta / np.linalg.norm(ta), tb / np.linalg.norm(tb))
        if abs(ip) <= floor:
            raise PhaseUndefined("projected states are orthogonal")
        overlaps.append(ip)
    return float(np.mod(np.angle(overlaps[1]) - np.angle(overlaps[0]), 2 * np.pi))


def quantities(ctx: PhaseContext, a, b) -> PhaseQuantities:
    al, rh = _alpha_rho(ctx, a, b)
    om = al / rh if rh > ctx.model.tol.rho_floor else None
    phi = None
    if ctx.model.is_linear:
        try:
            phi = phase(ctx, a, b)
        except PhaseUndefined:
            pass
    return PhaseQuantities(al, rh, om, phi)


def check_inequality(ctx: PhaseContext, a, b) -> float:
    """Margin ``rho - |alpha|``; negative means the Inequality axiom fails.

    ``b`` should lie in X + Y; ``a`` may be anywhere.  A state orthogonal to
    X + Y has alpha = rho = 0 and gives margin 0.
    """
    m = ctx.model
    floor = m.tol.rho_floor
    if ctx.Z.weight(a) <= floor or ctx.Z.weight(b) <= floor:
        return 0.0
    al, rh = _alpha_rho(ctx, a, b)
    return rh - abs(al)


def continuity_bound(model: SPModel, x, y, z, coefficient: float = CONTINUITY_COEFFICIENT) -> float:
    """Slack of ``p(x,z) <= p(y,z) + c*sqrt(1 - p(x,y)) + (1 - p(x,y))``.

    With the default ``c = 1/2`` this is the bound as usually stated.
    Complex Hilbert models break it by up to 1/16 once ``p(x, y) > 3/4``:
    the Inequality axiom only supports ``c = 1``
    (:data:`SOUND_CONTINUITY_COEFFICIENT`), which is tight.
    """
    pxy = model.similarity(x, y)
    q = max(0.0, 1.0 - pxy)
    return model.similarity(y, z) + coefficient * math.sqrt(q) + q - model.similarity(x, z)


class ContinuityFamily(NamedTuple):
    model: HilbertModel
    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray


def continuity_family(r: float, eps: float, delta: float = 0.0) -> ContinuityFamily:
    """Two nearby states in C^2 that probe how tight the continuity bound is.

    ``x = sqrt(r) u + sqrt(1-r) v`` and
    ``y = sqrt(r-eps) u + sqrt(1-r+eps) e^{i delta} v`` with ``u, v`` the
    canonical basis.  To second order ``1 - p(x, y)`` is
    ``r(1-r) delta^2 + eps^2 / (4 r (1-r))``.
    """
    if not (0.0 < r < 1.0 and 0.0 <= eps <= r):
        raise ValueError("need 0 < r < 1 and 0 <= eps <= r")
    model = HilbertModel(2)
    u, v = model.state([1, 0]), model.state([0, 1])
    x = model.state([math.sqrt(r), math.sqrt(1 - r)])
    y = model.state([math.sqrt(r - eps), math.sqrt(1 - r + eps) * np.exp(1j * delta)])
    return ContinuityFamily(model, u, v, x, y)
