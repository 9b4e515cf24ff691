"""Compiled inner loops for catalog fields.

The NumPy paths in :mod:`grassradon.transforms` work for any field.  For
catalog fields (sums of Gaussians, shell bumps and ball bumps) the nested
quadratures of the inversion pipeline are fused here with numba.  Every
parallel loop writes to its own output slot and all sums run in a fixed
sequential order, so results do not depend on the thread count.
"""

from __future__ import annotations

import math
import os

# The thread pool size is fixed when numba is first imported, so the
# environment cap has to be translated before that import happens.
_env_threads = os.environ.get("GRASSRADON_THREADS", "").strip()
if _env_threads and _env_threads != "0" and "NUMBA_NUM_THREADS" not in os.environ:
    os.environ["NUMBA_NUM_THREADS"] = str(max(1, int(_env_threads)))
# The workqueue layer ships with numba itself, so no external threading
# runtime (and no version warning about one) is involved.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numba  # noqa: E402
import numpy as np  # noqa: E402
from numba import njit, prange  # noqa: E402

K_GAUSS, K_SHELL, K_BALL = 1, 2, 3


def configure_threads(count: int | None = None) -> int:
    """Apply ``GRASSRADON_THREADS`` (or ``count``) to numba; 0 means all threads."""
    if count is None:
        raw = os.environ.get("GRASSRADON_THREADS", "0").strip() or "0"
        count = int(raw)
    limit = numba.config.NUMBA_NUM_THREADS
    use = limit if count <= 0 else min(count, limit)
    numba.set_num_threads(use)
    return use


@njit(cache=True)
def term_value(codes, prm, k, u, y):
    """Value of term ``k`` (without its coefficient) at fiber point ``y`` of the line ``u``."""
    n = y.shape[0]
    c = codes[k]
    if c == K_BALL:
        rad = prm[k, 0]
        d2 = 0.0
        for i in range(n):
            d = y[i] - prm[k, 1 + i]
            d2 += d * d
        t2 = d2 / (rad * rad)
        if t2 < 1.0:
            return math.exp(1.0 - 1.0 / (1.0 - t2))
        return 0.0
    r2 = 0.0
    for i in range(n):
        r2 += y[i] * y[i]
    val = fiber_radial(codes, prm, k, r2)
    if c == K_GAUSS and prm[k, 1] != 0.0:
        q = 0.0
        for i in range(n):
            for j in range(n):
                q += u[i] * prm[k, 2 + i * n + j] * u[j]
        val *= q
    return val


@njit(cache=True)
def eval_terms(codes, coefs, prm, u, y):
    """Value of a catalog field at fiber point ``y`` of the line ``u`` (ignored for p=0)."""
    total = 0.0
    for k in range(codes.shape[0]):
        total += coefs[k] * term_value(codes, prm, k, u, y)
    return total


@njit(cache=True)
def eval_many(codes, coefs, prm, U, Y):
    out = np.empty(Y.shape[0])
    for i in range(Y.shape[0]):
        out[i] = eval_terms(codes, coefs, prm, U[i], Y[i])
    return out


@njit(cache=True)
def fiber_radial(codes, prm, k, r2):
    """Fiber factor of term ``k`` at squared fiber radius ``r2`` (Gaussian or shell terms)."""
    c = codes[k]
    if c == K_GAUSS:
        s = prm[k, 0]
        return math.exp(-r2 / (s * s))
    r0 = prm[k, 0]
    r1 = prm[k, 1]
    r = math.sqrt(r2)
    if r > r0 and r < r1:
        t = (r - 0.5 * (r0 + r1)) / (0.5 * (r1 - r0))
        return math.exp(1.0 - 1.0 / (1.0 - t * t))
    return 0.0


@njit(cache=True)
def is_fiber_radial(codes):
    for k in range(codes.shape[0]):
        if codes[k] == K_BALL:
            return False
    return True


@njit(cache=True)
def circle_angular_means(codes, coefs, prm, eta, ncirc):
    """``coef_k`` times the mean angular factor of term ``k`` over the circle of lines in ``eta``.

    The lines are ``u_j = cos(πj/m) e_0 + sin(πj/m) e_1`` as in the generic loop.
    """
    n = eta.shape[0]
    out = np.empty(codes.shape[0])
    u = np.empty(n)
    for k in range(codes.shape[0]):
        if codes[k] == K_GAUSS and prm[k, 1] != 0.0:
            acc = 0.0
            for j in range(ncirc):
                th = math.pi * j / ncirc
                ct = math.cos(th)
                st = math.sin(th)
                for i in range(n):
                    u[i] = ct * eta[i, 0] + st * eta[i, 1]
                q = 0.0
                for i in range(n):
                    for l in range(n):
                        q += u[i] * prm[k, 2 + i * n + l] * u[l]
                acc += q
            out[k] = coefs[k] * acc / ncirc
        else:
            out[k] = coefs[k]
    return out


@njit(cache=True)
def radial_term_integral(codes, prm, k, vv, dim, xg, wg, rho):
    """Integral of term ``k`` over a ``dim``-disk of radius ``rho`` at squared offset ``vv``.

    The term depends on the squared radius ``vv + ρ²`` only.  Shell terms
    are integrated over the radii where they are nonzero, which keeps the
    Gauss rule away from the flat edges of the bump.  ``dim`` is 1 (a chord,
    ``2∫ h dρ``) or 2 (a disk, ``2π∫ ρ h dρ``).
    """
    lo = 0.0
    hi = rho
    if codes[k] == K_SHELL:
        r0 = prm[k, 0]
        r1 = prm[k, 1]
        if vv >= r1 * r1:
            return 0.0
        lo = math.sqrt(max(r0 * r0 - vv, 0.0))
        hi = min(math.sqrt(r1 * r1 - vv), rho)
    if hi <= lo:
        return 0.0
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    acc = 0.0
    for a in range(xg.shape[0]):
        x = mid + half * xg[a]
        val = wg[a] * fiber_radial(codes, prm, k, vv + x * x)
        if dim == 2:
            val *= x
        acc += val
    if dim == 2:
        return 2.0 * math.pi * half * acc
    return 2.0 * half * acc


@njit(cache=True)
def radial_chord_integral(codes, prm, amean, vv, xg, wg, fiber_radius, support):
    """``Σ_k amean_k ∫ h_k(vv + x²) dx`` over the chord of the support ball.

    For fiber-radial terms the integrand along any line ``v + x e`` with
    ``e ⊥ v`` depends only on ``vv + x²``, so every line of the circle in a
    plane shares the same fiber integral and only the angular factors differ.
    """
    if support >= 0.0:
        if vv >= support * support:
            return 0.0
        rho = math.sqrt(support * support - vv)
    else:
        rho = fiber_radius
    total = 0.0
    for k in range(codes.shape[0]):
        if amean[k] != 0.0:
            total += amean[k] * radial_term_integral(codes, prm, k, vv, 1, xg, wg, rho)
    return total


@njit(cache=True)
def ball_term_integral(prm, k, v, eta, q, xg, wg):
    """Integral of ball term ``k`` over the q-plane ``v + span(eta)`` (q = 1 or 2).

    The rule covers only the chord or disk where the plane meets the ball.
    """
    n = v.shape[0]
    rad = prm[k, 0]
    a = np.zeros(2)
    for j in range(q):
        for i in range(n):
            a[j] += eta[i, j] * (prm[k, 1 + i] - v[i])
    d2 = 0.0
    for i in range(n):
        d = v[i] - prm[k, 1 + i]
        for j in range(q):
            d += a[j] * eta[i, j]
        d2 += d * d
    h2 = rad * rad - d2
    if h2 <= 0.0:
        return 0.0
    h = math.sqrt(h2)
    m = xg.shape[0]
    acc = 0.0
    if q == 1:
        for s in range(m):
            t2 = (h * xg[s]) ** 2 + d2
            if t2 < rad * rad:
                acc += wg[s] * math.exp(1.0 - 1.0 / (1.0 - t2 / (rad * rad)))
        return acc * h
    for s in range(m):
        x1 = h * xg[s]
        c2 = math.sqrt(max(h2 - x1 * x1, 0.0))
        inner = 0.0
        for t in range(m):
            x2 = c2 * xg[t]
            t2 = x1 * x1 + x2 * x2 + d2
            if t2 < rad * rad:
                inner += wg[t] * math.exp(1.0 - 1.0 / (1.0 - t2 / (rad * rad)))
        acc += wg[s] * inner * c2
    return acc * h


@njit(cache=True)
def radon_point(codes, coefs, prm, p, q, eta, v, ncirc, xg, wg, fiber_radius, support):
    """Radon transform of a catalog field at the plane ``(eta, v)``.

    ``eta`` is an ``n x q`` orthonormal basis and ``v`` the offset.  For a
    compactly supported field (``support > 0``) the fiber integral runs over
    the chord of the support ball, otherwise over ``[-fiber_radius, fiber_radius]``.
    """
    n = v.shape[0]
    vv = 0.0
    for i in range(n):
        vv += v[i] * v[i]
    if support >= 0.0:
        if vv >= support * support:
            return 0.0
        rho = math.sqrt(support * support - vv)
    else:
        rho = fiber_radius
    m = xg.shape[0]
    y = np.empty(n)
    u = np.zeros(n)
    if p == 0:
        # point fields: radial terms reduce to 1-D radial integrals, ball
        # terms are integrated over their own chord or disk
        acc = 0.0
        for k in range(codes.shape[0]):
            if codes[k] == K_BALL:
                acc += coefs[k] * ball_term_integral(prm, k, v, eta, q, xg, wg)
            else:
                acc += coefs[k] * radial_term_integral(codes, prm, k, vv, q, xg, wg, rho)
        return acc
    # p == 1, q == 2: average over the circle of lines inside eta
    if is_fiber_radial(codes):
        amean = circle_angular_means(codes, coefs, prm, eta, ncirc)
        return radial_chord_integral(codes, prm, amean, vv, xg, wg, fiber_radius, support)
    e = np.empty(n)
    acc = 0.0
    for j in range(ncirc):
        th = math.pi * j / ncirc
        ct = math.cos(th)
        st = math.sin(th)
        for i in range(n):
            u[i] = ct * eta[i, 0] + st * eta[i, 1]
            e[i] = -st * eta[i, 0] + ct * eta[i, 1]
        inner = 0.0
        for a in range(m):
            for i in range(n):
                y[i] = v[i] + rho * xg[a] * e[i]
            inner += wg[a] * eval_terms(codes, coefs, prm, u, y)
        acc += inner * rho
    return acc / ncirc


@njit(cache=True, parallel=True)
def radon_many(codes, coefs, prm, p, q, etas, vs, ncirc, xg, wg, fiber_radius, support):
    out = np.empty(vs.shape[0])
    for k in prange(vs.shape[0]):
        out[k] = radon_point(codes, coefs, prm, p, q, etas[k], vs[k], ncirc, xg, wg, fiber_radius, support)
    return out


@njit(cache=True, parallel=True)
def plane_profiles(codes, coefs, prm, etas, omegas, normals, svals, ncirc, xg, wg,
                   fiber_radius, support, phi_radius, tg, tw):
    """Profiles ``g(η, ω; s) = ∫ φ(η, sω + t n) dt`` of ``φ = R^(1,2) f``.

    ``phi_radius`` bounds the support of ``φ`` (its own support, a hard
    truncation radius, or the profile window for Schwartz fields); the
    ``t`` integral runs over the chord ``|t| <= sqrt(phi_radius² - s²)``.
    Item ``k`` uses plane ``etas[k]``, direction ``omegas[k]``, unit normal
    ``normals[k]`` and evaluates at every ``s`` in ``svals[k]``.
    """
    K = etas.shape[0]
    S = svals.shape[1]
    n = omegas.shape[1]
    out = np.zeros((K, S))
    radial = is_fiber_radial(codes)
    for k in prange(K):
        v = np.empty(n)
        if radial:
            amean = circle_angular_means(codes, coefs, prm, etas[k], ncirc)
        else:
            amean = np.empty(0)
        for j in range(S):
            s = svals[k, j]
            if abs(s) >= phi_radius:
                continue
            tau = math.sqrt(phi_radius * phi_radius - s * s)
            acc = 0.0
            for a in range(tg.shape[0]):
                t = tau * tg[a]
                if radial:
                    # v = sω + t n with ω ⊥ n, both unit and orthogonal to the plane
                    acc += tw[a] * radial_chord_integral(codes, prm, amean, s * s + t * t, xg, wg,
                                                         fiber_radius, support)
                else:
                    for i in range(n):
                        v[i] = s * omegas[k, i] + t * normals[k, i]
                    acc += tw[a] * radon_point(codes, coefs, prm, 1, 2, etas[k], v, ncirc, xg, wg,
                                               fiber_radius, support)
            out[k, j] = acc * tau
    return out


@njit(cache=True, parallel=True)
def angular_means_many(codes, coefs, prm, etas, ncirc):
    """:func:`circle_angular_means` for every plane in ``etas``; shape ``(K, terms)``."""
    K = etas.shape[0]
    out = np.empty((K, codes.shape[0]))
    for k in prange(K):
        out[k] = circle_angular_means(codes, coefs, prm, etas[k], ncirc)
    return out


@njit(cache=True, parallel=True)
def radial_profile_terms(codes, prm, svals, xg, wg, fiber_radius, support, phi_radius, tg, tw):
    """Term-wise profiles ``∫∫ h_k(s² + t² + x²) dx dt`` of a fiber-radial catalog field.

    The profile of ``φ = R^(1,2) f`` at ``(η, ω, s)`` is
    ``Σ_k amean_k(η) H[.., s, k]``: the point ``sω + tn + xe`` has squared
    norm ``s² + t² + x²`` whatever the plane, so the nested quadrature only
    depends on ``s``.  Returns an array ``(U, S, terms)`` for ``svals`` of
    shape ``(U, S)``.
    """
    U = svals.shape[0]
    S = svals.shape[1]
    T = codes.shape[0]
    out = np.zeros((U, S, T))
    for idx in prange(U * S):
        r = idx // S
        j = idx % S
        s = svals[r, j]
        if abs(s) >= phi_radius:
            continue
        tau = math.sqrt(phi_radius * phi_radius - s * s)
        for k in range(T):
            onehot = np.zeros(T)
            onehot[k] = 1.0
            acc = 0.0
            for a in range(tg.shape[0]):
                t = tau * tg[a]
                acc += tw[a] * radial_chord_integral(codes, prm, onehot, s * s + t * t, xg, wg,
                                                     fiber_radius, support)
            out[r, j, k] = acc * tau
    return out
