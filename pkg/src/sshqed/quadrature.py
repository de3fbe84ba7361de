"""Brillouin-zone quadrature.

Gap-regime integrands are smooth and 2pi-periodic, so the uniform trapezoid
rule converges geometrically; the node count is doubled until two successive
estimates agree. Near a band edge the integrand develops a sharp integrable
peak at k = 0 or k = pi, handled by a clustering change of variables that
concentrates nodes at both of those momenta.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def _nodes(n: int, cluster: float):
    u = -np.pi + TWO_PI * np.arange(n) / n
    if cluster == 0.0:
        return u, np.full(n, TWO_PI / n)
    # k(u) = u - (cluster/2) sin 2u maps [-pi, pi) onto itself with
    # dk/du = 1 - cluster cos 2u small at u = 0 and u = +-pi.
    k = u - 0.5 * cluster * np.sin(2.0 * u)
    w = (1.0 - cluster * np.cos(2.0 * u)) * (TWO_PI / n)
    return k, w


def bz_mean(fn, tol: float = 1e-10, n0: int = 4096, max_doublings: int = 6,
            cluster: float = 0.0):
    """(1/2pi) * integral over [-pi, pi) of fn(k) dk.

    fn maps a k-vector of shape (nk,) to values of shape (nk,) or (nk, m);
    the result keeps the trailing shape. Doubles nodes until the estimate
    moves by less than tol (relative to max(1, |estimate|)).
    """
    n = n0
    k, w = _nodes(n, cluster)
    est = np.tensordot(w, np.asarray(fn(k)), axes=(0, 0)) / TWO_PI
    for _ in range(max_doublings):
        n *= 2
        k, w = _nodes(n, cluster)
        new = np.tensordot(w, np.asarray(fn(k)), axes=(0, 0)) / TWO_PI
        if np.max(np.abs(new - est)) <= tol * max(1.0, float(np.max(np.abs(new)))):
            return new
        est = new
    return est


def half_bz_mean_even(fn, tol: float = 1e-10, n0: int = 4096, max_doublings: int = 5):
    """(1/2pi) * integral over [-pi, pi] of an EVEN periodic fn, computed as
    (1/pi) * trapezoid over [0, pi] with endpoint half-weights.

    Evenness makes the periodic extension smooth, so this keeps the
    geometric convergence of the full-zone rule.
    """

    def estimate(n):
        k = np.linspace(0.0, np.pi, n + 1)
        w = np.full(n + 1, np.pi / n)
        w[0] *= 0.5
        w[-1] *= 0.5
        return np.tensordot(w, np.asarray(fn(k)), axes=(0, 0)) / np.pi

    n = n0
    est = estimate(n)
    for _ in range(max_doublings):
        n *= 2
        new = estimate(n)
        if np.max(np.abs(new - est)) <= tol * max(1.0, float(np.max(np.abs(new)))):
            return new
        est = new
    return est
