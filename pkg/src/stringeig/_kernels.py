"""Compiled numerical kernels.

Two families of hot loops live here, both jitted with numba:

* fixed-step RK4 integration of the Pruefer phase equation, in the plain
  form  theta' = cos^2(theta) + lam*rho*sin^2(theta)  and in the
  amplitude-scaled form  phi' = sqrt(lam*rho) + (rho'/4rho)*sin(2*phi),
  which keeps the right-hand side smooth for large lam;
* Sturm-sequence bisection for the smallest eigenvalues of a symmetric
  tridiagonal matrix (the finite-difference oracle's eigensolver).

Density data is pre-sampled into per-step arrays by the callers (value at
the left node, the midpoint, and the right node of every step) so that no
Python callback crosses the jit boundary and so that one-sided derivative
values at interior kinks land on the correct side.  Node grids may be
non-uniform; each RK4 step uses its own width.
"""

import numba
import numpy as np

# Smallest normal double; pivots with magnitude below
# pivmin = SAFE_MIN * max(offdiag^2) are clamped to -pivmin so the sign
# count survives exact-zero pivots.
SAFE_MIN = 2.2250738585072014e-308


@numba.njit(cache=True)
def phase_terminal(xs, rho_l, rho_m, rho_r, lam):
    """Terminal angle theta(xs[-1]) of theta' = cos^2 t + lam*rho(x)*sin^2 t,
    theta(xs[0]) = 0."""
    th = 0.0
    for i in range(xs.shape[0] - 1):
        h = xs[i + 1] - xs[i]
        s = np.sin(th)
        c = np.cos(th)
        k1 = c * c + lam * rho_l[i] * s * s
        t2 = th + 0.5 * h * k1
        s = np.sin(t2)
        c = np.cos(t2)
        k2 = c * c + lam * rho_m[i] * s * s
        t3 = th + 0.5 * h * k2
        s = np.sin(t3)
        c = np.cos(t3)
        k3 = c * c + lam * rho_m[i] * s * s
        t4 = th + h * k3
        s = np.sin(t4)
        c = np.cos(t4)
        k4 = c * c + lam * rho_r[i] * s * s
        th += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return th


@numba.njit(cache=True)
def phase_trace(xs, rho_l, rho_m, rho_r, lam, theta_out, logr_out):
    """Trace of theta and log-amplitude along ``xs`` (plain phase form).

    Log-amplitude obeys (log r)' = (1 - lam*rho) sin(t) cos(t), one-way
    coupled to theta, so both advance with shared RK4 stages.
    """
    th = 0.0
    lr = 0.0
    theta_out[0] = 0.0
    logr_out[0] = 0.0
    for i in range(xs.shape[0] - 1):
        h = xs[i + 1] - xs[i]
        s = np.sin(th)
        c = np.cos(th)
        k1 = c * c + lam * rho_l[i] * s * s
        q1 = (1.0 - lam * rho_l[i]) * s * c
        t2 = th + 0.5 * h * k1
        s = np.sin(t2)
        c = np.cos(t2)
        k2 = c * c + lam * rho_m[i] * s * s
        q2 = (1.0 - lam * rho_m[i]) * s * c
        t3 = th + 0.5 * h * k2
        s = np.sin(t3)
        c = np.cos(t3)
        k3 = c * c + lam * rho_m[i] * s * s
        q3 = (1.0 - lam * rho_m[i]) * s * c
        t4 = th + h * k3
        s = np.sin(t4)
        c = np.cos(t4)
        k4 = c * c + lam * rho_r[i] * s * s
        q4 = (1.0 - lam * rho_r[i]) * s * c
        th += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        lr += (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
        theta_out[i + 1] = th
        logr_out[i + 1] = lr


@numba.njit(cache=True)
def scaled_terminal(xs, rho_l, rho_m, rho_r, g_l, g_m, g_r, lam):
    """Terminal angle of the amplitude-scaled phase equation.

    phi' = sqrt(lam*rho) + g * sin(2*phi) with g = rho'/(4*rho) pre-divided
    by the caller.  Requires lam > 0 and rho > 0.  phi crosses multiples of
    pi exactly where the plain phase does, so the eigenvalue condition
    phi(1) = n*pi is unchanged, but the right-hand side stays O(sqrt(lam))
    instead of O(lam).
    """
    phi = 0.0
    for i in range(xs.shape[0] - 1):
        h = xs[i + 1] - xs[i]
        k1 = np.sqrt(lam * rho_l[i]) + g_l[i] * np.sin(2.0 * phi)
        p2 = phi + 0.5 * h * k1
        k2 = np.sqrt(lam * rho_m[i]) + g_m[i] * np.sin(2.0 * p2)
        p3 = phi + 0.5 * h * k2
        k3 = np.sqrt(lam * rho_m[i]) + g_m[i] * np.sin(2.0 * p3)
        p4 = phi + h * k3
        k4 = np.sqrt(lam * rho_r[i]) + g_r[i] * np.sin(2.0 * p4)
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return phi


@numba.njit(cache=True)
def scaled_trace(xs, rho_l, rho_m, rho_r, g_l, g_m, g_r, lam,
                 phi_out, logr_out):
    """Trace of the scaled phase and its log-amplitude along ``xs``.

    In the scaled variables y = r sin(phi), y' = sqrt(lam*rho) r cos(phi)
    and (log r)' = -2*g*cos^2(phi) with g = rho'/(4*rho).
    """
    phi = 0.0
    lr = 0.0
    phi_out[0] = 0.0
    logr_out[0] = 0.0
    for i in range(xs.shape[0] - 1):
        h = xs[i + 1] - xs[i]
        c = np.cos(phi)
        k1 = np.sqrt(lam * rho_l[i]) + g_l[i] * np.sin(2.0 * phi)
        q1 = -2.0 * g_l[i] * c * c
        p2 = phi + 0.5 * h * k1
        c = np.cos(p2)
        k2 = np.sqrt(lam * rho_m[i]) + g_m[i] * np.sin(2.0 * p2)
        q2 = -2.0 * g_m[i] * c * c
        p3 = phi + 0.5 * h * k2
        c = np.cos(p3)
        k3 = np.sqrt(lam * rho_m[i]) + g_m[i] * np.sin(2.0 * p3)
        q3 = -2.0 * g_m[i] * c * c
        p4 = phi + h * k3
        c = np.cos(p4)
        k4 = np.sqrt(lam * rho_r[i]) + g_r[i] * np.sin(2.0 * p4)
        q4 = -2.0 * g_r[i] * c * c
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        lr += (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
        phi_out[i + 1] = phi
        logr_out[i + 1] = lr


@numba.njit(cache=True)
def sturm_count(diag, off2, pivmin, sigma):
    """Number of eigenvalues strictly below ``sigma``.

    Standard negative-pivot count of the LDL^T factorization of T - sigma*I,
    with LAPACK-style clamping of near-zero pivots to -pivmin.
    """
    n = diag.shape[0]
    count = 0
    d = diag[0] - sigma
    if abs(d) < pivmin:
        d = -pivmin
    if d < 0.0:
        count += 1
    for i in range(1, n):
        d = (diag[i] - sigma) - off2[i - 1] / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


@numba.njit(cache=True)
def tridiag_smallest(diag, off, k_max):
    """Smallest ``k_max`` eigenvalues of a symmetric tridiagonal matrix.

    Sturm-sequence bisection, run to machine interval width.  The matrix
    is assumed positive definite (eigenvalues in (0, Gershgorin max)).
    """
    n = diag.shape[0]
    off2 = off * off
    m = 1.0
    for i in range(off2.shape[0]):
        if off2[i] > m:
            m = off2[i]
    pivmin = SAFE_MIN * m
    hi0 = 0.0
    for i in range(n):
        r = abs(diag[i])
        if i > 0:
            r += abs(off[i - 1])
        if i < n - 1:
            r += abs(off[i])
        if r > hi0:
            hi0 = r
    out = np.empty(k_max)
    for k in range(1, k_max + 1):
        lo = 0.0
        hi = hi0
        while True:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if sturm_count(diag, off2, pivmin, mid) >= k:
                hi = mid
            else:
                lo = mid
        out[k - 1] = 0.5 * (lo + hi)
    return out


def warmup():
    """Force jit compilation of every kernel on tiny inputs."""
    xs = np.linspace(0.0, 1.0, 5)
    r = np.ones(4)
    g = np.zeros(4)
    buf_a = np.empty(5)
    buf_b = np.empty(5)
    phase_terminal(xs, r, r, r, 1.0)
    phase_trace(xs, r, r, r, 1.0, buf_a, buf_b)
    scaled_terminal(xs, r, r, r, g, g, g, 1.0)
    scaled_trace(xs, r, r, r, g, g, g, 1.0, buf_a, buf_b)
    tridiag_smallest(np.full(8, 2.0), np.full(7, -1.0), 2)
