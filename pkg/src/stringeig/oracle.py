"""Independent finite-difference reference for the shooting solver.

Central second differences on a uniform mesh turn -y'' = lam*rho*y into
the generalized eigenproblem K v = lam M v with K the (2, -1)/h^2
stiffness tridiagonal and M the diagonal of rho at interior nodes
(mass lumping).  Conjugating by M^{-1/2} keeps the problem symmetric
tridiagonal, and the eigenvalues come from a dependency-free
Sturm-sequence bisection.  Mesh error is O(h^2); pairing meshes N and 2N
through Richardson extrapolation cancels the leading term and certifies
reference values well past the 1e-6 agreement the cross-validation needs.

The same machinery discretizes -(p y')' = lam*rho*y in conservative flux
form with harmonic-mean edge coefficients, as an independent check on the
Legendre-substitution route.

Empirical mesh-error model (exact for rho = 1, where the discrete
spectrum is (4/h^2) sin^2(k*pi*h/2)): lam_k(N) - lam_k is about
-lam_k * (k*pi*h)^2 / 12, so the N=1000/2000 Richardson pair leaves
roughly lam_k * (k*pi*h)^4 / 360 ~ 1e-9 relative error at k = 8.

Nothing here shares code with the RK4 phase integrator: the two paths
meet only in the cross-validation tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .density import Density


class OracleError(ValueError):
    """Invalid finite-difference oracle request."""


@dataclass(frozen=True)
class FdProblem:
    """Symmetrized tridiagonal pencil for one mesh.

    ``diag``/``offdiag`` are the entries of M^{-1/2} K M^{-1/2}; ``mass``
    holds rho at the interior nodes.
    """

    mesh_size: int
    h: float
    diag: np.ndarray
    offdiag: np.ndarray
    mass: np.ndarray


def build_problem(d: Density, mesh_size: int) -> FdProblem:
    n = int(mesh_size)
    if n < 2:
        raise OracleError(f"mesh size must be >= 2, got {n}")
    h = 1.0 / n
    x = np.arange(1, n) * h
    rho = np.asarray(d(x), dtype=float)
    if not np.all(rho > 0.0):
        raise OracleError("density is not positive at the mesh nodes")
    inv_h2 = 1.0 / (h * h)
    diag = 2.0 * inv_h2 / rho
    offdiag = -inv_h2 / np.sqrt(rho[:-1] * rho[1:])
    return FdProblem(mesh_size=n, h=h, diag=diag, offdiag=offdiag, mass=rho)


def fd_eigenvalues(d: Density, n_max: int, mesh_size: int) -> np.ndarray:
    """First ``n_max`` eigenvalues of the mesh pencil, increasing order.

    Requires mesh_size >= 8*n_max so the highest requested mode is
    resolved by at least eight mesh cells per oscillation.
    """
    if n_max < 1:
        raise OracleError(f"n_max must be >= 1, got {n_max}")
    if mesh_size < 8 * n_max:
        raise OracleError(
            f"mesh size {mesh_size} under-resolves {n_max} modes "
            f"(need >= {8 * n_max})")
    prob = build_problem(d, mesh_size)
    return _kernels.tridiag_smallest(prob.diag, prob.offdiag, int(n_max))


def richardson(lambda_n: float, lambda_2n: float) -> float:
    """Cancel the O(h^2) mesh error from values at meshes N and 2N."""
    return (4.0 * lambda_2n - lambda_n) / 3.0


def fd_reference(d: Density, n_max: int, meshes: tuple[int, int] = (1000, 2000)) -> np.ndarray:
    """Richardson-extrapolated reference eigenvalues from a mesh pair."""
    n_mesh, n_mesh2 = meshes
    if n_mesh2 != 2 * n_mesh:
        raise OracleError(f"mesh pair must be (N, 2N), got {meshes}")
    lam_n = fd_eigenvalues(d, n_max, n_mesh)
    lam_2n = fd_eigenvalues(d, n_max, n_mesh2)
    return richardson(lam_n, lam_2n)


def fd_eigenvector_sign_changes(d: Density, n: int, mesh_size: int) -> np.ndarray:
    """Approximate interior zeros of mode ``n``: sign-change midpoints of
    the mesh eigenvector (inverse iteration on the shifted pencil)."""
    prob = build_problem(d, mesh_size)
    lam = _kernels.tridiag_smallest(prob.diag, prob.offdiag, n)[n - 1]
    m = prob.diag.shape[0]
    # inverse iteration on the symmetrized matrix, two sweeps
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(m)
    shift = lam * (1.0 + 1e-8) + 1e-12
    from scipy.linalg import solve_banded
    band = np.zeros((3, m))
    band[0, 1:] = prob.offdiag
    band[1, :] = prob.diag - shift
    band[2, :-1] = prob.offdiag
    for _ in range(3):
        v = solve_banded((1, 1), band, v)
        v /= np.linalg.norm(v)
    # undo the M^{1/2} similarity to recover y at the interior nodes
    y = v / np.sqrt(prob.mass)
    x = np.arange(1, prob.mesh_size) * prob.h
    flips = np.nonzero(y[:-1] * y[1:] < 0.0)[0]
    return 0.5 * (x[flips] + x[flips + 1])


# ---------------------------------------------------------------------------
# conservative discretization of -(p y')' = lam rho y
# ---------------------------------------------------------------------------

def fd_sl_eigenvalues(p: Density, rho: Density, n_max: int, mesh_size: int) -> np.ndarray:
    """First ``n_max`` eigenvalues of the flux-form discretization.

    Edge coefficients are harmonic means of p at the adjacent nodes, the
    standard conservative choice that keeps O(h^2) accuracy across kinks.
    """
    if n_max < 1:
        raise OracleError(f"n_max must be >= 1, got {n_max}")
    if mesh_size < 8 * n_max:
        raise OracleError(
            f"mesh size {mesh_size} under-resolves {n_max} modes "
            f"(need >= {8 * n_max})")
    n = int(mesh_size)
    h = 1.0 / n
    x_all = np.arange(0, n + 1) * h
    p_nodes = np.asarray(p(x_all), dtype=float)
    if not np.all(p_nodes > 0.0):
        raise OracleError("p is not positive at the mesh nodes")
    p_edge = 2.0 / (1.0 / p_nodes[:-1] + 1.0 / p_nodes[1:])
    rho_in = np.asarray(rho(x_all[1:-1]), dtype=float)
    if not np.all(rho_in > 0.0):
        raise OracleError("rho is not positive at the mesh nodes")
    inv_h2 = 1.0 / (h * h)
    diag = (p_edge[:-1] + p_edge[1:]) * inv_h2
    off = -p_edge[1:-1] * inv_h2
    sym_diag = diag / rho_in
    sym_off = off / np.sqrt(rho_in[:-1] * rho_in[1:])
    return _kernels.tridiag_smallest(sym_diag, sym_off, int(n_max))


def fd_sl_reference(p: Density, rho: Density, n_max: int,
                    meshes: tuple[int, int] = (1000, 2000)) -> np.ndarray:
    """Richardson-extrapolated flux-form reference for -(p y')' = lam rho y."""
    n_mesh, n_mesh2 = meshes
    if n_mesh2 != 2 * n_mesh:
        raise OracleError(f"mesh pair must be (N, 2N), got {meshes}")
    lam_n = fd_sl_eigenvalues(p, rho, n_max, n_mesh)
    lam_2n = fd_sl_eigenvalues(p, rho, n_max, n_mesh2)
    return richardson(lam_n, lam_2n)
