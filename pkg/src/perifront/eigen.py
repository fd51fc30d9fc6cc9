"""Principal (Perron) eigenpairs of tilted scalar operators and of the
coupled linearization at a steady state.

Both solvers run shifted inverse power iteration on (sigma*I - A)**-1 with
sigma = 1 + Gershgorin upper bound.  For a Metzler A that shift makes a
nonsingular M-matrix whose inverse is entrywise nonnegative, so the
iteration converges to the eigenvalue of maximal real part together with a
positive eigenvector.  Deterministic start vector of ones; no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, ReducibleCouplingError
from .grid import (CellGrid, OperatorSpec, PeriodicField,
                   assemble_tilted_operator, solve_cyclic_banded)

__all__ = [
    "EigenPair",
    "CoupledEigenPair",
    "principal_eig_scalar",
    "principal_eig_coupled",
    "coupled_perron",
]

MAX_ITER = 100_000


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: PeriodicField
    residual: float
    iterations: int

    def __post_init__(self):
        if self.vector.min() <= 0.0:
            raise ConvergenceError("principal eigenvector is not positive")

    def as_json(self) -> dict:
        return {"value": self.value, "residual": self.residual,
                "n": self.vector.grid.n, "normalization": "mean-one"}


@dataclass(frozen=True)
class CoupledEigenPair:
    value: float
    vectors: tuple
    residual: float
    iterations: int

    def as_json(self) -> dict:
        return {"value": self.value, "residual": self.residual,
                "n": self.vectors[0].grid.n, "normalization": "max-one"}


def principal_eig_scalar(spec: OperatorSpec, tol: float = 1e-10) -> EigenPair:
    """Perron eigenpair of the assembled tilted operator.

    Returns (kappa, phi) with ||A phi - kappa phi||_inf <= tol and phi > 0
    normalized to mean(phi) = 1 (a smooth normalization in lam, which the
    dispersion module differentiates through).
    """
    A = assemble_tilted_operator(spec)
    sigma = 1.0 + A.gershgorin_max()
    S = A.shifted_from(sigma)

    n = A.n
    phi = np.ones(n)
    kappa = float(A.matvec(phi).mean())
    for it in range(1, MAX_ITER + 1):
        w = solve_cyclic_banded(S, phi)
        nu = w.mean()          # Perron value of (sigma*I - A)^-1 at convergence
        w = w / nu
        kappa_new = sigma - 1.0 / nu
        resid = float(np.max(np.abs(A.matvec(w) - kappa_new * w)))
        done = (abs(kappa_new - kappa) <= tol * max(1.0, abs(kappa_new))
                and resid <= tol * max(1.0, abs(kappa_new)))
        phi, kappa = w, kappa_new
        if done:
            return EigenPair(kappa, PeriodicField(spec.d.grid, phi), resid, it)
    raise ConvergenceError(
        f"inverse power iteration did not converge in {MAX_ITER} steps "
        f"(last residual {resid:.3e})")


def _assemble_coupled(cell: CellGrid, ds, qs, J, e: int) -> sp.csr_matrix:
    """Sparse (m*n) x (m*n) matrix of the coupled periodic operator.

    Diagonal blocks are the untilted scalar operators with zeroth-order
    coefficient J[i, i, :]; off-diagonal blocks are diag(J[i, j, :]).
    """
    m = len(ds)
    n = cell.n
    blocks = [[None] * m for _ in range(m)]
    for i in range(m):
        spec = OperatorSpec(
            d=PeriodicField(cell, ds[i]),
            q=PeriodicField(cell, qs[i]),
            eta=PeriodicField(cell, J[i, i]),
            lam=0.0, e=e)
        B = assemble_tilted_operator(spec)
        blocks[i][i] = sp.diags(
            [B.sub[1:], B.main, B.sup[:-1]], [-1, 0, 1], format="lil")
        blocks[i][i][0, n - 1] += B.sub[0]
        blocks[i][i][n - 1, 0] += B.sup[n - 1]
        for j in range(m):
            if j != i and np.any(J[i, j] != 0.0):
                blocks[i][j] = sp.diags(J[i, j])
    return sp.bmat(blocks, format="csc")


def coupled_perron(cell: CellGrid, ds, qs, J, e: int = 1,
                   tol: float = 1e-8) -> CoupledEigenPair:
    """Perron eigenpair of the coupled operator with Jacobian field J (m,m,n).

    Off-diagonal entries of J must be >= 0 (cooperative coupling) so the
    assembled matrix is Metzler.  Raises ReducibleCouplingError when the
    converged vector is not strictly positive, which is how a reducible
    coupling graph shows up at the discrete level.
    """
    J = np.asarray(J, dtype=float)
    m, n = J.shape[0], cell.n
    for i in range(m):
        for j in range(m):
            if i != j and J[i, j].min() < 0.0:
                raise ReducibleCouplingError(
                    f"off-diagonal Jacobian entry ({i},{j}) is negative: "
                    "coupled operator is not Metzler")
    M = _assemble_coupled(cell, ds, qs, J, e)
    row_abs = np.asarray(abs(M).sum(axis=1)).ravel()
    diag = M.diagonal()
    sigma = 1.0 + float(np.max(diag + row_abs - np.abs(diag)))
    lu = spla.splu((sigma * sp.identity(m * n, format="csc") - M).tocsc())

    v = np.ones(m * n)
    mu = 0.0
    for it in range(1, MAX_ITER + 1):
        w = lu.solve(v)
        nu = float(np.max(w))
        w = w / nu
        mu_new = sigma - 1.0 / nu
        resid = float(np.max(np.abs(M @ w - mu_new * w)))
        done = (abs(mu_new - mu) <= tol * max(1.0, abs(mu_new))
                and resid <= tol * max(1.0, abs(mu_new)))
        v, mu = w, mu_new
        if done:
            break
    else:
        raise ConvergenceError(
            f"coupled inverse power iteration stalled (residual {resid:.3e})")

    comps = v.reshape(m, n)
    if comps.min() <= 1e-6 * comps.max():
        raise ReducibleCouplingError(
            "reducible coupling: principal eigenvector has a (numerically) "
            "vanishing component")
    vectors = tuple(PeriodicField(cell, comps[i]) for i in range(m))
    return CoupledEigenPair(mu, vectors, resid, it)


def principal_eig_coupled(model, at: str = "one",
                          tol: float = 1e-8, e: int = 1) -> CoupledEigenPair:
    """Perron pair of the linearization of a reaction model at 'zero' or 'one'.

    For at='one' this is the (mu-, Psi) pair whose negativity certifies
    linear stability of the upper steady state.
    """
    if at not in ("zero", "one"):
        raise ValueError("state must be 'zero' or 'one'")
    cell = model.cell
    u = (np.zeros((model.m, cell.n)) if at == "zero"
         else np.ones((model.m, cell.n)))
    J = model.jacobian(u, np.arange(cell.n))
    return coupled_perron(cell, model.d, model.q, J, e=e, tol=tol)
