"""Coupled k-species competition systems at fixed competition strength.

Three model variants share one solver:

* ``lotka_volterra``: -Lap u_i = f_i([u_i]^+) - kappa [u_i]^+ sum_j [u_j]^+,
  the classical interaction written with positive parts so converged
  solutions are nonnegative componentwise.
* ``barrier``: -Lap u_i = f_i(u_i) - kappa u_i sum_j u_j
  - kappa u_i sum_j u_j^0 - kappa u_i^0 sum_j u_j, the model with linear
  competition against the fixed baseline profiles u_j^0, localized in the
  balls; this is the variant whose large-kappa limit has the non-invading
  property.
* ``positive_part``: -Lap u_i = f_i([u_i + u_i^0]^+ - u_i^0)
  - kappa [u_i + u_i^0]^+ sum_j [u_j + u_j^0]^+, the reformulation whose
  solutions obey the lower bound u_i >= -u_i^0.

All sums run over j != i.  Solves use damped semismooth Newton on the full
block system (positive parts get generalized derivative 1 at ties) with a
sparse direct factorization per step, falling back to nonlinear
Gauss-Seidel sweeps when Newton stalls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import DomainMismatchError, NonlinearSolveError
from .operators import ScalarField, StateField
from .reaction import f_eval, f_prime, f_truncated_eval, f_truncated_prime

MODEL_KINDS = ("lotka_volterra", "barrier", "positive_part")


@dataclass(frozen=True)
class ModelKind:
    """Model selector; barrier and positive_part carry the baseline tuple.

    ``caps`` holds the per-species truncation profiles (the global positive
    supersolutions) when reaction truncation is switched on.
    """

    kind: str
    baseline: StateField | None = None
    caps: StateField | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind in ("barrier", "positive_part") and self.baseline is None:
            raise ValueError(f"{self.kind} model requires a baseline state")

    @classmethod
    def lotka_volterra(cls, baseline=None):
        return cls("lotka_volterra", baseline)

    @classmethod
    def barrier(cls, baseline, caps=None):
        return cls("barrier", baseline, caps)

    @classmethod
    def positive_part(cls, baseline, caps=None):
        return cls("positive_part", baseline, caps)


class _System:
    """Interior-vector view of one model at fixed kappa."""

    def __init__(self, domain, species, model: ModelKind, kappa):
        self.domain = domain
        self.species = species
        self.model = model
        self.kappa = float(kappa)
        self.k = len(species)
        self.A, _ = domain.laplacian()
        self.h = domain.h
        mask = domain.interior_mask
        if model.baseline is not None and model.baseline.domain is not domain:
            raise DomainMismatchError("baseline lives on a different domain")
        if model.kind != "lotka_volterra" and model.baseline is not None:
            self.u0 = [u.values[mask] for u in model.baseline]
        else:
            # the plain model may carry a baseline as a warm-start hint, but
            # its residual is the kind with zero baseline
            self.u0 = [np.zeros(self.A.shape[0]) for _ in range(self.k)]
        if model.caps is not None:
            if model.caps.domain is not domain:
                raise DomainMismatchError("truncation caps live on a different domain")
            self.caps = [u.values[mask] for u in model.caps]
        else:
            self.caps = None

    def _f(self, i, s):
        if self.caps is not None:
            return f_truncated_eval(self.species[i], s, self.caps[i])
        return f_eval(self.species[i], s)

    def _fp(self, i, s):
        if self.caps is not None:
            return f_truncated_prime(self.species[i], s, self.caps[i])
        return f_prime(self.species[i], s)

    def residual(self, u):
        """Residual vectors A u_i - RHS_i for the stacked state u (list of k)."""
        k, kap = self.k, self.kappa
        res = []
        if self.model.kind == "barrier":
            total_u = sum(u)
            total_u0 = sum(self.u0)
            for i in range(k):
                su = total_u - u[i]
                su0 = total_u0 - self.u0[i]
                coupling = kap * (u[i] * (su + su0) + self.u0[i] * su)
                res.append(self.A @ u[i] - self._f(i, u[i]) + coupling)
        else:
            P = [np.maximum(u[i] + self.u0[i], 0.0) for i in range(k)]
            totP = sum(P)
            for i in range(k):
                s_i = P[i] - self.u0[i]
                coupling = kap * P[i] * (totP - P[i])
                res.append(self.A @ u[i] - self._f(i, s_i) + coupling)
        return res

    def rhs_norm(self, u, res):
        """Root-sum-square L2 norm of the model right-hand sides at u."""
        acc = 0.0
        for i in range(self.k):
            rhs = self.A @ u[i] - res[i]
            acc += float(rhs @ rhs)
        return self.h * math.sqrt(acc)

    def res_norm(self, res):
        return self.h * math.sqrt(sum(float(r @ r) for r in res))

    def jacobian(self, u):
        """Block Jacobian of the residual at the stacked state u."""
        k, kap = self.k, self.kappa
        blocks = [[None] * k for _ in range(k)]
        if self.model.kind == "barrier":
            total_u = sum(u)
            total_u0 = sum(self.u0)
            for i in range(k):
                su = total_u - u[i]
                su0 = total_u0 - self.u0[i]
                blocks[i][i] = self.A + sp.diags(-self._fp(i, u[i]) + kap * (su + su0))
                off = kap * (u[i] + self.u0[i])
                for j in range(k):
                    if j != i:
                        blocks[i][j] = sp.diags(off)
        else:
            P = [np.maximum(u[i] + self.u0[i], 0.0) for i in range(k)]
            H = [(u[i] + self.u0[i] >= 0.0).astype(float) for i in range(k)]
            totP = sum(P)
            for i in range(k):
                s_i = P[i] - self.u0[i]
                sp_other = totP - P[i]
                blocks[i][i] = self.A + sp.diags(
                    -self._fp(i, s_i) * H[i] + kap * H[i] * sp_other)
                for j in range(k):
                    if j != i:
                        blocks[i][j] = sp.diags(kap * P[i] * H[j])
        return sp.bmat(blocks, format="csc")

    def species_residual(self, i, u):
        return self.residual(u)[i]

    def species_jacobian(self, i, u):
        k, kap = self.k, self.kappa
        if self.model.kind == "barrier":
            su = sum(u[j] for j in range(k) if j != i)
            su0 = sum(self.u0[j] for j in range(k) if j != i)
            return self.A + sp.diags(-self._fp(i, u[i]) + kap * (su + su0))
        P = [np.maximum(u[j] + self.u0[j], 0.0) for j in range(k)]
        H_i = (u[i] + self.u0[i] >= 0.0).astype(float)
        s_i = P[i] - self.u0[i]
        sp_other = sum(P[j] for j in range(k) if j != i)
        return self.A + sp.diags(-self._fp(i, s_i) * H_i + kap * H_i * sp_other)


def residual(U: StateField, species, model: ModelKind, kappa) -> StateField:
    """Model residual A u_i - RHS_i(U, kappa) as a state on the same grid."""
    system = _System(U.domain, species, model, kappa)
    mask = U.domain.interior_mask
    vecs = system.residual([u.values[mask] for u in U])
    return StateField([ScalarField.from_interior(U.domain, r) for r in vecs])


def solve_system(guess: StateField, species, model: ModelKind, kappa,
                 tol=1e-10, *, max_newton=200, max_backtracks=30,
                 gs_sweeps=50) -> tuple[StateField, int]:
    """Solve the selected model at fixed kappa by damped Newton.

    Returns (state, iterations) with the root-sum-square residual norm at
    or below tol * max(1, ||RHS||).  A step is accepted when the residual
    norm decreases by the Armijo-style factor (1 - 1e-4 t); after
    `max_backtracks` halvings the solver switches to nonlinear Gauss-Seidel
    sweeps before raising NonlinearSolveError.
    """
    if len(species) != guess.k:
        raise ValueError("species list and state size disagree")
    domain = guess.domain
    system = _System(domain, species, model, kappa)
    mask = domain.interior_mask
    u = [f.values[mask].astype(float) for f in guess]
    res = system.residual(u)
    rnorm = system.res_norm(res)
    history = [rnorm]
    iterations = 0

    def wrap(vecs):
        return StateField([ScalarField.from_interior(domain, v) for v in vecs])

    def target():
        return tol * max(1.0, system.rhs_norm(u, res))

    def newton_step():
        nonlocal u, res, rnorm, iterations
        J = system.jacobian(u)
        try:
            step = splu(J).solve(-np.concatenate(res))
        except RuntimeError as exc:
            raise NonlinearSolveError(
                f"singular system linearization: {exc}",
                last_iterate=wrap(u), residual_history=history) from exc
        n = res[0].size
        parts = [step[i * n:(i + 1) * n] for i in range(system.k)]
        t = 1.0
        for _ in range(max_backtracks + 1):
            trial = [u[i] + t * parts[i] for i in range(system.k)]
            res_t = system.residual(trial)
            rt = system.res_norm(res_t)
            if rt <= (1.0 - 1e-4 * t) * rnorm:
                u, res, rnorm = trial, res_t, rt
                iterations += 1
                history.append(rnorm)
                return True
            t *= 0.5
        return False

    while rnorm > target():
        if iterations >= max_newton:
            raise NonlinearSolveError(
                f"newton budget exhausted at residual {rnorm:.3e}",
                last_iterate=wrap(u), residual_history=history)
        if newton_step():
            continue
        # Newton stalled: nonlinear Gauss-Seidel sweeps, one species at a time
        converged = False
        for _ in range(gs_sweeps):
            for i in range(system.k):
                ri = system.species_residual(i, u)
                ri_norm = system.h * float(np.linalg.norm(ri))
                goal = 0.25 * ri_norm
                for _ in range(8):
                    if system.h * float(np.linalg.norm(ri)) <= goal:
                        break
                    Ji = system.species_jacobian(i, u)
                    try:
                        s = splu(Ji.tocsc()).solve(-ri)
                    except RuntimeError:
                        break
                    u[i] = u[i] + s
                    ri = system.species_residual(i, u)
            res = system.residual(u)
            rnorm = system.res_norm(res)
            history.append(rnorm)
            iterations += 1
            if rnorm <= target():
                converged = True
                break
        if not converged:
            raise NonlinearSolveError(
                f"gauss-seidel fallback stalled at residual {rnorm:.3e}",
                last_iterate=wrap(u), residual_history=history)
        break

    # polish toward machine-level nodewise residuals (see diagnostics tolerances)
    for _ in range(2):
        J = system.jacobian(u)
        try:
            step = splu(J).solve(-np.concatenate(res))
        except RuntimeError:
            break
        n = res[0].size
        trial = [u[i] + step[i * n:(i + 1) * n] for i in range(system.k)]
        res_t = system.residual(trial)
        rt = system.res_norm(res_t)
        if rt < rnorm:
            u, res, rnorm = trial, res_t, rt
            history.append(rnorm)
            iterations += 1
        else:
            break

    return wrap(u), iterations
