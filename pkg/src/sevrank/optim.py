"""Limited-memory BFGS minimizer with backtracking line search.

General-purpose and deterministic: the objective is a callable returning
(value, gradient), the inverse-Hessian approximation lives in the last m
(s, y) displacement pairs via the standard two-loop recursion, and steps
are chosen by Armijo backtracking from a unit step.  Pairs with
non-positive curvature s.y are skipped, which keeps the implicit Hessian
approximation positive definite and every accepted step a descent step.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["LbfgsConfig", "OptimResult", "lbfgs_minimize", "check_gradient"]

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]

_CURVATURE_EPS = 1e-10


@dataclass(frozen=True)
class LbfgsConfig:
    memory: int = 10
    max_iter: int = 200
    grad_tol: float = 1e-6       # on the max-norm of the gradient
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 50

    def __post_init__(self) -> None:
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if not 0.0 < self.armijo_c < 1.0:
            raise ValueError("armijo_c must lie in (0, 1)")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ValueError("backtrack_factor must lie in (0, 1)")


@dataclass(eq=False)
class OptimResult:
    x: np.ndarray
    f_value: float
    grad_norm: float     # max-norm at x
    iterations: int
    converged: bool


def _evaluate(f: Objective, x: np.ndarray, iteration: int) -> tuple[float, np.ndarray]:
    value, grad = f(x)
    grad = np.asarray(grad, dtype=np.float64)
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise ValueError(
            f"non-finite objective or gradient at iteration {iteration}"
        )
    return float(value), grad


def _search_direction(
    grad: np.ndarray,
    history: deque[tuple[np.ndarray, np.ndarray, float]],
    gamma: float,
) -> np.ndarray:
    """Two-loop recursion: returns H_k . grad for the implicit H_k."""
    q = grad.copy()
    alphas = []
    for s, y, rho in reversed(history):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    q *= gamma
    for (s, y, rho), a in zip(history, reversed(alphas)):
        beta = rho * float(y @ q)
        q += (a - beta) * s
    return q


def lbfgs_minimize(
    f: Objective,
    x0: np.ndarray,
    config: LbfgsConfig = LbfgsConfig(),
    callback: Callable[[int, np.ndarray, float], None] | None = None,
) -> OptimResult:
    """Minimize f from x0; f maps a vector to (value, gradient).

    Returns once the gradient max-norm falls to grad_tol or max_iter
    accepted steps have run.  If Armijo backtracking exhausts
    max_backtracks the best point so far is returned with
    converged=False.  Non-finite objective values or gradients abort
    with the iteration index at which they were produced.  The sequence
    of accepted objective values is nonincreasing, and identical inputs
    reproduce identical iterates.  `callback(iteration, x, f)` fires
    after each accepted step.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    fx, grad = _evaluate(f, x, 0)
    history: deque[tuple[np.ndarray, np.ndarray, float]] = deque(
        maxlen=config.memory
    )
    gamma = 1.0
    iteration = 0
    while True:
        grad_norm = float(np.max(np.abs(grad))) if grad.size else 0.0
        if grad_norm <= config.grad_tol:
            return OptimResult(x, fx, grad_norm, iteration, converged=True)
        if iteration >= config.max_iter:
            return OptimResult(x, fx, grad_norm, iteration, converged=False)

        direction = -_search_direction(grad, history, gamma)
        slope = float(grad @ direction)
        if slope >= 0.0:
            # numerically degenerate curvature; fall back to steepest descent
            direction = -grad
            slope = -float(grad @ grad)

        step = 1.0
        accepted = False
        for _ in range(config.max_backtracks + 1):
            x_new = x + step * direction
            f_new, grad_new = _evaluate(f, x_new, iteration)
            if f_new <= fx + config.armijo_c * step * slope:
                accepted = True
                break
            step *= config.backtrack_factor
        if not accepted:
            return OptimResult(x, fx, grad_norm, iteration, converged=False)

        s = x_new - x
        y = grad_new - grad
        sy = float(s @ y)
        if sy > _CURVATURE_EPS:
            history.append((s, y, 1.0 / sy))
            gamma = sy / float(y @ y)
        x, fx, grad = x_new, f_new, grad_new
        iteration += 1
        if callback is not None:
            callback(iteration, x, fx)


def check_gradient(f: Objective, x: np.ndarray, h: float = 1e-6) -> float:
    """Max relative error of the analytic gradient vs central differences.

    Per coordinate the relative error uses max(1, |analytic|) as the
    denominator; the maximum over coordinates is returned.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=np.float64)
    _, grad = _evaluate(f, x, 0)
    worst = 0.0
    for i in range(len(x)):
        bump = np.zeros_like(x)
        bump[i] = h
        f_plus, _ = _evaluate(f, x + bump, 0)
        f_minus, _ = _evaluate(f, x - bump, 0)
        numeric = (f_plus - f_minus) / (2.0 * h)
        err = abs(numeric - grad[i]) / max(1.0, abs(grad[i]))
        worst = max(worst, err)
    return worst
