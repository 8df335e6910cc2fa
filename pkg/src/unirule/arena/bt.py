"""Bradley-Terry fitting with an anchored coefficient and robust errors.

The model: P(i beats j) = sigma(xi_i - xi_j). Fractional win counts w_ij
aggregate the judgments (a tie adds half a win each way). The negative
log-likelihood

    L(xi) = sum over ordered pairs i != j of  -w_ij * log sigma(xi_i - xi_j)

is convex; one coefficient is pinned to zero (the anchor) to remove the
translation invariance, and the remaining coordinates are solved by damped
Newton. Standard errors come from the sandwich estimator H^-1 S H^-1 built
from per-judgment score vectors, which stays honest when the model is
misspecified.
"""

from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from unirule.errors import (
    DisconnectedGraph,
    InconsistentMethods,
    NonConvergence,
    SingularHessian,
)

GRADIENT_TOLERANCE = 1e-8
MAX_ITERATIONS = 200
Z_95 = 1.96

OUTCOME_WEIGHT = {"a": 1.0, "b": 0.0, "tie": 0.5}  # win weight for method_a


def sigma(x):
    """Logistic function, stable at large |x|."""
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


def log_sigma(x):
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


@dataclass
class WinMatrix:
    methods: list
    w: np.ndarray

    def __post_init__(self):
        m = len(self.methods)
        if self.w.shape != (m, m):
            raise ValueError(f"w must be {m}x{m}, got {self.w.shape}")
        if np.any(np.diag(self.w) != 0):
            raise ValueError("diagonal of w must be zero")
        if np.any(self.w < 0):
            raise ValueError("win counts must be non-negative")

    def index(self, method: str) -> int:
        return self.methods.index(method)


@dataclass
class BTFit:
    methods: list
    xi: np.ndarray
    anchor: str
    converged: bool
    gradient_norm: float
    se: np.ndarray | None = None
    ci_low: np.ndarray | None = None
    ci_high: np.ndarray | None = None
    n_judgments: float = 0.0

    def coefficient(self, method: str) -> float:
        return float(self.xi[self.methods.index(method)])


def build_win_matrix(judgments, methods: list | None = None) -> WinMatrix:
    """Aggregate judgments into fractional win counts; ties split evenly."""
    if not judgments:
        raise InconsistentMethods("no judgments to aggregate")
    seen = []
    for j in judgments:
        for name in (j.method_a, j.method_b):
            if name not in seen:
                seen.append(name)
    if methods is None:
        methods = sorted(seen)
    elif set(seen) - set(methods):
        raise InconsistentMethods(
            f"judgments mention methods outside {methods}: {sorted(set(seen) - set(methods))}"
        )
    index = {name: i for i, name in enumerate(methods)}
    w = np.zeros((len(methods), len(methods)), dtype=np.float64)
    for j in judgments:
        a, b = index[j.method_a], index[j.method_b]
        if a == b:
            raise InconsistentMethods(f"self-comparison for {j.method_a}")
        weight = OUTCOME_WEIGHT[j.outcome]
        w[a, b] += weight
        w[b, a] += 1.0 - weight
    return WinMatrix(methods=methods, w=w)


def bt_nll(w: np.ndarray, xi: np.ndarray) -> float:
    diff = xi[:, None] - xi[None, :]
    return float(-(w * log_sigma(diff)).sum())


def bt_gradient(w: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """d L / d xi_i = sum_j (w_ij + w_ji) sigma(xi_i - xi_j) - w_ij."""
    diff = xi[:, None] - xi[None, :]
    n = w + w.T
    return ((n * sigma(diff)) - w).sum(axis=1)


def bt_hessian(w: np.ndarray, xi: np.ndarray) -> np.ndarray:
    diff = xi[:, None] - xi[None, :]
    p = sigma(diff)
    curvature = (w + w.T) * p * (1.0 - p)
    h = -curvature
    np.fill_diagonal(h, 0.0)
    np.fill_diagonal(h, curvature.sum(axis=1) - np.diag(curvature))
    return h


def _check_connected(matrix: WinMatrix, anchor_index: int) -> None:
    n = matrix.w + matrix.w.T
    reachable = {anchor_index}
    frontier = deque([anchor_index])
    while frontier:
        i = frontier.popleft()
        for j in range(len(matrix.methods)):
            if j not in reachable and n[i, j] > 0:
                reachable.add(j)
                frontier.append(j)
    missing = [m for i, m in enumerate(matrix.methods) if i not in reachable]
    if missing:
        raise DisconnectedGraph(
            f"methods {missing} have no comparison path to the anchor"
        )


def fit_bt(
    matrix: WinMatrix,
    anchor: str,
    tol: float = GRADIENT_TOLERANCE,
    max_iter: int = MAX_ITERATIONS,
) -> BTFit:
    """Damped Newton on the anchor-reduced coordinates.

    The problem dimension is tiny (M - 1), so exact Newton steps with an
    Armijo backtracking line search converge in a handful of iterations;
    a near-singular Hessian falls back to a plain gradient step.
    """
    if anchor not in matrix.methods:
        raise ValueError(f"anchor {anchor!r} is not among {matrix.methods}")
    anchor_index = matrix.index(anchor)
    _check_connected(matrix, anchor_index)

    w = matrix.w
    m = len(matrix.methods)
    reduced = [i for i in range(m) if i != anchor_index]
    xi = np.zeros(m, dtype=np.float64)

    for _ in range(max_iter):
        gradient = bt_gradient(w, xi)[reduced]
        gradient_norm = float(np.max(np.abs(gradient))) if reduced else 0.0
        if gradient_norm < tol:
            return BTFit(
                methods=list(matrix.methods),
                xi=xi,
                anchor=anchor,
                converged=True,
                gradient_norm=gradient_norm,
                n_judgments=float(w.sum()),
            )
        hessian = bt_hessian(w, xi)[np.ix_(reduced, reduced)]
        try:
            step = np.linalg.solve(hessian, -gradient)
            if not np.all(np.isfinite(step)) or float(gradient @ step) >= 0:
                step = -gradient
        except np.linalg.LinAlgError:
            step = -gradient

        value = bt_nll(w, xi)
        slope = float(gradient @ step)
        # Near the optimum the per-step nll decrease drops below float64
        # resolution while the gradient is still measurable, so a step is
        # also accepted when it shrinks the gradient norm.
        slack = 1e-12 * max(1.0, abs(value))
        t = 1.0
        while t > 1e-12:
            trial = xi.copy()
            trial[reduced] += t * step
            if bt_nll(w, trial) <= value + 1e-4 * t * slope + slack:
                xi = trial
                break
            if float(np.max(np.abs(bt_gradient(w, trial)[reduced]))) < gradient_norm:
                xi = trial
                break
            t *= 0.5
        else:
            break  # no descent possible: numerically stuck

    raise NonConvergence(
        f"gradient norm still >= {tol} after {max_iter} iterations "
        f"(separated data has no finite optimum)"
    )


def _score_table(judgments, methods: list) -> Counter:
    """Counts of (i, j, y): judgments between i and j with win weight y for i."""
    index = {name: k for k, name in enumerate(methods)}
    table = Counter()
    for j in judgments:
        if j.method_a not in index or j.method_b not in index:
            raise InconsistentMethods(
                f"judgment mentions methods outside {methods}: "
                f"({j.method_a}, {j.method_b})"
            )
        table[(index[j.method_a], index[j.method_b], OUTCOME_WEIGHT[j.outcome])] += 1
    return table


def sandwich_se(fit: BTFit, judgments) -> np.ndarray:
    """Robust standard errors; fills se/ci fields on the fit and returns se.

    Var = H^-1 S H^-1 on the reduced coordinates, where S is the sum of
    outer products of per-judgment scores: a judgment between (i, j) with
    win weight y contributes (y - sigma(xi_i - xi_j)) at i and its negation
    at j. The anchor keeps se = 0 (it is pinned, not estimated).
    """
    if not fit.converged:
        raise ValueError("sandwich_se requires a converged fit")
    methods = fit.methods
    anchor_index = methods.index(fit.anchor)
    reduced = [i for i in range(len(methods)) if i != anchor_index]

    w = np.zeros((len(methods), len(methods)))
    table = _score_table(judgments, methods)
    for (i, j, y), count in table.items():
        w[i, j] += y * count
        w[j, i] += (1.0 - y) * count

    hessian = bt_hessian(w, fit.xi)[np.ix_(reduced, reduced)]
    s = np.zeros_like(hessian)
    position = {full: r for r, full in enumerate(reduced)}
    for (i, j, y), count in table.items():
        residual = y - float(sigma(fit.xi[i] - fit.xi[j]))
        g = np.zeros(len(reduced))
        if i in position:
            g[position[i]] = residual
        if j in position:
            g[position[j]] = -residual
        s += count * np.outer(g, g)

    try:
        h_inv = np.linalg.inv(hessian)
    except np.linalg.LinAlgError as exc:
        raise SingularHessian(f"Hessian not invertible: {exc}") from exc
    if not np.all(np.isfinite(h_inv)):
        raise SingularHessian("Hessian inverse has non-finite entries")

    variance = h_inv @ s @ h_inv
    se = np.zeros(len(methods))
    se[reduced] = np.sqrt(np.clip(np.diag(variance), 0.0, None))

    fit.se = se
    fit.ci_low = fit.xi - Z_95 * se
    fit.ci_high = fit.xi + Z_95 * se
    return se
