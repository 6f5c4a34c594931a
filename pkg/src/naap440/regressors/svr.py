"""Epsilon-insensitive support vector regression, solved by SMO.

The dual is written over beta = alpha - alpha*:

    minimize  W(beta) = 1/2 beta' K beta - y' beta + epsilon * ||beta||_1
    subject to  sum(beta) = 0,  -C <= beta_i <= C

Prediction is f(x) = sum_i beta_i k(x_i, x) + b.  Each iteration picks the
maximal violating pair: every point constrains the feasible offset multiplier
v (= -b) to an interval [low_i, up_i] derived from its KKT case, and the pair
is (argmax low, argmin up).  The two coefficients are then optimized jointly
in closed form along the sum constraint; the one-dimensional objective is a
quadratic plus two hinge terms, minimized exactly over its breakpoint regions.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, ConvergenceError
from .base import FittedModel, RegressorSpec, register

_KERNELS = ("rbf", "polynomial", "linear")


def _resolve_gamma(gamma, X: np.ndarray) -> float:
    if gamma == "scale":
        var = float(X.var())
        return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
    gamma = float(gamma)
    if gamma <= 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    return gamma


def kernel_matrix(kind: str, U: np.ndarray, V: np.ndarray, gamma: float,
                  degree: int, coef0: float) -> np.ndarray:
    if kind == "linear":
        return U @ V.T
    if kind == "polynomial":
        return (gamma * (U @ V.T) + coef0) ** degree
    if kind == "rbf":
        sq = (U * U).sum(axis=1)[:, None] + (V * V).sum(axis=1)[None, :] \
            - 2.0 * (U @ V.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ConfigError(f"kernel must be one of {_KERNELS}, got {kind!r}")


def _offset_intervals(beta: np.ndarray, g: np.ndarray, C: float,
                      epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-point feasible interval [low, up] for the offset multiplier v."""
    tiny = 1e-10 * C
    low = np.full(beta.shape, -np.inf)
    up = np.full(beta.shape, np.inf)
    gp, gm = g + epsilon, g - epsilon
    at_upper = beta >= C - tiny
    at_lower = beta <= -C + tiny
    pos = (beta > tiny) & ~at_upper
    neg = (beta < -tiny) & ~at_lower
    zero = ~(at_upper | at_lower | pos | neg)
    low[at_upper] = gp[at_upper]
    low[pos] = gp[pos]
    up[pos] = gp[pos]
    low[zero] = gm[zero]
    up[zero] = gp[zero]
    low[neg] = gm[neg]
    up[neg] = gm[neg]
    up[at_lower] = gm[at_lower]
    return low, up


def _pair_step(K: np.ndarray, g: np.ndarray, beta: np.ndarray, i: int, j: int,
               C: float, epsilon: float) -> float:
    """Exact minimizer t of the restricted objective, moving beta_i by +t and
    beta_j by -t inside the box."""
    lo = max(-C - beta[i], beta[j] - C)
    hi = min(C - beta[i], beta[j] + C)
    if hi <= lo:
        return 0.0
    eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
    slope = g[i] - g[j]

    def hinge(t: float) -> float:
        # |b_i+t| - |b_i| + |b_j-t| - |b_j| written as the integral of the
        # sign pattern from 0 to t: products only, so a descent of order t^2
        # stays measurable where the direct difference would round to zero
        if t == 0.0:
            return 0.0
        a, b = (0.0, t) if t > 0 else (t, 0.0)
        pts = [a, *sorted(k for k in (-beta[i], beta[j]) if a < k < b), b]
        total = 0.0
        for u, v in zip(pts, pts[1:]):
            mid = 0.5 * (u + v)
            total += (v - u) * (np.sign(beta[i] + mid) - np.sign(beta[j] - mid))
        return total if t > 0 else -total

    def delta(t: float) -> float:
        return 0.5 * eta * t * t + slope * t + epsilon * hinge(t)

    points = sorted({lo, hi, *(k for k in (-beta[i], beta[j]) if lo < k < hi)})
    candidates = list(points)
    if eta > 0:
        for a, b in zip(points[:-1], points[1:]):
            mid = 0.5 * (a + b)
            s_i = np.sign(beta[i] + mid)
            s_j = np.sign(beta[j] - mid)
            t_star = -(slope + epsilon * (s_i - s_j)) / eta
            candidates.append(min(max(t_star, a), b))
    best = min(candidates, key=delta)
    return best if delta(best) < 0 else 0.0


class SVRModel(FittedModel):
    def __init__(self, spec: RegressorSpec, support: np.ndarray,
                 coef: np.ndarray, intercept: float, kind: str, gamma: float,
                 degree: int, coef0: float, num_features: int):
        super().__init__(spec, num_features)
        self.support = support
        self.coef = coef
        self.intercept = intercept
        self.kind = kind
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0

    def _predict(self, X: np.ndarray) -> np.ndarray:
        if len(self.support) == 0:
            return np.full(len(X), self.intercept)
        K = kernel_matrix(self.kind, X, self.support, self.gamma, self.degree,
                          self.coef0)
        return K @ self.coef + self.intercept


def _duality_gap(K, y, beta, b, C, epsilon) -> float:
    quad = 0.5 * float(beta @ K @ beta)
    dual = float(y @ beta) - quad - epsilon * float(np.abs(beta).sum())
    f = K @ beta + b
    slack = np.maximum(np.abs(y - f) - epsilon, 0.0)
    primal = quad + C * float(slack.sum())
    return primal - dual


@register("SVR",
          {"kernel": "rbf", "C": 1.0, "epsilon": 0.1, "gamma": "scale",
           "degree": 3, "coef0": 0.0, "tol": 1e-3, "max_iter": 1_000_000},
          aliases=("supportvectorregression",))
def fit_svr_spec(X, y, params, spec) -> SVRModel:
    kind = {"poly": "polynomial"}.get(params["kernel"], params["kernel"])
    if kind not in _KERNELS:
        raise ConfigError(f"kernel must be one of {_KERNELS}, got {kind!r}")
    C = float(params["C"])
    epsilon = float(params["epsilon"])
    tol = float(params["tol"])
    max_iter = int(params["max_iter"])
    if C <= 0:
        raise ConfigError(f"C must be positive, got {C}")
    if epsilon < 0:
        raise ConfigError(f"epsilon must be nonnegative, got {epsilon}")
    degree = int(params["degree"])
    if degree < 1:
        raise ConfigError(f"degree must be >= 1, got {degree}")
    gamma = _resolve_gamma(params["gamma"], X) if kind != "linear" else 1.0
    coef0 = float(params["coef0"])

    n = len(y)
    K = kernel_matrix(kind, X, X, gamma, degree, coef0)
    beta = np.zeros(n)
    g = -y.copy()  # g = K beta - y
    violation = 0.0
    for _ in range(max_iter):
        low, up = _offset_intervals(beta, g, C, epsilon)
        i = int(np.argmax(low))
        j = int(np.argmin(up))
        violation = low[i] - up[j]
        if violation <= tol:
            b = -0.5 * (low[i] + up[j])
            break
        t = _pair_step(K, g, beta, i, j, C, epsilon)
        if t == 0.0:
            # maximal violating pair is blocked: numerical stall
            raise ConvergenceError(
                f"SVR stalled at KKT violation {violation:.3e}",
                kkt_violation=float(violation),
                duality_gap=_duality_gap(K, y, beta,
                                         -0.5 * (low[i] + up[j]), C, epsilon),
            )
        beta[i] += t
        beta[j] -= t
        g += t * (K[:, i] - K[:, j])
    else:
        low, up = _offset_intervals(beta, g, C, epsilon)
        b = -0.5 * (low.max() + up.min())
        raise ConvergenceError(
            f"SVR did not converge in {max_iter} iterations "
            f"(KKT violation {violation:.3e})",
            kkt_violation=float(violation),
            duality_gap=_duality_gap(K, y, beta, b, C, epsilon),
        )

    keep = beta != 0.0
    return SVRModel(spec, X[keep].copy(), beta[keep], float(b), kind, gamma,
                    degree, coef0, X.shape[1])


def fit_svr(kernel: str, C: float, epsilon: float, gamma_or_degree, X, y,
            **extra) -> SVRModel:
    """Convenience wrapper mirroring the external interface.

    ``gamma_or_degree`` is the kernel's main shape parameter: gamma for rbf,
    degree for polynomial; ignored for linear.
    """
    from .base import fit

    kind = {"poly": "polynomial"}.get(kernel, kernel)
    params: dict = {"kernel": kind, "C": C, "epsilon": epsilon, **extra}
    if kind == "rbf" and gamma_or_degree is not None:
        params["gamma"] = gamma_or_degree
    elif kind == "polynomial" and gamma_or_degree is not None:
        params["degree"] = int(gamma_or_degree)
    return fit(RegressorSpec("SVR", params), X, y)
