"""Probability measures, polyhedral seminorms, and W1 distances.

The dual route (maximize <mu - nu, f> over the seminorm's unit ball) works
for every polyhedral seminorm and is solved as an equality-form LP whose
dual vector is the optimal potential f.  The primal route is a transport
LP and needs a metric-backed seminorm; `both` cross-checks the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .metric_core import FiniteMetricSpace, MetricError
from .numerics import INF, Scalar, close, leq
from .simplex import LPInfeasible, solve_lp, transportation_simplex


class HostMismatch(MetricError):
    """Operands live on different host spaces."""


class PrimalUnavailable(MetricError):
    """Transport LP requested for a seminorm with no backing metric."""


@dataclass(frozen=True)
class Measure:
    host: FiniteMetricSpace
    weights: tuple


@dataclass(frozen=True)
class PolyhedralSeminorm:
    host: FiniteMetricSpace
    functionals: tuple  # coefficient tuples, each summing to zero
    zero_pairs: tuple = ()  # index pairs forced to equal values
    metric: FiniteMetricSpace | None = None  # set when the seminorm is a metric's

    def value(self, values: Sequence[Scalar], tol: Scalar = 0) -> Scalar:
        for i, j in self.zero_pairs:
            if abs(values[i] - values[j]) > tol:
                return INF
        best: Scalar = 0
        for c in self.functionals:
            v = abs(sum(ck * fk for ck, fk in zip(c, values)))
            if v > best:
                best = v
        return best


def measure(host: FiniteMetricSpace, weights: Sequence[Scalar], tol: Scalar = 0) -> Measure:
    w = tuple(weights)
    if len(w) != host.n:
        raise MetricError(f"{len(w)} weights for a host with {host.n} points")
    if any(wi < -tol for wi in w):
        raise MetricError("weights must be nonnegative")
    if abs(sum(w) - 1) > tol:
        raise MetricError(f"weights sum to {sum(w)}, expected 1")
    return Measure(host=host, weights=w)


def dirac(host: FiniteMetricSpace, i: int) -> Measure:
    if not 0 <= i < host.n:
        raise MetricError(f"index {i} out of range")
    return Measure(host=host, weights=tuple(1 if k == i else 0 for k in range(host.n)))


def mix_measures(lam: Scalar, a: Measure, b: Measure) -> Measure:
    if a.host != b.host:
        raise HostMismatch("cannot mix measures on different hosts")
    w = tuple(lam * wa + (1 - lam) * wb for wa, wb in zip(a.weights, b.weights))
    return Measure(host=a.host, weights=w)


def polyhedral_seminorm(
    host: FiniteMetricSpace,
    functionals: Sequence[Sequence[Scalar]],
    zero_pairs: Sequence[tuple] = (),
    metric: FiniteMetricSpace | None = None,
    tol: Scalar = 0,
) -> PolyhedralSeminorm:
    funcs = tuple(tuple(c) for c in functionals)
    for c in funcs:
        if len(c) != host.n:
            raise MetricError("functional length does not match the host")
        if abs(sum(c)) > tol:
            raise MetricError(f"functional {c} does not annihilate constants")
    pairs = tuple(tuple(p) for p in zero_pairs)
    for i, j in pairs:
        if not (0 <= i < host.n and 0 <= j < host.n):
            raise MetricError(f"zero pair ({i},{j}) out of range")
    return PolyhedralSeminorm(host=host, functionals=funcs, zero_pairs=pairs, metric=metric)


def lipschitz_seminorm_of(space: FiniteMetricSpace) -> PolyhedralSeminorm:
    functionals = []
    zero_pairs = []
    for i in range(space.n):
        for j in range(i + 1, space.n):
            dij = space.d(i, j)
            if dij == 0:
                zero_pairs.append((i, j))
                continue
            c = [0] * space.n
            c[i] = 1 / dij if isinstance(dij, float) else _frac(1, dij)
            c[j] = -c[i]
            functionals.append(tuple(c))
    return PolyhedralSeminorm(
        host=space, functionals=tuple(functionals), zero_pairs=tuple(zero_pairs), metric=space
    )


def _frac(num, den):
    from fractions import Fraction

    return Fraction(num) / Fraction(den)


def w1(
    mu: Measure,
    nu: Measure,
    seminorm: PolyhedralSeminorm,
    method: str = "both",
    tol: Scalar = 0,
) -> Scalar:
    if mu.host != nu.host or mu.host != seminorm.host:
        raise HostMismatch("mu, nu, and the seminorm must share one host")
    if method not in ("primal", "dual", "both"):
        raise MetricError(f"unknown method {method!r}")
    if method in ("primal", "both") and seminorm.metric is None:
        raise PrimalUnavailable("transport LP needs a metric-backed seminorm")
    primal = dual = None
    if method in ("primal", "both"):
        primal, _ = transportation_simplex(
            seminorm.metric.dist, mu.weights, nu.weights, tol=tol
        )
    if method in ("dual", "both"):
        dual, _ = w1_dual_potential(mu, nu, seminorm, tol=tol)
    if method == "primal":
        return primal
    if method == "dual":
        return dual
    if not close(primal, dual, tol):
        raise RuntimeError(f"transport value {primal} disagrees with dual value {dual}")
    return primal


def w1_dual_potential(
    mu: Measure, nu: Measure, seminorm: PolyhedralSeminorm, tol: Scalar = 0
):
    """Value and an optimal potential f with seminorm(f) <= 1."""
    if mu.host != nu.host or mu.host != seminorm.host:
        raise HostMismatch("mu, nu, and the seminorm must share one host")
    n = mu.host.n
    w = [wm - wn for wm, wn in zip(mu.weights, nu.weights)]
    columns = []
    costs = []
    for c in seminorm.functionals:
        columns.append(tuple(c))
        costs.append(1)
        columns.append(tuple(-ck for ck in c))
        costs.append(1)
    for i, j in seminorm.zero_pairs:
        col = [0] * n
        col[i] = 1
        col[j] = -1
        columns.append(tuple(col))
        costs.append(0)
        columns.append(tuple(-ck for ck in col))
        costs.append(0)
    rows = [[col[i] for col in columns] for i in range(n)]
    try:
        value, _, duals = solve_lp(costs, rows, w, tol=tol)
    except LPInfeasible:
        return INF, None
    return value, tuple(duals)


def dirac_to_pushforward_set(space: FiniteMetricSpace, z: int, subset) -> Scalar:
    """min over measures supported in the subset of W1 to the Dirac at z.

    Convexity collapses the optimum onto a single point, so this is the
    point-to-set distance; +inf for the empty set.
    """
    best = INF
    for j in subset:
        dzj = space.d(z, j)
        if dzj < best:
            best = dzj
    return best
