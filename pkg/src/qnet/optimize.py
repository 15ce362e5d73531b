"""Global weight optimization and local objectives for ranking networks.

The global objective is the sum over output edges of the log integral
of their unnormalized densities, minimized over the interaction weights
on (0, 1).  Local objectives rank equivalent networks: worst-case
consistency margin of the intermediate fused estimates, or the number
of tainted edges inside a protected region.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import OpParam
from .colours import UnnormalizedGaussian, GaussianEstimate
from .errors import (
    MissingRegion,
    MissingTrueCov,
    QnetError,
    SingularCovariance,
    VariantMismatch,
)
from .network import (
    Colouring,
    Network,
    canonical_key,
    fused_intermediate_edges,
    propagate,
)


class ObjectiveKind(enum.Enum):
    CHERNOFF = "chernoff"
    CONSISTENCY_MARGIN = "consistency_margin"
    TAINT_COUNT = "taint_count"


@dataclass(frozen=True)
class Objective:
    kind: ObjectiveKind = ObjectiveKind.CHERNOFF
    region: frozenset[str] | None = None
    true_cov: np.ndarray | None = None
    mask: object | None = None  # FaultMask, supplied by the fault simulator

    def __post_init__(self):
        if self.kind is ObjectiveKind.CONSISTENCY_MARGIN and self.true_cov is None:
            raise MissingTrueCov("consistency objective needs a true covariance")
        if self.kind is ObjectiveKind.TAINT_COUNT and self.region is None:
            raise MissingRegion("taint objective needs a protected region")
        if self.true_cov is not None:
            tc = np.asarray(self.true_cov, dtype=float)
            if tc.ndim == 0:
                tc = tc.reshape(1, 1)
            object.__setattr__(self, "true_cov", tc)
        if self.region is not None:
            object.__setattr__(self, "region", frozenset(self.region))


def log_integral(p: UnnormalizedGaussian) -> float:
    """Log of the total mass of an unnormalized Gaussian density."""
    if not isinstance(p, UnnormalizedGaussian):
        raise VariantMismatch(f"expected UnnormalizedGaussian, got {type(p).__name__}")
    try:
        chol = np.linalg.cholesky(p.cov)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance("covariance is not positive definite") from exc
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    n = p.dim
    return p.log_scale + 0.5 * n * math.log(2.0 * math.pi) + 0.5 * log_det


def chernoff_objective(net: Network, inputs, ops=None) -> float:
    """Sum of output-edge log integrals; requires log-linear Gaussian colours."""
    if net.quandloid_kind != "gaussian":
        raise VariantMismatch(
            f"global objective needs quandloid kind 'gaussian', got {net.quandloid_kind!r}"
        )
    colouring = propagate(net, inputs, ops)
    return _chernoff_of_colouring(net, colouring)


def _chernoff_of_colouring(net: Network, colouring: Colouring) -> float:
    return sum(log_integral(colouring.edge_colour[eid]) for eid in net.terminal_edges())


def local_objective(net: Network, colouring: Colouring, obj: Objective) -> float:
    """Score a coloured network; lower is better for every kind."""
    if obj.kind is ObjectiveKind.CHERNOFF:
        return _chernoff_of_colouring(net, colouring)

    if obj.kind is ObjectiveKind.CONSISTENCY_MARGIN:
        if obj.true_cov is None:
            raise MissingTrueCov("consistency objective needs a true covariance")
        from .algebra import consistent

        edges = fused_intermediate_edges(net)
        if obj.region is not None:
            edges = [e for e in edges if e in obj.region]
        if not edges:
            return -math.inf
        worst = math.inf
        for eid in edges:
            c = colouring.edge_colour[eid]
            if not isinstance(c, GaussianEstimate):
                raise VariantMismatch("consistency margins need estimate-pair colours")
            worst = min(worst, consistent(c, obj.true_cov).margin)
        return -worst

    if obj.kind is ObjectiveKind.TAINT_COUNT:
        if obj.region is None:
            raise MissingRegion("taint objective needs a protected region")
        if obj.mask is None:
            return 0.0
        from .faults import taint_propagate

        tainted = taint_propagate(net, obj.mask)
        return float(len(tainted & obj.region))

    raise ValueError(f"unknown objective kind {obj.kind!r}")


def select_best(candidates, obj: Objective):
    """Pick the candidate (net, colouring) minimizing the local objective."""
    if not candidates:
        raise ValueError("no candidates to select from")
    scored = [
        (local_objective(net, colouring, obj), canonical_key(net), i)
        for i, (net, colouring) in enumerate(candidates)
    ]
    scored.sort(key=lambda t: (t[0], t[1]))
    return candidates[scored[0][2]]


GRID = "grid"
COORDINATE = "coordinate"


def optimize_params(
    net: Network,
    inputs,
    free,
    method: str = GRID,
    grid_step: float = 0.05,
    objective: Objective | None = None,
    maximize: bool = False,
) -> dict[str, OpParam]:
    """Optimize the weights of the free interactions over (0, 1).

    Each element of ``free`` is an interaction id, or a tuple of ids
    that share a single weight variable (tying weights keeps rewrite
    sites alive, since crossing slides need exact weight equality).

    GRID exhausts the product grid stepped by ``grid_step``; COORDINATE
    runs cyclic golden-section sweeps on [0.01, 0.99] until the
    improvement falls below 1e-6 or 100 sweeps elapse.  Evaluation
    failures count as infinitely bad.  Ties resolve to the
    lexicographically smallest weight vector.
    """
    groups = sorted(tuple(g) if isinstance(g, (tuple, list, set, frozenset)) else (g,) for g in free)
    if not groups:
        raise ValueError("free interaction set is empty")
    for group in groups:
        for vid in group:
            if vid not in net.interactions:
                raise KeyError(f"unknown interaction {vid!r}")
    if not 0.0 < grid_step <= 0.5:
        raise ValueError("grid_step must lie in (0, 0.5]")
    obj = objective if objective is not None else Objective(ObjectiveKind.CHERNOFF)
    sign = -1.0 if maximize else 1.0

    def ops_for(values) -> dict[str, OpParam]:
        ops = {}
        for group, v in zip(groups, values):
            for vid in group:
                ops[vid] = OpParam(float(v))
        return ops

    def evaluate(values) -> float:
        try:
            colouring = propagate(net, inputs, ops_for(values))
            return sign * local_objective(net, colouring, obj)
        except QnetError:
            return math.inf

    if method == GRID:
        steps = int(round(1.0 / grid_step)) - 1
        axis = [grid_step * k for k in range(1, steps + 1)]
        best_val = math.inf
        best_point = None
        for point in itertools.product(axis, repeat=len(groups)):
            val = evaluate(point)
            if val < best_val:
                best_val = val
                best_point = point
        if best_point is None:
            raise QnetError("objective undefined on the whole grid")
        return ops_for(best_point)

    if method == COORDINATE:
        current = [0.5] * len(groups)
        current_val = evaluate(current)
        for _ in range(100):
            improved = current_val
            for i in range(len(groups)):
                def slice_fn(x, i=i):
                    point = list(current)
                    point[i] = x
                    return evaluate(point)

                x_best, v_best = _golden_section(slice_fn, 0.01, 0.99)
                if v_best < current_val:
                    current[i] = x_best
                    current_val = v_best
            if improved - current_val < 1e-6:
                break
        if not math.isfinite(current_val):
            raise QnetError("objective undefined near the starting point")
        return ops_for(current)

    raise ValueError(f"unknown method {method!r}")


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(fn, lo: float, hi: float, tol: float = 1e-8) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)
