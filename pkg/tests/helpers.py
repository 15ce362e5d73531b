"""Shared reference implementations, independent of the library paths."""

import numpy as np


def ci_scalar(mean_a, cov_a, s, mean_b, cov_b):
    """Scalar reference for the estimate-pair update rule."""
    prec = (1 - s) / cov_a + s / cov_b
    mean = ((1 - s) * mean_a / cov_a + s * mean_b / cov_b) / prec
    return mean, 1 / prec


def terminal_by_endpoint(net, colouring):
    """Terminal colours keyed by endpoint node, stable across rewrites."""
    out = {}
    for eid in net.terminal_edges():
        out[net.edges[eid].head] = colouring.edge_colour[eid]
    return out
