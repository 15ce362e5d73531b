"""Randomized checks of the four update-algebra laws.

For each sampled triple of colours the checker measures the worst
floating-point violation of

* idempotence:         a >_s a == a
* left invertibility:  discount(fuse(a, s, b), s, b) == a
* self-distributivity: (a >_s b) >_t c == (a >_t c) >_s (b >_t c)
* identity:            a >_0 b == a

Idempotence and invertibility are also exercised at derived inverse
weights s' = -s/(1-s), where the operations are only partially defined;
pairs undefined on both sides are skipped and counted, an asymmetric
failure is reported separately.  Distributivity is sampled on the
forward weight range [0, 0.95], where every variant is total.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import OpParam, discount, fuse
from .colours import Colour, colour_distance
from .errors import NotInvertibleHere, QnetError
from .sampling import random_colour

AXIOM_NAMES = ("idempotence", "left_inverse", "self_distributivity", "identity")


@dataclass(frozen=True)
class AxiomReport:
    kind: str
    samples: int
    max_violation: dict[str, float]
    skipped: dict[str, int]
    definedness_mismatches: int

    def ok(self, tol: float) -> bool:
        return (
            self.definedness_mismatches == 0
            and all(v < tol for v in self.max_violation.values())
        )

    def summary(self) -> str:
        parts = [f"{name}={self.max_violation[name]:.3e}" for name in AXIOM_NAMES]
        return f"{self.kind} ({self.samples} samples): " + ", ".join(parts)


def check_axioms(kind: str, n_samples: int, seed: int, dim: int = 3) -> AxiomReport:
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    worst = {name: 0.0 for name in AXIOM_NAMES}
    skipped = {name: 0 for name in AXIOM_NAMES}
    mismatches = 0

    for i in range(n_samples):
        a = random_colour(rng, kind, dim)
        b = random_colour(rng, kind, dim)
        c = random_colour(rng, kind, dim)
        s = float(rng.uniform(0.0, 0.95))
        t = float(rng.uniform(0.0, 0.95))
        # every other draw also exercises the derived inverse weight
        s_idem = s if i % 2 == 0 else -s / (1.0 - s)

        try:
            worst["idempotence"] = max(
                worst["idempotence"], colour_distance(fuse(a, OpParam(s_idem), a), a)
            )
        except NotInvertibleHere:
            skipped["idempotence"] += 1

        try:
            ab = fuse(a, OpParam(s_idem), b)
        except NotInvertibleHere:
            skipped["left_inverse"] += 1
        else:
            try:
                back = discount(ab, OpParam(s_idem), b)
            except NotInvertibleHere:
                # the law promises the inverse exists whenever the fuse does
                mismatches += 1
            else:
                worst["left_inverse"] = max(
                    worst["left_inverse"], colour_distance(back, a)
                )

        lhs = rhs = None
        lhs_err = rhs_err = False
        try:
            lhs = fuse(fuse(a, OpParam(s), b), OpParam(t), c)
        except QnetError:
            lhs_err = True
        try:
            rhs = fuse(fuse(a, OpParam(t), c), OpParam(s), fuse(b, OpParam(t), c))
        except QnetError:
            rhs_err = True
        if lhs_err != rhs_err:
            mismatches += 1
        elif lhs_err:
            skipped["self_distributivity"] += 1
        else:
            worst["self_distributivity"] = max(
                worst["self_distributivity"], colour_distance(lhs, rhs)
            )

        worst["identity"] = max(
            worst["identity"], colour_distance(fuse(a, OpParam(0.0), b), a)
        )

    return AxiomReport(
        kind=kind,
        samples=n_samples,
        max_violation=worst,
        skipped=skipped,
        definedness_mismatches=mismatches,
    )
