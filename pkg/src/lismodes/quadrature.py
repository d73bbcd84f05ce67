"""Globally adaptive tensor Gauss-Legendre quadrature over rectangles."""

from __future__ import annotations

import heapq
import math
from typing import Callable, Iterable, Tuple

import numpy as np

from lismodes.errors import ConvergenceError

Panel = Tuple[float, float, float, float]
DEFAULT_ORDER = 5
MAX_LEVEL = 12
MAX_PANELS = 400_000


class _Rule:
    def __init__(self, order: int):
        x, w = np.polynomial.legendre.leggauss(order)
        self.x = 0.5 * (x + 1.0)
        self.w = 0.5 * w
        self.ww = np.outer(self.w, self.w).ravel()

    def apply(self, f, panels: np.ndarray) -> np.ndarray:
        """Integrals of ``f`` over each row (u0, u1, v0, v1) of ``panels``."""
        u0, u1, v0, v1 = panels.T
        du, dv = u1 - u0, v1 - v0
        uu = u0[:, None] + du[:, None] * self.x[None, :]
        vv = v0[:, None] + dv[:, None] * self.x[None, :]
        U = np.repeat(uu, len(self.x), axis=1)
        V = np.tile(vv, (1, len(self.x)))
        vals = f(U, V)
        return (vals @ self.ww) * du * dv


def _split(p: Panel) -> list:
    u0, u1, v0, v1 = p
    um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
    return [(u0, um, v0, vm), (um, u1, v0, vm), (u0, um, vm, v1), (um, u1, vm, v1)]


def integrate_rectangles(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    panels: Iterable[Panel],
    rel_tol: float,
    *,
    order: int = DEFAULT_ORDER,
    max_level: int = MAX_LEVEL,
    max_panels: int = MAX_PANELS,
    abs_tol: float = 0.0,
) -> Tuple[float, float]:
    """Integrate ``f(u, v)`` (vectorized) over the union of ``panels``.

    Every live panel carries the sum over its four children as its value
    and the gap between that sum and its own single-panel rule as its error.
    The panel with the largest error is split until the summed error falls
    below ``max(rel_tol * |I|, abs_tol)``. Panels at ``max_level`` are not
    split further.

    Returns ``(integral, error_estimate)``; raises :class:`ConvergenceError`
    with the best estimate when the tolerance cannot be met.
    """
    rule = _Rule(order)
    heap = []
    frozen = []
    counter = 0

    def push(items, level, coarse):
        nonlocal counter
        kids = [c for p in items for c in _split(p)]
        vals = rule.apply(f, np.asarray(kids, dtype=float)).reshape(len(items), 4)
        d_total = d_err = 0.0
        for p, c, v in zip(items, coarse, vals):
            fine = math.fsum(v)
            err = abs(fine - c)
            entry = (-err, counter, p, level, fine, v)
            counter += 1
            if level >= max_level:
                frozen.append(entry)
            else:
                heapq.heappush(heap, entry)
            d_total += fine
            d_err += err
        return d_total, d_err

    roots = [tuple(map(float, p)) for p in panels]
    total, err = push(roots, 0, rule.apply(f, np.asarray(roots, dtype=float)))
    n_panels = len(roots)

    while err > max(rel_tol * abs(total), abs_tol):
        if not heap or n_panels + 3 > max_panels:
            total, err = _exact_totals(heap, frozen)
            if err <= max(rel_tol * abs(total), abs_tol):
                break
            raise ConvergenceError(
                "adaptive quadrature did not reach tolerance",
                total,
                err / abs(total) if total else err,
            )
        neg_err, _, p, level, fine, kid_vals = heapq.heappop(heap)
        dt, de = push(_split(p), level + 1, kid_vals)
        total += dt - fine
        err += de + neg_err
        n_panels += 3
    return _exact_totals(heap, frozen)


def _exact_totals(heap, frozen) -> Tuple[float, float]:
    entries = heap + frozen
    return math.fsum(e[4] for e in entries), math.fsum(-e[0] for e in entries)
