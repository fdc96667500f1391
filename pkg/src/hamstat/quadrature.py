"""Adaptive Simpson quadrature with Richardson-corrected panels."""

from __future__ import annotations

import math

from .errors import EvaluationError

__all__ = ["adaptive_simpson"]

MAX_EVALUATIONS = 2_000_000


class _Budget:
    def __init__(self, f, limit):
        self.f = f
        self.left = limit

    def __call__(self, x):
        self.left -= 1
        if self.left < 0:
            raise EvaluationError("quadrature evaluation budget exhausted (integrand too rough or noisy)")
        return self.f(x)


def _simpson_panel(f, a, fa, b, fb, tol, whole, fm, depth, max_depth, min_width, rtol):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    h = b - a
    left = h / 12.0 * (fa + 4.0 * flm + fm)
    right = h / 12.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth >= max_depth or abs(delta) <= 15.0 * max(tol, rtol * abs(left + right)) or h <= min_width:
        return left + right + delta / 15.0
    return _simpson_panel(f, a, fa, m, fm, 0.5 * tol, left, flm, depth + 1, max_depth, min_width, rtol) + _simpson_panel(
        f, m, fm, b, fb, 0.5 * tol, right, frm, depth + 1, max_depth, min_width, rtol
    )


def adaptive_simpson(f, a, b, tol=1e-10, breakpoints=(), max_depth=40, min_depth=3, max_evals=MAX_EVALUATIONS,
                     rtol=1e-13):
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    A panel is also accepted once its error estimate is below ``rtol`` times
    its own value, so integrals far larger than one do not chase an
    absolute tolerance beneath their rounding error.

    ``breakpoints`` split the interval where the integrand has kinks (e.g.
    the nodes of a piecewise interpolant). The tolerance is shared between
    pieces in proportion to their length. Every piece is bisected at least
    ``min_depth`` times before the error test so that a lucky agreement on
    the coarse panel cannot end the recursion early. Panels narrower than
    1e-12 of the interval scale are accepted as they are, and more than
    ``max_evals`` integrand calls raise :class:`EvaluationError`.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    f = _Budget(f, max_evals)
    min_width = 1e-12 * max(abs(a), abs(b), b - a)
    cuts = sorted({a, b, *(x for x in breakpoints if a < x < b)})
    total = 0.0
    length = b - a
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        piece_tol = tol * (hi - lo) / length
        total += _integrate_piece(f, lo, hi, piece_tol, max_depth, min_depth, min_width, rtol)
    if not math.isfinite(total):
        raise EvaluationError(f"non-finite integral over [{a}, {b}]")
    return sign * total


def _integrate_piece(f, a, b, tol, max_depth, min_depth, min_width, rtol):
    n = 2**min_depth
    h = (b - a) / n
    xs = [a + i * h for i in range(n)] + [b]
    fs = [f(x) for x in xs]
    total = 0.0
    for i in range(n):
        lo, hi = xs[i], xs[i + 1]
        m = 0.5 * (lo + hi)
        fm = f(m)
        whole = (hi - lo) / 6.0 * (fs[i] + 4.0 * fm + fs[i + 1])
        total += _simpson_panel(f, lo, fs[i], hi, fs[i + 1], tol / n, whole, fm, min_depth, max_depth, min_width, rtol)
    return total
