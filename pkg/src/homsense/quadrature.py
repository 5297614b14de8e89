"""Numerical integration over the momentum-difference axis.

Two rules are provided.  The adaptive Simpson rule integrates arbitrary
integrands over a finite symmetric range and refines in vectorized waves
until a relative tolerance is met.  The Gauss-Hermite rule exploits the
Gaussian envelope analytically and is exact for polynomial-times-Gaussian
integrands at modest order.

Gauss-Hermite suits envelope-times-smooth integrands, such as the
loss-free information integrand, where the non-Gaussian factor is entire.
Integrands with a near-vanishing fringe denominator (partial visibility
under photon loss) have complex poles close to the real axis, so their
Hermite expansion stalls; the order ladder then raises QuadratureError
rather than return an unconverged value.  Use the adaptive rule there.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import roots_hermite

from .errors import DomainError, QuadratureError

ADAPTIVE_SIMPSON = "adaptive-simpson"
GAUSS_HERMITE = "gauss-hermite"

# seed intervals and mandatory refinement depth guard against premature
# acceptance of narrow features sitting between coarse nodes
_SEED_INTERVALS = 32
_MIN_DEPTH = 3
_GH_ORDERS = (32, 64, 128, 256, 512, 1024)
# exp(x^2) compensation overflows past the order-256 node range
_GH_PLAIN_ORDERS = (32, 64, 128, 256)


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration policy for all momentum-difference integrals.

    Fields:
        rule: "adaptive-simpson" or "gauss-hermite".
        half_range: integration half-width in multiples of the momentum
            difference standard deviation sqrt(2)*sigma_k.
        rel_tol: target relative tolerance.
        max_subdivisions: refinement-depth cap for the adaptive rule.
    """

    rule: str = ADAPTIVE_SIMPSON
    half_range: float = 8.0
    rel_tol: float = 1.0e-9
    max_subdivisions: int = 32

    def __post_init__(self):
        if self.rule not in (ADAPTIVE_SIMPSON, GAUSS_HERMITE):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.half_range < 6.0:
            raise DomainError("half_range must be at least 6 standard deviations")
        if self.rel_tol <= 0.0:
            raise DomainError("rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


class QuadratureResult(NamedTuple):
    value: float
    error_estimate: float


@lru_cache(maxsize=None)
def _hermgauss_cached(order):
    # scipy's recurrence-based nodes stay finite at high order where the
    # numpy polynomial routine overflows
    return roots_hermite(order)


def _simpson(widths, f_lo, f_mid, f_hi):
    return widths / 6.0 * (f_lo + 4.0 * f_mid + f_hi)


def _adaptive_simpson(f, lo, hi, rel_tol, max_subdivisions):
    """Vectorized adaptive Simpson with Richardson extrapolation.

    All pending subintervals of a refinement wave are evaluated in a single
    call to f, so f must accept ndarray input.
    """
    span = hi - lo
    edges = np.linspace(lo, hi, _SEED_INTERVALS + 1)
    a = edges[:-1]
    b = edges[1:]
    mids = 0.5 * (a + b)
    nodes = np.concatenate([edges, mids])
    vals = np.asarray(f(nodes), dtype=float)
    fa = vals[: _SEED_INTERVALS]
    fb = vals[1 : _SEED_INTERVALS + 1]
    fm = vals[_SEED_INTERVALS + 1 :]
    s_whole = _simpson(b - a, fa, fm, fb)

    total = 0.0
    total_abs = 0.0
    err_total = 0.0
    for depth in range(1, max_subdivisions + 1):
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        new_vals = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        flm = new_vals[: a.size]
        frm = new_vals[a.size :]
        s_left = _simpson(m - a, fa, flm, fm)
        s_right = _simpson(b - m, fm, frm, fb)
        s_fine = s_left + s_right
        err = np.abs(s_fine - s_whole) / 15.0
        abs_fine = _simpson(m - a, np.abs(fa), np.abs(flm), np.abs(fm)) + _simpson(
            b - m, np.abs(fm), np.abs(frm), np.abs(fb)
        )
        scale = total_abs + float(np.sum(abs_fine))
        budget = rel_tol * scale * (b - a) / span + 1.0e-300
        done = err <= budget
        if depth <= _MIN_DEPTH:
            done &= False
        total += float(np.sum((s_fine + (s_fine - s_whole) / 15.0)[done]))
        total_abs += float(np.sum(abs_fine[done]))
        err_total += float(np.sum(err[done]))
        keep = ~done
        if not np.any(keep):
            return total, err_total
        a, m_k, b = a[keep], m[keep], b[keep]
        fa_k, fm_k, fb_k = fa[keep], fm[keep], fb[keep]
        flm_k, frm_k = flm[keep], frm[keep]
        a = np.concatenate([a, m_k])
        b = np.concatenate([m_k, b])
        fa = np.concatenate([fa_k, fm_k])
        fb = np.concatenate([fm_k, fb_k])
        fm = np.concatenate([flm_k, frm_k])
        s_whole = np.concatenate([s_left[keep], s_right[keep]])

    leftover = float(np.sum(s_whole))
    pending_err = float(np.sum(np.abs(s_whole))) * rel_tol + err_total
    achieved = (err_total + pending_err) / max(total_abs + abs(leftover), 1.0e-300)
    raise QuadratureError(
        f"adaptive Simpson did not converge within {max_subdivisions} subdivisions "
        f"(achieved relative tolerance {achieved:.3e})",
        achieved_tolerance=achieved,
    )


def _gauss_hermite_ladder(orders, evaluate, rel_tol):
    previous = None
    achieved = None
    for order in orders:
        x, w = _hermgauss_cached(order)
        value = evaluate(x, w)
        if previous is not None:
            delta = abs(value - previous)
            if delta <= rel_tol * max(abs(value), 1.0e-300):
                return value, delta
            achieved = delta / max(abs(value), 1.0e-300)
        previous = value
    raise QuadratureError(
        "Gauss-Hermite order ladder exhausted without convergence",
        achieved_tolerance=achieved,
    )


def integrate(f: Callable, sigma_k: float, spec: QuadratureSpec) -> QuadratureResult:
    """Integrate f over the symmetric momentum-difference range.

    The range is spec.half_range multiples of sqrt(2)*sigma_k on each side.
    With the Gauss-Hermite rule the Gaussian weight is divided out
    numerically, which assumes f decays at least as fast as the envelope.
    """
    if sigma_k <= 0.0:
        raise DomainError("sigma_k must be positive")
    if spec.rule == ADAPTIVE_SIMPSON:
        half = spec.half_range * np.sqrt(2.0) * sigma_k
        value, err = _adaptive_simpson(f, -half, half, spec.rel_tol, spec.max_subdivisions)
        return QuadratureResult(value, err)

    scale = 2.0 * sigma_k

    def evaluate(x, w):
        vals = np.asarray(f(scale * x), dtype=float)
        comp = np.where(vals != 0.0, np.exp(x * x) * vals, 0.0)
        return float(np.sum(w * comp)) * scale

    value, delta = _gauss_hermite_ladder(_GH_PLAIN_ORDERS, evaluate, spec.rel_tol)
    return QuadratureResult(value, delta)


def integrate_envelope_weighted(
    smooth: Callable, sigma_k: float, spec: QuadratureSpec
) -> QuadratureResult:
    """Integrate envelope(delta_k) * smooth(delta_k) over the momentum axis.

    The envelope is the unit-mass Gaussian of the momentum difference with
    standard deviation sqrt(2)*sigma_k.  The Gauss-Hermite rule applies the
    substitution delta_k = 2*sigma_k*x so the weight is handled exactly.
    """
    if sigma_k <= 0.0:
        raise DomainError("sigma_k must be positive")
    if spec.rule == GAUSS_HERMITE:
        scale = 2.0 * sigma_k

        def evaluate(x, w):
            return float(np.sum(w * np.asarray(smooth(scale * x), dtype=float))) / np.sqrt(np.pi)

        value, delta = _gauss_hermite_ladder(_GH_ORDERS, evaluate, spec.rel_tol)
        return QuadratureResult(value, delta)

    norm = 1.0 / np.sqrt(4.0 * np.pi * sigma_k * sigma_k)
    inv_var = 1.0 / (4.0 * sigma_k * sigma_k)

    def full(delta_k):
        return norm * np.exp(-delta_k * delta_k * inv_var) * np.asarray(smooth(delta_k))

    half = spec.half_range * np.sqrt(2.0) * sigma_k
    value, err = _adaptive_simpson(full, -half, half, spec.rel_tol, spec.max_subdivisions)
    return QuadratureResult(value, err)
