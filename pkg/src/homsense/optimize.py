"""One-dimensional maximization by golden-section search."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_max(f, lo, hi, tol, max_iter=200):
    """Maximize a unimodal scalar function on [lo, hi].

    Returns (x, f(x)) once the bracket width falls below tol.  On plateaus
    the search settles anywhere inside the flat region, which callers handle
    by seeding the bracket from a prior grid scan.
    """
    if hi < lo:
        lo, hi = hi, lo
    width = hi - lo
    if width <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    x1 = lo + INV_PHI_SQ * width
    x2 = lo + INV_PHI * width
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(max_iter):
        if width <= tol:
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            width = hi - lo
            x1 = lo + INV_PHI_SQ * width
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            width = hi - lo
            x2 = lo + INV_PHI * width
            f2 = f(x2)
    if f1 >= f2:
        return x1, f1
    return x2, f2
