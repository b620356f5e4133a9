"""Gamma and upper incomplete gamma functions of positive integer order.

For integer order k the upper incomplete gamma function

    Gamma(k, x) = integral_x^inf t^(k-1) e^(-t) dt

reduces to the finite sum

    Gamma(k, x) = (k-1)! * exp(-x) * sum_{n=0}^{k-1} x^n / n!

which is exact in structure (no series truncation, no continued-fraction
tuning).  The sum is accumulated with the exp(-x) factor folded into the
terms, so every term is a Poisson probability <= 1 and nothing overflows.
For x large enough that exp(-x) itself underflows, the terms are formed in
log space instead.
"""

import math
import operator

# 149! ~ 3.8e260 still fits in a double; factorials much past that do not,
# and relay chains are tens of hops at most.
MAX_ORDER = 150

# exp(-x) is representable as a normal double below this.
_EXP_UNDERFLOW = 700.0


def _check_order(k) -> int:
    k = operator.index(k)
    if k < 1:
        raise ValueError(f"order must be a positive integer, got {k}")
    if k > MAX_ORDER:
        raise OverflowError(
            f"order {k} exceeds {MAX_ORDER}; (k-1)! would overflow a double"
        )
    return k


def gamma_int(k) -> float:
    """Gamma(k) = (k-1)! for integer k >= 1."""
    k = _check_order(k)
    return float(math.factorial(k - 1))


def upper_incomplete_gamma_int(k, x: float) -> float:
    """Gamma(k, x) for integer k >= 1 and x >= 0.

    Gamma(k, 0) equals Gamma(k) and the value decreases strictly in x.
    """
    k = _check_order(k)
    x = float(x)
    if x < 0.0 or math.isnan(x):
        raise ValueError(f"x must be non-negative, got {x}")
    if x == 0.0:
        return gamma_int(k)
    if x <= _EXP_UNDERFLOW:
        # term_n = exp(-x) * x^n / n!, built by recurrence
        term = math.exp(-x)
        total = term
        for n in range(1, k):
            term *= x / n
            total += term
    else:
        log_x = math.log(x)
        total = 0.0
        for n in range(k):
            total += math.exp(n * log_x - x - math.lgamma(n + 1))
    return gamma_int(k) * total
