"""Two-node relay network with ground traffic entering at both nodes.

Total Poisson load ``lam`` is split: a fraction ``p`` enters at node 1 and is
relayed through node 2, the rest enters at node 2 directly.  Node 2 carries
everything, so its utilisation ``rho2 = lam/mu`` is the stability bottleneck.
The stage sojourn rates are ``alpha_k = mu*(1-rho_k)``; node-1 packets see the
sum of two independent exponentials with distinct rates (a hypoexponential
network time), node-2 packets a single M/M/1.

The average age of the delivered stream is the departure-probability mixture

    aoi = p * aoi_node1 + (1-p) * aoi_node2.

All rate-difference expressions are evaluated through
(1 - exp(-delta*x))/delta with expm1, which removes the cancellation at the
removable singularity alpha1 = alpha2 (p -> 1) and degrades gracefully to the
two-equal-stage (Erlang-2) forms at delta = 0.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SplitParams:
    """Service rate, total arrival rate, and the node-1 load fraction p."""

    mu: float
    lam: float
    p: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not self.lam < self.mu:
            raise ValueError(
                f"unstable network: rho2 = {self.lam / self.mu} >= 1 "
                "(node 2 carries the whole load)"
            )

    @property
    def lam1(self) -> float:
        return self.p * self.lam

    @property
    def lam2(self) -> float:
        return (1.0 - self.p) * self.lam

    @property
    def rho1(self) -> float:
        return self.lam1 / self.mu

    @property
    def rho2(self) -> float:
        return self.lam / self.mu

    @property
    def alpha1(self) -> float:
        return self.mu * (1.0 - self.rho1)

    @property
    def alpha2(self) -> float:
        return self.mu * (1.0 - self.rho2)

    @property
    def delta(self) -> float:
        """alpha1 - alpha2 = lam*(1-p) >= 0, zero exactly when p = 1."""
        return self.lam * (1.0 - self.p)

    @property
    def s_bar(self) -> float:
        """Mean node-1 service time 1/mu (the upstream service of node-1 packets)."""
        return 1.0 / self.mu


def _growth(delta: float, x: float) -> float:
    """(1 - exp(-delta*x))/delta, continuous at delta = 0 where it equals x."""
    if delta == 0.0:
        return x
    return -math.expm1(-delta * x) / delta


def hypoexp_pdf(params: SplitParams, t: float) -> float:
    """Density of the node-1 network time: sum of Exp(alpha1) and Exp(alpha2).

    alpha1*alpha2/(alpha1-alpha2) * (exp(-alpha2*t) - exp(-alpha1*t)),
    continued across alpha1 = alpha2 where it becomes the Erlang-2 density.
    """
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    a1, a2 = params.alpha1, params.alpha2
    return a1 * a2 * math.exp(-a2 * t) * _growth(params.delta, t)


def conditional_wait_2(params: SplitParams, y: float, s: float) -> float:
    """E[(T - y - s)^+] for the hypoexponential node-1 network time.

    Equals 1/alpha1 + 1/alpha2 (the full mean sojourn) at y = s = 0.
    """
    if y < 0.0 or s < 0.0:
        raise ValueError("y and s must be non-negative")
    a1, a2 = params.alpha1, params.alpha2
    x = y + s
    return math.exp(-a2 * x) * (
        1.0 / a1 + 1.0 / a2 + (a2 / a1) * _growth(params.delta, x)
    )


def ewy_bound_2(params: SplitParams) -> float:
    """Lower bound of E[W*Y] for node-1 packets, upstream service at its mean 1/mu.

    Closed form of integral_0^inf y * conditional_wait_2(y, 1/mu) * lam*e^(-lam*y) dy:

        alpha1*lam*e^(-alpha2*s)/(alpha2*(alpha1-alpha2)*(alpha2+lam)^2)
      - alpha2*lam*e^(-alpha1*s)/(alpha1*(alpha1-alpha2)*(alpha1+lam)^2)

    rearranged so the 1/(alpha1-alpha2) pole cancels algebraically.
    """
    a1, a2 = params.alpha1, params.alpha2
    lam = params.lam
    s = params.s_bar
    d = params.delta
    # difference quotient (u(a2)-u(a1))/d of u(a) = e^(-a*s)/(a*(a+lam)^2),
    # written without subtractions: the polynomial part divides out exactly.
    poly = a1 * a1 + a1 * a2 + a2 * a2 + 2.0 * lam * (a1 + a2) + lam * lam
    diff_quot = math.exp(-a2 * s) * (
        poly / (a1 * a2 * (a1 + lam) ** 2 * (a2 + lam) ** 2)
        + _growth(d, s) / (a1 * (a1 + lam) ** 2)
    )
    u2 = math.exp(-a2 * s) / (a2 * (a2 + lam) ** 2)
    return lam * (u2 + a2 * diff_quot)


def aoi_node2(params: SplitParams) -> float:
    """Average age of packets entering at node 2, which see one M/M/1 at total rate."""
    mu, lam = params.mu, params.lam
    rho = params.rho2
    return lam * (rho / (mu * mu * (1.0 - rho)) + 1.0 / (mu * lam) + 1.0 / lam**2)


def aoi_node1(params: SplitParams) -> float:
    """Average age of packets entering at node 1 (two queues in series)."""
    lam = params.lam
    return lam * (ewy_bound_2(params) + 2.0 / (params.mu * lam) + 1.0 / lam**2)


def aoi_mixture(params: SplitParams) -> float:
    """Departure-probability mixture p*aoi_node1 + (1-p)*aoi_node2."""
    p = params.p
    if p == 0.0:
        return aoi_node2(params)
    if p == 1.0:
        return aoi_node1(params)
    return p * aoi_node1(params) + (1.0 - p) * aoi_node2(params)


def network_delay_split(params: SplitParams) -> float:
    """Mean network delay p*(1/alpha1 + 1/alpha2) + (1-p)/alpha2."""
    a1, a2 = params.alpha1, params.alpha2
    return params.p * (1.0 / a1 + 1.0 / a2) + (1.0 - params.p) / a2
