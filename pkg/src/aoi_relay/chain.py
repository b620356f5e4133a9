"""Closed-form delay and average age of information for a homogeneous relay chain.

The model is a chain of ``n_nodes`` identical FCFS single-server queues with
exponential service at rate ``mu``.  Poisson status updates at rate ``lam``
enter only at the first node and are forwarded hop by hop to the last one.
Every stage is a stable M/M/1 queue with utilisation ``rho = lam/mu``
(departures of a stable M/M/1 are again Poisson at the arrival rate), so the
end-to-end network time T is Erlang distributed with shape ``n_nodes`` and
rate ``alpha = mu*(1-rho)``.

The average age of information is assembled as

    aoi = lam * ( E[W*Y] + n_nodes/(mu*lam) + 1/lam**2 )

where Y is the interarrival gap of consecutive updates and W the total
queueing (non-service) time.  ``ewy_bound`` evaluates E[W*Y] with the
upstream service total replaced by its mean, which by convexity of the
positive-part in that variable (Jensen) yields a lower bound; for a single
node the substitution is vacuous and the result is exact, matching the
classic M/M/1 average age.
"""

import math
from dataclasses import dataclass

from .specfun import gamma_int, upper_incomplete_gamma_int


@dataclass(frozen=True)
class ChainParams:
    """Parameters of a homogeneous chain: hop count, service rate, arrival rate."""

    n_nodes: int
    mu: float
    lam: float

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.lam < self.mu:
            raise ValueError(
                f"unstable chain: rho = {self.lam / self.mu} >= 1 "
                "(every stage must satisfy lam < mu)"
            )

    @property
    def rho(self) -> float:
        """Utilisation lam/mu, identical at every node."""
        return self.lam / self.mu

    @property
    def alpha(self) -> float:
        """Rate mu*(1-rho) of each stage's sojourn time."""
        return self.mu * (1.0 - self.rho)

    @property
    def s_bar(self) -> float:
        """Mean total service time over all but the last hop, (n_nodes-1)/mu."""
        return (self.n_nodes - 1) / self.mu


def sojourn_pdf(params: ChainParams, t: float) -> float:
    """Density of the end-to-end network time: Erlang(n_nodes, alpha) at t."""
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    k = params.n_nodes
    a = params.alpha
    if t == 0.0:
        return a if k == 1 else 0.0
    return math.exp(k * math.log(a) + (k - 1) * math.log(t) - a * t - math.lgamma(k))


def network_delay(params: ChainParams) -> float:
    """Mean end-to-end time n_nodes/alpha, increasing in both rho and hop count."""
    return params.n_nodes / params.alpha


def conditional_wait(params: ChainParams, y: float, s: float) -> float:
    """E[(T - y - s)^+] for Erlang network time T.

    This is the expected total queueing time of an update given that its
    predecessor's network time exceeds the gap ``y`` plus the update's own
    upstream service total ``s``.  At y = s = 0 it equals the network delay.
    """
    if y < 0.0 or s < 0.0:
        raise ValueError("y and s must be non-negative")
    k = params.n_nodes
    a = params.alpha
    x = y + s
    gk = gamma_int(k)
    return (
        upper_incomplete_gamma_int(k + 1, a * x) / (a * gk)
        - x * upper_incomplete_gamma_int(k, a * x) / gk
    )


def ewy_bound(params: ChainParams) -> float:
    """Lower bound of E[W*Y], exact for a single node.

    Obtained by integrating ``conditional_wait`` against the exponential
    interarrival density with the upstream service total fixed at its mean
    (n_nodes-1)/mu:

        integral_0^inf y * E[(T - y - s_bar)^+] * lam * exp(-lam*y) dy
    """
    k = params.n_nodes
    a = params.alpha
    mu = params.mu
    lam = params.lam
    s = params.s_bar
    gk = gamma_int(k)
    term1 = -(
        a * (lam * s + 2.0) * upper_incomplete_gamma_int(k, a * s)
        - lam * upper_incomplete_gamma_int(k + 1, a * s)
    ) / (a * lam * lam * gk)
    # (a/mu)^k * exp(lam*s) merged in log space; a/mu = 1-rho < 1
    pref2 = math.exp(k * math.log(a / mu) + lam * s) / (lam * lam * mu * gk)
    term2 = -pref2 * (
        mu * (lam * s - 2.0) * upper_incomplete_gamma_int(k, mu * s)
        - lam * upper_incomplete_gamma_int(k + 1, mu * s)
    )
    return term1 + term2


def average_aoi(params: ChainParams) -> float:
    """Lower bound of the average age of information at the chain's output."""
    k = params.n_nodes
    return params.lam * (
        ewy_bound(params) + k / (params.mu * params.lam) + 1.0 / params.lam**2
    )


def mm1_average_aoi(mu: float, lam: float) -> float:
    """Exact average age of a single M/M/1 queue, (1/mu)*(1 + 1/rho + rho^2/(1-rho)).

    Reference value for the degenerate one-node chain.
    """
    if not 0.0 < lam < mu:
        raise ValueError("requires 0 < lam < mu")
    rho = lam / mu
    return (1.0 + 1.0 / rho + rho * rho / (1.0 - rho)) / mu
