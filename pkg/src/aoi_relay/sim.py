"""Discrete-event simulation of a store-and-forward chain of FCFS queues.

Each node is a single-server FCFS queue with an infinite buffer and
exponential service; every node may receive its own Poisson ground traffic,
and a departure from node k becomes an arrival at node k+1 at the same
instant.  Departures from the last node are deliveries.

The event timeline of each queue is reconstructed exactly with the Lindley
recursion d_i = max(a_i, d_{i-1}) + s_i applied to the time-ordered merge of
relayed and ground arrivals, so a whole run is a handful of vectorised passes
instead of a per-event loop; the resulting trajectories are identical to
event-driven execution.  Simultaneous arrivals (a measure-zero tie) are
ordered deterministically: relayed packets (upstream departures) before fresh
ground arrivals.

Randomness: each node's arrival process and each node's service process owns
an independent PCG64 stream, spawned from ``SeedSequence(seed)`` in the fixed
order [arrivals(0), service(0), arrivals(1), service(1), ...].  Identical
(spec, seed, horizon, warmup) inputs therefore give bit-identical results,
and sweep points sharing a seed share common random numbers.

Age of information is integrated as the sawtooth area of t - u(t) over the
post-warmup window, where u(t) is the largest generation timestamp delivered
by time t -- once for the whole delivered stream (system age) and once per
origin node.  The final partial sawtooth is truncated at the horizon.
Confidence intervals use the batch-means method with 20 batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats


N_BATCHES = 20


class UnstableNetworkError(ValueError):
    """Some node's cumulative arrival rate reaches its service rate."""


class NoDataError(RuntimeError):
    """The run produced no deliveries inside the measurement window."""


@dataclass(frozen=True)
class NodeSpec:
    """One queue: its service rate and the Poisson rate of its ground traffic."""

    service_rate: float
    ground_rate: float


@dataclass(frozen=True)
class NetworkSpec:
    """Ordered chain of nodes; node k relays everything it receives to node k+1."""

    nodes: tuple[NodeSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(self.nodes) < 1:
            raise ValueError("need at least one node")
        for k, nd in enumerate(self.nodes):
            if not nd.service_rate > 0.0:
                raise ValueError(f"node {k}: service rate must be positive")
            if nd.ground_rate < 0.0:
                raise ValueError(f"node {k}: ground rate must be non-negative")
        if not any(nd.ground_rate > 0.0 for nd in self.nodes):
            raise ValueError("at least one node must receive ground traffic")
        total = 0.0
        for k, nd in enumerate(self.nodes):
            total += nd.ground_rate
            if not total < nd.service_rate:
                raise UnstableNetworkError(
                    f"node {k}: cumulative arrival rate {total} >= "
                    f"service rate {nd.service_rate}"
                )

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def cumulative_rates(self) -> tuple[float, ...]:
        """Total arrival rate seen by each node (ground plus relayed)."""
        out, total = [], 0.0
        for nd in self.nodes:
            total += nd.ground_rate
            out.append(total)
        return tuple(out)

    @classmethod
    def chain(cls, n_nodes: int, mu: float, lam: float) -> "NetworkSpec":
        """Homogeneous chain fed only at the first node."""
        rates = [lam] + [0.0] * (n_nodes - 1)
        return cls(tuple(NodeSpec(mu, g) for g in rates))

    @classmethod
    def split(cls, mu: float, lam: float, p: float) -> "NetworkSpec":
        """Two equal-rate nodes with the total load lam split p / 1-p."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        return cls((NodeSpec(mu, p * lam), NodeSpec(mu, (1.0 - p) * lam)))

    @classmethod
    def multi_ground(cls, n_nodes: int, mu: float, rho: float) -> "NetworkSpec":
        """Equal ground load at every node, total utilisation rho at the last."""
        g = rho * mu / n_nodes
        return cls(tuple(NodeSpec(mu, g) for _ in range(n_nodes)))


@dataclass(frozen=True)
class HopRecord:
    node: int
    arrival: float
    service_start: float
    departure: float


@dataclass(frozen=True)
class PacketRecord:
    """Full lifecycle of one packet, kept only when records are requested."""

    packet_id: int
    origin: int
    t_gen: float
    hops: tuple[HopRecord, ...]
    y: float  # gap to the previous packet generated at the same origin (nan for the first)
    t: float  # total network time
    w: float  # total waiting time
    s: float  # total service time
    z: float  # gap to the previous delivery overall (nan for the first)


@dataclass(frozen=True)
class SimResult:
    avg_aoi_system: float
    avg_aoi_per_source: tuple[float, ...]
    avg_aoi_mixture: float
    avg_delay: float
    avg_wait: float
    ewy_empirical: float
    ewy_per_source: tuple[float, ...]
    utilization_per_node: tuple[float, ...]
    n_departures: int
    n_ewy_samples: int
    ci95: dict
    seed: int
    horizon: float
    warmup: float
    # per-node diagnostics (window averages)
    mean_number_per_node: tuple[float, ...]
    mean_sojourn_per_node: tuple[float, ...]
    arrival_rate_per_node: tuple[float, ...]
    delivery_rate_per_source: tuple[float, ...]
    records: tuple[PacketRecord, ...] = field(default=())


@dataclass(frozen=True)
class BurkeReport:
    """Interdeparture statistics at an intermediate node of a single-source chain."""

    node: int
    n_samples: int
    mean: float
    expected_mean: float
    ks_statistic: float
    p_value: float
    rejected_at_1pct: bool


@dataclass(frozen=True)
class EwyEstimate:
    value: float
    ci95: float
    n_samples: int


def _spawn_rngs(seed: int, n_nodes: int):
    children = np.random.SeedSequence(seed).spawn(2 * n_nodes)
    arrival = [np.random.default_rng(children[2 * k]) for k in range(n_nodes)]
    service = [np.random.default_rng(children[2 * k + 1]) for k in range(n_nodes)]
    return arrival, service


def _poisson_times(rng, rate: float, horizon: float) -> np.ndarray:
    """Arrival instants of a Poisson process on [0, horizon)."""
    if rate <= 0.0:
        return np.empty(0)
    chunks = []
    t_last = 0.0
    block = max(int(rate * horizon * 1.05) + 64, 64)
    while True:
        times = t_last + np.cumsum(rng.exponential(1.0 / rate, size=block))
        chunks.append(times)
        t_last = float(times[-1])
        if t_last >= horizon:
            break
        block = max(int(rate * (horizon - t_last) * 1.2) + 64, 64)
    times = np.concatenate(chunks)
    return times[times < horizon]


def _fcfs_departures(arrivals: np.ndarray, services: np.ndarray) -> np.ndarray:
    """d_i = max(a_i, d_{i-1}) + s_i, vectorised via the cumulative-service transform."""
    c = np.cumsum(services)
    shifted = np.concatenate(([0.0], c[:-1]))
    return np.maximum.accumulate(arrivals - shifted) + c


_STREAM_KEYS = ("time", "origin", "t_gen", "y", "wait", "svc", "id")


def _merge_streams(relayed: Optional[dict], ground: dict) -> dict:
    if relayed is None or len(relayed["time"]) == 0:
        return ground
    if len(ground["time"]) == 0:
        return relayed
    times = np.concatenate([relayed["time"], ground["time"]])
    # ties: relayed (kind 0) ahead of fresh ground arrivals (kind 1)
    kind = np.concatenate(
        [np.zeros(len(relayed["time"]), np.int8), np.ones(len(ground["time"]), np.int8)]
    )
    order = np.lexsort((kind, times))
    return {
        key: np.concatenate([relayed[key], ground[key]])[order] for key in _STREAM_KEYS
    }


def _window_overlap(start: np.ndarray, end: np.ndarray, t0: float, t1: float) -> float:
    return float(np.clip(np.minimum(end, t1) - np.maximum(start, t0), 0.0, None).sum())


def _age_area(dep: np.ndarray, runmax: np.ndarray, t0: float, t1: float) -> float:
    """Area of the sawtooth t - u(t) over [t0, t1].

    ``dep`` are all delivery times (sorted) and ``runmax`` the running maximum
    of their generation timestamps; u(0) = 0 by convention (the sawtooth
    starts from age zero; the warmup window absorbs the transient).
    """
    i0 = int(np.searchsorted(dep, t0, side="right"))
    i1 = int(np.searchsorted(dep, t1, side="right"))
    u0 = runmax[i0 - 1] if i0 > 0 else 0.0
    xs = np.concatenate(([t0], dep[i0:i1], [t1]))
    us = np.concatenate(([u0], runmax[i0:i1]))
    widths = np.diff(xs)
    start_age = xs[:-1] - us
    return float(np.sum(widths * (start_age + widths / 2.0)))


def _age_average(dep: np.ndarray, runmax: np.ndarray, t0: float, t1: float) -> float:
    return _age_area(dep, runmax, t0, t1) / (t1 - t0)


def _t_half_width(values: np.ndarray) -> float:
    """95% half-width of the mean of (approximately independent) batch values."""
    values = values[np.isfinite(values)]
    n = len(values)
    if n < 2:
        return math.nan
    return float(stats.t.ppf(0.975, n - 1) * np.std(values, ddof=1) / math.sqrt(n))


def _batched_packet_means(values: np.ndarray, which_batch: np.ndarray) -> np.ndarray:
    counts = np.bincount(which_batch, minlength=N_BATCHES)
    sums = np.bincount(which_batch, weights=values, minlength=N_BATCHES)
    with np.errstate(invalid="ignore"):
        return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


class _RawRun:
    """Arrays produced by one pipeline pass, before statistics."""

    def __init__(self):
        self.deliveries: dict = {}
        self.busy: list[float] = []
        self.occupancy: list[float] = []
        self.sojourn_mean: list[float] = []
        self.arrivals_in_window: list[int] = []
        self.captured: Optional[np.ndarray] = None
        self.hop_rows: list[tuple] = []


def _pipeline(
    spec: NetworkSpec,
    seed: int,
    horizon: float,
    warmup: float,
    record_limit: int = 0,
    capture_node: Optional[int] = None,
) -> _RawRun:
    n = spec.n_nodes
    arr_rngs, svc_rngs = _spawn_rngs(seed, n)
    raw = _RawRun()
    t0, t1 = warmup, horizon

    stream: Optional[dict] = None
    next_id = 0
    for k in range(n):
        mu_k = spec.nodes[k].service_rate
        ext_t = _poisson_times(arr_rngs[k], spec.nodes[k].ground_rate, horizon)
        m = len(ext_t)
        ground = {
            "time": ext_t,
            "origin": np.full(m, k, dtype=np.int64),
            "t_gen": ext_t,
            "y": np.concatenate(([np.nan], np.diff(ext_t))) if m else np.empty(0),
            "wait": np.zeros(m),
            "svc": np.zeros(m),
            "id": np.arange(next_id, next_id + m, dtype=np.int64),
        }
        next_id += m
        stream = _merge_streams(stream, ground)

        a = stream["time"]
        s = svc_rngs[k].exponential(1.0 / mu_k, size=len(a))
        if len(a):
            d = _fcfs_departures(a, s)
            # rounding guards: departures never precede arrivals, service
            # starts stay inside [arrival, departure]
            d = np.maximum(d, a)
            b = np.maximum(a, d - s)
        else:
            d = np.empty(0)
            b = np.empty(0)

        raw.busy.append(_window_overlap(b, d, t0, t1))
        raw.occupancy.append(_window_overlap(a, d, t0, t1))
        in_window = (a >= t0) & (a < t1)
        raw.arrivals_in_window.append(int(in_window.sum()))
        raw.sojourn_mean.append(
            float(np.mean(d[in_window] - a[in_window])) if in_window.any() else math.nan
        )

        if record_limit:
            keep = stream["id"] < record_limit
            if keep.any():
                raw.hop_rows.append(
                    (k, stream["id"][keep].copy(), a[keep].copy(), b[keep].copy(), d[keep].copy())
                )
        if capture_node is not None and k == capture_node:
            raw.captured = d.copy()

        stream = dict(stream)
        stream["time"] = d
        stream["wait"] = stream["wait"] + (b - a)
        stream["svc"] = stream["svc"] + s

    raw.deliveries = stream
    return raw


def _assemble_records(raw: _RawRun, record_limit: int) -> tuple[PacketRecord, ...]:
    dv = raw.deliveries
    dep = dv["time"]
    z_all = np.concatenate(([np.nan], np.diff(dep))) if len(dep) else np.empty(0)
    hops_by_id: dict[int, list[HopRecord]] = {}
    for node, ids, a, b, d in raw.hop_rows:
        for i, pid in enumerate(ids):
            hops_by_id.setdefault(int(pid), []).append(
                HopRecord(node=node, arrival=float(a[i]), service_start=float(b[i]), departure=float(d[i]))
            )
    records = []
    for pos in np.nonzero(dv["id"] < record_limit)[0]:
        pid = int(dv["id"][pos])
        hops = tuple(sorted(hops_by_id.get(pid, []), key=lambda h: h.node))
        records.append(
            PacketRecord(
                packet_id=pid,
                origin=int(dv["origin"][pos]),
                t_gen=float(dv["t_gen"][pos]),
                hops=hops,
                y=float(dv["y"][pos]),
                t=float(dep[pos] - dv["t_gen"][pos]),
                w=float(dv["wait"][pos]),
                s=float(dv["svc"][pos]),
                z=float(z_all[pos]),
            )
        )
    records.sort(key=lambda r: r.packet_id)
    return tuple(records)


def run(
    spec: NetworkSpec,
    seed: int,
    horizon: float,
    warmup: Optional[float] = None,
    record_limit: int = 0,
) -> SimResult:
    """Simulate the network on [0, horizon] and report post-warmup statistics.

    ``warmup`` defaults to 10% of the horizon.  Raises NoDataError when no
    packet is delivered inside the measurement window.
    """
    horizon = float(horizon)
    if warmup is None:
        warmup = 0.1 * horizon
    warmup = float(warmup)
    if not (horizon > warmup >= 0.0):
        raise ValueError(f"need horizon > warmup >= 0, got {horizon}, {warmup}")

    raw = _pipeline(spec, seed, horizon, warmup, record_limit=record_limit)
    dv = raw.deliveries
    t0, t1 = warmup, horizon
    window = t1 - t0
    n_nodes = spec.n_nodes

    dep = dv["time"]
    in_win = (dep > t0) & (dep <= t1)
    n_dep = int(in_win.sum())
    if n_dep == 0:
        raise NoDataError("no deliveries inside the measurement window")

    batch_edges = np.linspace(t0, t1, N_BATCHES + 1)

    # ---- per-packet metrics over in-window deliveries
    delays = dep[in_win] - dv["t_gen"][in_win]
    waits = dv["wait"][in_win]
    which_batch = np.minimum(((dep[in_win] - t0) / (window / N_BATCHES)).astype(int), N_BATCHES - 1)

    avg_delay = float(delays.mean())
    avg_wait = float(waits.mean())
    delay_ci = _t_half_width(_batched_packet_means(delays, which_batch))
    wait_ci = _t_half_width(_batched_packet_means(waits, which_batch))

    wy = dv["wait"][in_win] * dv["y"][in_win]
    finite_wy = np.isfinite(wy)
    n_ewy = int(finite_wy.sum())
    if n_ewy:
        ewy = float(wy[finite_wy].mean())
        ewy_ci = _t_half_width(_batched_packet_means(wy[finite_wy], which_batch[finite_wy]))
    else:
        ewy, ewy_ci = math.nan, math.nan

    # ---- sawtooth ages
    runmax_sys = np.maximum.accumulate(dv["t_gen"]) if len(dep) else np.empty(0)
    aoi_system = _age_average(dep, runmax_sys, t0, t1)
    aoi_sys_batches = np.array(
        [_age_average(dep, runmax_sys, lo, hi) for lo, hi in zip(batch_edges[:-1], batch_edges[1:])]
    )
    aoi_system_ci = _t_half_width(aoi_sys_batches)

    per_source: list[float] = []
    ewy_source: list[float] = []
    counts_source: list[int] = []
    src_batch_aoi = np.full((n_nodes, N_BATCHES), np.nan)
    src_batch_counts = np.zeros((n_nodes, N_BATCHES))
    for j in range(n_nodes):
        sel = dv["origin"] == j
        if not sel.any():
            per_source.append(math.nan)
            ewy_source.append(math.nan)
            counts_source.append(0)
            continue
        dep_j = dep[sel]
        runmax_j = np.maximum.accumulate(dv["t_gen"][sel])
        per_source.append(_age_average(dep_j, runmax_j, t0, t1))
        for bi, (lo, hi) in enumerate(zip(batch_edges[:-1], batch_edges[1:])):
            src_batch_aoi[j, bi] = _age_average(dep_j, runmax_j, lo, hi)
            src_batch_counts[j, bi] = np.count_nonzero((dep_j > lo) & (dep_j <= hi))
        win_j = sel & in_win
        counts_source.append(int(win_j.sum()))
        wy_j = dv["wait"][win_j] * dv["y"][win_j]
        wy_j = wy_j[np.isfinite(wy_j)]
        ewy_source.append(float(wy_j.mean()) if len(wy_j) else math.nan)

    weights = np.asarray(counts_source, dtype=float)
    active = weights > 0
    aoi_mixture = float(
        np.sum(weights[active] / n_dep * np.asarray(per_source)[active])
    )
    mix_batches = []
    for bi in range(N_BATCHES):
        cb = src_batch_counts[:, bi]
        if cb.sum() == 0:
            mix_batches.append(math.nan)
            continue
        act = cb > 0
        mix_batches.append(float(np.sum(cb[act] / cb.sum() * src_batch_aoi[act, bi])))
    aoi_mixture_ci = _t_half_width(np.asarray(mix_batches))

    utilization = tuple(bt / window for bt in raw.busy)
    mean_number = tuple(oc / window for oc in raw.occupancy)
    arrival_rate = tuple(c / window for c in raw.arrivals_in_window)
    delivery_rate = tuple(c / window for c in counts_source)

    records = _assemble_records(raw, record_limit) if record_limit else ()

    return SimResult(
        avg_aoi_system=aoi_system,
        avg_aoi_per_source=tuple(per_source),
        avg_aoi_mixture=aoi_mixture,
        avg_delay=avg_delay,
        avg_wait=avg_wait,
        ewy_empirical=ewy,
        ewy_per_source=tuple(ewy_source),
        utilization_per_node=utilization,
        n_departures=n_dep,
        n_ewy_samples=n_ewy,
        ci95={
            "aoi_system": aoi_system_ci,
            "aoi_mixture": aoi_mixture_ci,
            "delay": delay_ci,
            "wait": wait_ci,
            "ewy": ewy_ci,
        },
        seed=seed,
        horizon=horizon,
        warmup=warmup,
        mean_number_per_node=mean_number,
        mean_sojourn_per_node=tuple(raw.sojourn_mean),
        arrival_rate_per_node=arrival_rate,
        delivery_rate_per_source=delivery_rate,
        records=records,
    )


def _require_single_source(spec: NetworkSpec) -> float:
    if spec.nodes[0].ground_rate <= 0.0 or any(
        nd.ground_rate != 0.0 for nd in spec.nodes[1:]
    ):
        raise ValueError("requires a single-source chain (ground traffic only at node 1)")
    return spec.nodes[0].ground_rate


def validate_burke(
    spec: NetworkSpec,
    seed: int,
    horizon: float,
    warmup: Optional[float] = None,
    node: int = 1,
) -> BurkeReport:
    """Check that interdepartures at an intermediate node look Exponential(lam).

    ``node`` is 1-based; the departure stream of that node feeds node+1.  The
    report carries the empirical mean (expected 1/lam) and a Kolmogorov-
    Smirnov fit against Exponential(lam) with its p-value; ``rejected_at_1pct``
    flags p < 0.01.
    """
    lam = _require_single_source(spec)
    if spec.n_nodes < 2:
        raise ValueError("needs at least two nodes (no intermediate node in a 1-chain)")
    if not 1 <= node <= spec.n_nodes - 1:
        raise ValueError(f"node must be an intermediate node in 1..{spec.n_nodes - 1}")
    horizon = float(horizon)
    if warmup is None:
        warmup = 0.1 * horizon
    warmup = float(warmup)
    if not (horizon > warmup >= 0.0):
        raise ValueError(f"need horizon > warmup >= 0, got {horizon}, {warmup}")

    raw = _pipeline(spec, seed, horizon, warmup, capture_node=node - 1)
    d = raw.captured
    d = d[(d > warmup) & (d <= horizon)]
    if len(d) < 2:
        raise NoDataError("not enough departures at the probed node")
    gaps = np.diff(d)
    ks = stats.kstest(gaps, "expon", args=(0.0, 1.0 / lam))
    return BurkeReport(
        node=node,
        n_samples=len(gaps),
        mean=float(gaps.mean()),
        expected_mean=1.0 / lam,
        ks_statistic=float(ks.statistic),
        p_value=float(ks.pvalue),
        rejected_at_1pct=bool(ks.pvalue < 0.01),
    )


def estimate_ewy(
    spec: NetworkSpec,
    seed: int,
    horizon: float,
    warmup: Optional[float] = None,
) -> EwyEstimate:
    """Sample mean of W*Y over delivered packets of a single-source chain."""
    _require_single_source(spec)
    res = run(spec, seed, horizon, warmup)
    if res.n_ewy_samples == 0:
        raise NoDataError("no usable waiting/interarrival samples")
    return EwyEstimate(value=res.ewy_empirical, ci95=res.ci95["ewy"], n_samples=res.n_ewy_samples)
