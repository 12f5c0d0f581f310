"""Execution algorithms: TWAP, VWAP, POV and the price-adaptive POV variant.

Schedule generators emit integer share targets whose sum equals the parent
quantity exactly (largest-remainder apportionment; remainder ties go to later
buckets). The runner drives child orders through a simulated market bucket by
bucket, honoring a max-child-size cap, optional price limits, and POV's
own-volume correction, and returns a full execution trace for analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from tradelab.orderbook import Order, OrderKind, Side, Tif
from tradelab.venue_sim import MarketSim, VolumeProfile, settle_fees


@dataclass(frozen=True)
class ParentOrder:
    side: Side
    quantity: int
    start: int
    end: int
    price_limit: Optional[int] = None      # ticks
    benchmark: str = "arrival"             # close | open | arrival | decision

    def __post_init__(self):
        if self.quantity <= 0:
            raise ValueError("parent quantity must be positive")
        if self.end <= self.start:
            raise ValueError("parent horizon is empty")

    @property
    def horizon(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class TiltPolicy:
    """Acceleration past a completion threshold, plus size/timing jitter."""

    threshold: float = 1.0     # completion fraction that triggers the tilt
    factor: float = 1.0        # multiplier on post-trigger bucket sizes
    jitter: float = 0.0        # max fractional jitter on size and timing
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.factor <= 0:
            raise ValueError("factor must be positive")
        if not 0.0 <= self.jitter < 1.0:
            raise ValueError("jitter must lie in [0, 1)")


@dataclass(frozen=True)
class Schedule:
    """Per-bucket share targets; offsets are intra-bucket placement jitter."""

    targets: tuple
    bucket_ticks: int
    offsets: tuple = ()

    def __post_init__(self):
        if any(t < 0 for t in self.targets):
            raise ValueError("schedule targets must be >= 0")

    def items(self):
        return list(enumerate(self.targets))

    @property
    def total(self) -> int:
        return sum(self.targets)

    def __len__(self):
        return len(self.targets)


def apportion(total: int, weights: Sequence[float]) -> list[int]:
    """Integer split of ``total`` proportional to ``weights``.

    Largest-remainder rounding keeps the sum exact; remainder ties are broken
    toward later buckets.
    """
    if total < 0:
        raise ValueError("total must be >= 0")
    wsum = float(sum(weights))
    if wsum <= 0:
        raise ValueError("weights must have positive sum")
    quotas = [total * float(w) / wsum for w in weights]
    base = [int(math.floor(q)) for q in quotas]
    leftover = total - sum(base)
    order = sorted(range(len(weights)), key=lambda i: (quotas[i] - base[i], i),
                   reverse=True)
    for i in order[:leftover]:
        base[i] += 1
    return base


def twap_schedule(parent: ParentOrder, bucket_ticks: int,
                  tilt: Optional[TiltPolicy] = None) -> Schedule:
    """Equal-sized buckets over the horizon (last bucket may be short).

    With a tilt, buckets after the completion threshold scale by the
    acceleration factor: the schedule then finishes early (factor > 1, final
    bucket clipped) or pushes its leftover into the last bucket (factor < 1);
    either way the total stays exactly the parent quantity. Jitter perturbs
    sizes (renormalized) and intra-bucket placement, all under the tilt seed.
    """
    if bucket_ticks <= 0:
        raise ValueError("bucket_ticks must be positive")
    n = math.ceil(parent.horizon / bucket_ticks)
    if n == 0:
        raise ValueError("empty horizon")
    targets = apportion(parent.quantity, [1.0] * n)
    offsets = tuple(0 for _ in range(n))
    if tilt is not None and tilt.factor != 1.0 and tilt.threshold < 1.0:
        targets = _apply_tilt(targets, parent.quantity, tilt)
    if tilt is not None and tilt.jitter > 0.0:
        targets, offsets = _apply_jitter(targets, parent.quantity, tilt, bucket_ticks)
    return Schedule(targets=tuple(targets), bucket_ticks=bucket_ticks, offsets=offsets)


def _apply_tilt(targets: list[int], total: int, tilt: TiltPolicy) -> list[int]:
    cum = 0
    trigger_idx = None
    for i, t in enumerate(targets):
        cum += t
        if cum >= tilt.threshold * total:
            trigger_idx = i
            break
    if trigger_idx is None or trigger_idx == len(targets) - 1:
        return targets
    out = list(targets[:trigger_idx + 1])
    remaining = total - sum(out)
    for t in targets[trigger_idx + 1:]:
        take = min(int(round(tilt.factor * t)), remaining)
        out.append(take)
        remaining -= take
    if remaining > 0:
        out[-1] += remaining
    return out


def _apply_jitter(targets: list[int], total: int, tilt: TiltPolicy,
                  bucket_ticks: int) -> tuple[list[int], tuple]:
    rng = np.random.default_rng(tilt.seed)
    factors = 1.0 + rng.uniform(-tilt.jitter, tilt.jitter, size=len(targets))
    weights = [t * f for t, f in zip(targets, factors)]
    if sum(weights) <= 0:
        weights = [float(t) for t in targets]
    jittered = apportion(total, weights)
    offsets = tuple(int(rng.uniform(0.0, tilt.jitter) * bucket_ticks)
                    for _ in targets)
    return jittered, offsets


def vwap_schedule(parent: ParentOrder, profile: VolumeProfile) -> Schedule:
    """Targets proportional to the volume profile: X_j = z_j * X, rounded."""
    targets = apportion(parent.quantity, profile.fractions)
    bucket_ticks = max(1, parent.horizon // len(profile))
    return Schedule(targets=tuple(targets), bucket_ticks=bucket_ticks)


def pov_child_size(other_volume: float, pr: float) -> int:
    """Child size targeting a participation rate against observed other volume.

    child = pr/(1-pr) * other, so child/(child+other) = pr before rounding.
    """
    if not 0.0 <= pr < 1.0:
        raise ValueError("participation rate must lie in [0, 1)")
    if other_volume < 0:
        raise ValueError("other_volume must be >= 0")
    return int(round(pr / (1.0 - pr) * other_volume))


def pov_adaptive_rate(base_pr: float, price: float, benchmark_price: float,
                      sensitivity: float, side: Side, pr_max: float = 0.95) -> float:
    """Linear participation adjustment against a price benchmark.

    Buys back off as price rises above the benchmark (and lean in below it);
    sells mirror. Result clamps to [0, pr_max].
    """
    if benchmark_price <= 0:
        raise ValueError("benchmark_price must be positive")
    deviation = (price - benchmark_price) / benchmark_price
    if side is Side.BUY:
        adjusted = base_pr * (1.0 - sensitivity * deviation)
    else:
        adjusted = base_pr * (1.0 + sensitivity * deviation)
    return min(max(adjusted, 0.0), pr_max)


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

@dataclass
class ExecutionWiring:
    """Optional tactic integration for the runner.

    A slice policy splits each bucket's target into sequential child orders
    of (jittered) display size; route weights send every child through the
    smart router over the consolidated public book when the simulation has
    more than one venue.
    """

    slice_policy: Optional[object] = None    # tactics.SlicePolicy
    route_weights: Optional[object] = None   # tactics.RouteWeights


@dataclass(frozen=True)
class AlgoSpec:
    """Config-file face of an algorithm instance."""

    type: str                           # twap | vwap | pov | pov-adaptive
    bucket_ticks: int = 450
    pr: float = 0.1
    tilt: Optional[TiltPolicy] = None
    max_child: Optional[int] = None
    price_limit: Optional[int] = None
    window_ticks: Optional[int] = None  # POV observation window (default bucket/10)
    sensitivity: float = 0.0            # pov-adaptive only
    pr_max: float = 0.95
    venue_id: Optional[str] = None
    both_sides_volume: bool = True      # POV measures both-sides traded volume

    def __post_init__(self):
        if self.type not in ("twap", "vwap", "pov", "pov-adaptive"):
            raise ValueError(f"unknown algo type {self.type!r}")


@dataclass
class TraceFill:
    tick: int
    price: int
    quantity: int
    child_id: str
    venue_id: str
    role: str             # taker | maker


@dataclass
class ExecutionTrace:
    parent: ParentOrder
    children: list[Order] = field(default_factory=list)
    fills: list[TraceFill] = field(default_factory=list)
    realized: list[tuple[int, int, int]] = field(default_factory=list)  # (bucket, target, done)
    residual: int = 0
    participation: Optional[float] = None
    arrival_price: Optional[float] = None   # ticks (mid at start)
    final_price: Optional[float] = None     # ticks (mid at end)
    fees: dict = field(default_factory=dict)

    @property
    def filled(self) -> int:
        return sum(f.quantity for f in self.fills)

    def average_price(self) -> Optional[float]:
        done = self.filled
        if done == 0:
            return None
        return sum(f.price * f.quantity for f in self.fills) / done


class _ChildTracker:
    """Names child orders, harvests their fills, and tracks exposure.

    ``other_volume`` accumulates non-own traded volume as fills are harvested,
    so POV sizing and overfill guards see a gap-free view of the stream.
    """

    def __init__(self, sim: MarketSim, venue_id: str):
        self.sim = sim
        self.venue_id = venue_id
        self.ids: set[str] = set()
        self.submitted = 0
        self.other_volume = 0
        self.wiring = ExecutionWiring()
        self.slice_rng: Optional[np.random.Generator] = None
        self.count_side: Optional[Side] = None   # POV one-sided volume measurement
        self._count = 0
        self._cursor = 0

    def next_id(self) -> str:
        self._count += 1
        return f"child-{self._count:04d}"

    def register(self, order: Order) -> None:
        self.ids.add(order.order_id)
        self.submitted += order.quantity

    def harvest(self, trace: ExecutionTrace) -> int:
        """Pull new own fills into the trace; returns newly filled quantity."""
        got = 0
        fills = self.sim.fills
        while self._cursor < len(fills):
            vid, f = fills[self._cursor]
            self._cursor += 1
            role = None
            if f.taker_order_id in self.ids:
                role = "taker"
            elif f.maker_order_id in self.ids:
                role = "maker"
            if role is None:
                if (self.count_side is None
                        or self.sim.order_sides.get(f.taker_order_id) is self.count_side):
                    self.other_volume += f.quantity
                continue
            child = f.taker_order_id if role == "taker" else f.maker_order_id
            trace.fills.append(TraceFill(tick=f.time, price=f.price, quantity=f.quantity,
                                         child_id=child, venue_id=vid, role=role))
            venue = self.sim.venues[vid]
            trace.fees[vid] = trace.fees.get(vid, 0.0) + settle_fees(venue, f, role)
            got += f.quantity
        return got

    def outstanding(self, trace: ExecutionTrace) -> int:
        """Submitted but neither filled nor cancelled (includes in-flight)."""
        cancelled = 0
        for book in self.sim.books.values():
            for oid in self.ids:
                cancelled += book.ledger(oid)[2]
        return self.submitted - trace.filled - cancelled


def run_algorithm(spec: AlgoSpec, parent: ParentOrder, sim: MarketSim,
                  wiring: Optional[ExecutionWiring] = None) -> ExecutionTrace:
    """Execute a parent order against the simulation; returns the trace.

    The unfilled remainder at the horizon end is recorded as the trace
    residual (it feeds the opportunity-cost leg of the shortfall report).
    ``wiring`` plugs placement tactics into child handling.
    """
    venue_id = spec.venue_id or next(iter(sim.venues))
    trace = ExecutionTrace(parent=parent)
    tracker = _ChildTracker(sim, venue_id)
    tracker.wiring = wiring or ExecutionWiring()
    if tracker.wiring.slice_policy is not None:
        tracker.slice_rng = np.random.default_rng(tracker.wiring.slice_policy.seed)
    if spec.type in ("pov", "pov-adaptive") and not spec.both_sides_volume:
        tracker.count_side = parent.side
    if sim.clock < parent.start:
        sim.advance(parent.start - sim.clock)
    trace.arrival_price = sim.mid(venue_id) or float(sim.fundamental)
    horizon_fills_start = len(sim.fills)
    tracker.harvest(trace)        # move the cursor past pre-horizon flow
    tracker.other_volume = 0
    if spec.type in ("twap", "vwap"):
        _run_scheduled(spec, parent, sim, trace, tracker, venue_id)
    else:
        _run_pov(spec, parent, sim, trace, tracker, venue_id)
    trace.residual = parent.quantity - trace.filled
    trace.final_price = sim.mid(venue_id) or float(sim.fundamental)
    total, own = sim.traded_volume(own_ids=tracker.ids, since=horizon_fills_start)
    trace.participation = (own / total) if total > 0 else None
    return trace


def _make_child(spec: AlgoSpec, parent: ParentOrder, sim: MarketSim,
                venue_id: str, oid: str, qty: int) -> Order:
    price_cap = spec.price_limit if spec.price_limit is not None else parent.price_limit
    if price_cap is not None:
        return Order(oid, parent.side, OrderKind.LIMIT, qty, limit_price=price_cap,
                     tif=Tif.IOC, venue_id=venue_id)
    return Order(oid, parent.side, OrderKind.MARKET, qty, venue_id=venue_id)


def _choose_venue(parent: ParentOrder, sim: MarketSim, tracker: _ChildTracker,
                  default: str) -> str:
    weights = tracker.wiring.route_weights
    if weights is None or len(sim.venues) < 2:
        return default
    from tradelab import tactics
    vbook = tactics.aggregate([(cfg, sim.books[vid])
                               for vid, cfg in sim.venues.items()])
    cands = tactics.candidates_from_virtual(vbook, parent.side)
    if not cands:
        return default
    return tactics.route(cands, parent.side, weights)


def _submit_child(spec: AlgoSpec, parent: ParentOrder, sim: MarketSim,
                  trace: ExecutionTrace, tracker: _ChildTracker,
                  venue_id: str, qty: int) -> None:
    if qty <= 0:
        return
    venue_id = _choose_venue(parent, sim, tracker, venue_id)
    book = sim.book(venue_id)
    opposite_best = (book.best_ask() if parent.side is Side.BUY else book.best_bid())
    if opposite_best is None and spec.price_limit is None and parent.price_limit is None:
        return   # market child into an empty book would be rejected
    oid = tracker.next_id()
    order = _make_child(spec, parent, sim, venue_id, oid, qty)
    tracker.register(order)
    trace.children.append(order)
    sim.dispatch(venue_id, order)


def _submit_sliced(spec: AlgoSpec, parent: ParentOrder, sim: MarketSim,
                   trace: ExecutionTrace, tracker: _ChildTracker, venue_id: str,
                   want: int, bucket_end: int) -> None:
    """Split a bucket target into sequential slice-policy children.

    Each child goes out only after a resolve step (market/IOC children clear
    within a tick or two), so the footprint is the randomized display size,
    not the bucket target.
    """
    from tradelab.tactics import draw_slice_size
    policy = tracker.wiring.slice_policy
    step = max(1, spec.bucket_ticks // 10)
    while want > 0 and sim.clock < bucket_end:
        size = min(draw_slice_size(policy, tracker.slice_rng), want)
        _submit_child(spec, parent, sim, trace, tracker, venue_id, size)
        advance_by = min(step, bucket_end - sim.clock)
        if advance_by > 0:
            sim.advance(advance_by)
        tracker.harvest(trace)
        want -= size


def _run_scheduled(spec: AlgoSpec, parent: ParentOrder, sim: MarketSim,
                   trace: ExecutionTrace, tracker: _ChildTracker, venue_id: str) -> None:
    if spec.type == "twap":
        schedule = twap_schedule(parent, spec.bucket_ticks, spec.tilt)
    else:
        schedule = vwap_schedule(parent, sim.profile)
    carry = 0
    for j, target in schedule.items():
        bucket_start = parent.start + j * schedule.bucket_ticks
        bucket_end = min(bucket_start + schedule.bucket_ticks, parent.end)
        if bucket_start >= parent.end:
            break
        offset = schedule.offsets[j] if j < len(schedule.offsets) else 0
        place_at = min(bucket_start + offset, bucket_end - 1)
        if place_at > sim.clock:
            sim.advance(place_at - sim.clock)
        tracker.harvest(trace)
        remaining = parent.quantity - trace.filled - tracker.outstanding(trace)
        want = min(target + carry, remaining)
        if spec.max_child is not None:
            want = min(want, spec.max_child)
        before = trace.filled
        if tracker.wiring.slice_policy is not None:
            _submit_sliced(spec, parent, sim, trace, tracker, venue_id, want,
                           bucket_end)
        else:
            _submit_child(spec, parent, sim, trace, tracker, venue_id, want)
        if bucket_end > sim.clock:
            sim.advance(bucket_end - sim.clock)
        tracker.harvest(trace)
        done = trace.filled - before
        trace.realized.append((j, target, done))
        carry = max(0, carry + target - done)
        _cancel_resting(tracker, sim)
    if sim.clock < parent.end:
        sim.advance(parent.end - sim.clock)
        tracker.harvest(trace)


def _cancel_resting(tracker: _ChildTracker, sim: MarketSim) -> None:
    for vid, book in sim.books.items():
        for oid in list(tracker.ids):
            if book.remaining(oid) > 0:
                book.cancel(oid)


def _run_pov(spec: AlgoSpec, parent: ParentOrder, sim: MarketSim,
             trace: ExecutionTrace, tracker: _ChildTracker, venue_id: str) -> None:
    window = spec.window_ticks or max(1, spec.bucket_ticks // 10)
    window_idx = 0
    benchmark_price = trace.arrival_price or float(sim.fundamental)
    while sim.clock < parent.end:
        sim.advance(min(window, parent.end - sim.clock))
        tracker.harvest(trace)
        pr = spec.pr
        if spec.type == "pov-adaptive" and benchmark_price > 0:
            mid = sim.mid(venue_id)
            if mid is not None:
                pr = pov_adaptive_rate(spec.pr, mid, benchmark_price,
                                       spec.sensitivity, parent.side, spec.pr_max)
        target_own = pov_child_size(tracker.other_volume, pr)
        want = target_own - trace.filled - tracker.outstanding(trace)
        want = min(want, parent.quantity - trace.filled - tracker.outstanding(trace))
        if spec.max_child is not None:
            want = min(want, spec.max_child)
        if want > 0 and sim.clock < parent.end:
            _submit_child(spec, parent, sim, trace, tracker, venue_id, want)
            sim.advance(1)
            tracker.harvest(trace)
        trace.realized.append((window_idx, target_own, trace.filled))
        window_idx += 1
    tracker.harvest(trace)
    _cancel_resting(tracker, sim)
