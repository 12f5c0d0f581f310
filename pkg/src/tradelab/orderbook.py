"""Single-venue continuous-trading limit order book.

Price-time priority matching with the full order-type taxonomy used by the
rest of the package: market, limit, market-with-protection and stop orders,
iceberg display/reserve handling, fully hidden orders, discretionary limit
prices, and the usual time-in-force instructions (GTC, GTD, GAT, IOC, FOK,
AON, day).

Conventions:
    * Prices are integer ticks, quantities integer shares. The currency value
      of one tick is ``tick_size`` and is only used by reporting layers.
    * Within a price level, visible slices match strictly before hidden
      remainders; both queues are FIFO on (timestamp, sequence).
    * Iceberg reserves drain through display-sized refills; each refill gets
      a fresh timestamp/sequence and therefore loses time priority.
    * AON orders and stop orders wait in pending sets outside the book and
      are re-evaluated after every mutation; neither is ever partially
      filled while pending.
    * All operations are sequential per book instance (single writer).
"""

from __future__ import annotations

import bisect
import heapq
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class Side(str, Enum):
    BUY = "buy"
    SELL = "sell"

    @property
    def opposite(self) -> "Side":
        return Side.SELL if self is Side.BUY else Side.BUY


class OrderKind(str, Enum):
    MARKET = "market"
    LIMIT = "limit"
    MARKET_WITH_PROTECTION = "market_with_protection"
    STOP = "stop"


class Tif(str, Enum):
    GTC = "gtc"
    GTD = "gtd"
    GAT = "gat"
    IOC = "ioc"
    FOK = "fok"
    AON = "aon"
    DAY = "day"


class Disposition(str, Enum):
    FILLED = "filled"
    PARTIAL_RESTING = "partial-resting"
    RESTING = "resting"
    CANCELLED = "cancelled"
    REJECTED = "rejected"


class UnknownOrderError(KeyError):
    """Raised when cancelling an order id the book has never seen or no longer holds."""


@dataclass
class Order:
    """A single order as submitted to a venue.

    ``display_quantity`` is the iceberg peak: ``None`` means fully displayed,
    ``0`` means fully hidden. ``stop_kind`` names the order a stop converts
    into when triggered. ``tif_time`` carries the GTD expiry tick or the GAT
    start tick. ``discretion_offset`` is the hidden willingness to trade past
    the displayed limit (in ticks).
    """

    order_id: str
    side: Side
    kind: OrderKind
    quantity: int
    limit_price: Optional[int] = None
    display_quantity: Optional[int] = None
    stop_price: Optional[int] = None
    stop_kind: OrderKind = OrderKind.MARKET
    protection_offset: Optional[int] = None
    discretion_offset: int = 0
    tif: Tif = Tif.GTC
    tif_time: Optional[int] = None
    timestamp: int = 0
    venue_id: str = ""

    @property
    def display(self) -> int:
        return self.quantity if self.display_quantity is None else self.display_quantity


@dataclass(frozen=True)
class Fill:
    taker_order_id: str
    maker_order_id: str
    price: int
    quantity: int
    time: int
    maker_was_hidden: bool = False


@dataclass(frozen=True)
class SubmitResult:
    fills: tuple[Fill, ...]
    disposition: Disposition
    reason: Optional[str] = None


@dataclass(frozen=True)
class SnapshotEntry:
    order_id: str
    quantity: int
    hidden: bool
    priority: tuple[int, int]  # (timestamp, sequence)


@dataclass(frozen=True)
class SnapshotLevel:
    price: int
    total: int
    entries: tuple[SnapshotEntry, ...]


@dataclass(frozen=True)
class BookSnapshot:
    bids: tuple[SnapshotLevel, ...]
    asks: tuple[SnapshotLevel, ...]
    last_trade_price: Optional[int]
    clock: int
    pending_stops: tuple[str, ...] = ()
    pending_aons: tuple[str, ...] = ()


class EventLog:
    """Order-event recorder: one delimited line per event.

    Columns, in fixed order: event, clock, order-id, side, price-ticks, qty,
    flags. ``flags`` is a comma-joined ``key=value`` list; price is ``-`` for
    unpriced events (pure market orders).
    """

    COLUMNS = ("event", "clock", "order_id", "side", "price_ticks", "qty", "flags")
    DELIMITER = "|"

    def __init__(self) -> None:
        self.lines: list[str] = []

    def record(self, event: str, clock: int, order_id: str, side: str,
               price: Optional[int], qty: int, flags: Optional[dict] = None) -> None:
        flag_text = ",".join(f"{k}={v}" for k, v in (flags or {}).items())
        price_text = "-" if price is None else str(price)
        self.lines.append(self.DELIMITER.join(
            (event, str(clock), order_id, side, price_text, str(qty), flag_text)))

    def to_text(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())


# ---------------------------------------------------------------------------
# internal book structures
# ---------------------------------------------------------------------------

@dataclass
class _Resting:
    order: Order
    visible_qty: int   # current display slice (0 for fully hidden entries)
    hidden_qty: int    # iceberg reserve, or the whole remainder when hidden
    ts: int
    seq: int

    @property
    def remaining(self) -> int:
        return self.visible_qty + self.hidden_qty


class _Level:
    __slots__ = ("price", "visible", "hidden")

    def __init__(self, price: int) -> None:
        self.price = price
        self.visible: deque[_Resting] = deque()
        self.hidden: deque[_Resting] = deque()

    @property
    def empty(self) -> bool:
        return not self.visible and not self.hidden


class _Ledger:
    """Per-order share accounting: submitted = filled + cancelled + resting."""

    __slots__ = ("submitted", "filled", "cancelled")

    def __init__(self) -> None:
        self.submitted = 0
        self.filled = 0
        self.cancelled = 0


class OrderBook:
    """Continuous-trading book for one venue.

    The settle loop after every mutation first activates triggered stops
    (in stop-entry order), then fires feasible AON orders (in entry order),
    repeating until neither set changes.
    """

    def __init__(self, venue_id: str = "", tick_size: float = 1.0,
                 session_close: Optional[int] = None, log: Optional[EventLog] = None):
        self.venue_id = venue_id
        self.tick_size = tick_size
        self.session_close = session_close
        self.log = log
        self.clock = 0
        self.last_trade_price: Optional[int] = None
        self._levels: dict[Side, dict[int, _Level]] = {Side.BUY: {}, Side.SELL: {}}
        self._prices: dict[Side, list[int]] = {Side.BUY: [], Side.SELL: []}  # ascending
        self._index: dict[str, tuple] = {}   # order_id -> ("book", side, price) | ("stop"/"aon"/"gat",)
        self._stops: list[tuple[int, Order]] = []   # (entry seq, order)
        self._aons: list[tuple[int, Order]] = []
        self._gats: list[tuple[int, int, Order]] = []   # heap (start, seq, order)
        self._expiries: list[tuple[int, str]] = []      # heap (expiry tick, order_id)
        self._ledger: dict[str, _Ledger] = {}
        self._max_discretion: dict[Side, int] = {Side.BUY: 0, Side.SELL: 0}
        self._seq = 0
        self._fills: list[Fill] = []

    # -- small accessors ----------------------------------------------------

    def best_bid(self) -> Optional[int]:
        prices = self._prices[Side.BUY]
        return prices[-1] if prices else None

    def best_ask(self) -> Optional[int]:
        prices = self._prices[Side.SELL]
        return prices[0] if prices else None

    def mid(self) -> Optional[float]:
        bid, ask = self.best_bid(), self.best_ask()
        if bid is None or ask is None:
            return None
        return (bid + ask) / 2.0

    def remaining(self, order_id: str) -> int:
        loc = self._index.get(order_id)
        if loc is None:
            return 0
        if loc[0] == "book":
            return self._find_resting(order_id, loc).remaining
        return self._pending_order(order_id, loc).quantity

    def ledger(self, order_id: str) -> tuple[int, int, int]:
        """(submitted, filled, cancelled) totals for an order id."""
        entry = self._ledger.get(order_id)
        if entry is None:
            return (0, 0, 0)
        return (entry.submitted, entry.filled, entry.cancelled)

    def all_fills(self) -> list[Fill]:
        return list(self._fills)

    def fill_count(self) -> int:
        return len(self._fills)

    def fills_since(self, index: int) -> list[Fill]:
        return self._fills[index:]

    def order_ids(self) -> set[str]:
        return set(self._index)

    # -- submission ---------------------------------------------------------

    def submit(self, order: Order, clock: Optional[int] = None) -> SubmitResult:
        if clock is not None:
            self.clock = max(self.clock, clock)
        reason = self._validate(order)
        led = self._ledger.setdefault(order.order_id, _Ledger())
        led.submitted += order.quantity
        self._log("submit", order.order_id, order.side.value, order.limit_price,
                  order.quantity, self._submit_flags(order, rejected=reason))
        if reason is not None:
            led.cancelled += order.quantity
            return SubmitResult((), Disposition.REJECTED, reason)

        if order.tif is Tif.GAT and order.tif_time is not None and order.tif_time > self.clock:
            seq = self._next_seq()
            heapq.heappush(self._gats, (order.tif_time, seq, order))
            self._index[order.order_id] = ("gat",)
            return SubmitResult((), Disposition.RESTING)

        result = self._enter(order)
        self._settle()
        return result

    def _enter(self, order: Order) -> SubmitResult:
        """Place an active (non-GAT-deferred) order: match, rest, or pend."""
        if order.kind is OrderKind.STOP:
            self._stops.append((self._next_seq(), order))
            self._index[order.order_id] = ("stop",)
            self._push_expiry(order)
            return SubmitResult((), Disposition.RESTING)

        if order.kind is OrderKind.MARKET_WITH_PROTECTION:
            order = self._convert_protection(order)

        if order.tif is Tif.AON:
            self._aons.append((self._next_seq(), order))
            self._index[order.order_id] = ("aon",)
            self._push_expiry(order)
            fired = self._try_fire_aons()
            if any(o.order_id == order.order_id for o in fired):
                return SubmitResult(tuple(f for f in self._fills
                                          if f.taker_order_id == order.order_id),
                                    Disposition.FILLED)
            return SubmitResult((), Disposition.RESTING)

        eff_limit = self._effective_limit(order)
        qty = order.quantity

        if order.tif is Tif.FOK and self._crossable(order.side, qty, eff_limit) < qty:
            led = self._ledger[order.order_id]
            led.cancelled += qty
            self._log("cancel", order.order_id, order.side.value, order.limit_price,
                      qty, {"why": "fok-unfillable"})
            return SubmitResult((), Disposition.CANCELLED)

        fills, leftover = self._execute(order, qty, eff_limit)

        if leftover > 0:
            if order.kind is OrderKind.MARKET or order.tif in (Tif.IOC, Tif.FOK):
                led = self._ledger[order.order_id]
                led.cancelled += leftover
                why = "market-exhausted" if order.kind is OrderKind.MARKET else order.tif.value
                self._log("cancel", order.order_id, order.side.value, order.limit_price,
                          leftover, {"why": why})
                disp = Disposition.CANCELLED
            else:
                self._rest(order, leftover)
                disp = Disposition.PARTIAL_RESTING if fills else Disposition.RESTING
        else:
            disp = Disposition.FILLED
        return SubmitResult(tuple(fills), disp)

    def _validate(self, order: Order) -> Optional[str]:
        if order.quantity <= 0:
            return "quantity must be positive"
        display = order.display
        if display < 0 or display > order.quantity:
            return "display_quantity outside [0, quantity]"
        if order.discretion_offset < 0:
            return "discretion_offset must be >= 0"
        kind = order.kind if order.kind is not OrderKind.STOP else order.stop_kind
        if kind is OrderKind.LIMIT and order.limit_price is None:
            return "limit order without limit_price"
        if kind is OrderKind.MARKET and order.limit_price is not None:
            return "market order carries a limit_price"
        if order.kind is OrderKind.MARKET_WITH_PROTECTION:
            if order.protection_offset is None:
                return "market-with-protection without protection_offset"
            if self.last_trade_price is None:
                return "market-with-protection without a reference trade price"
        if order.kind is OrderKind.STOP:
            if order.stop_price is None:
                return "stop order without stop_price"
            if order.stop_kind not in (OrderKind.MARKET, OrderKind.LIMIT):
                return "stop orders wrap market or limit only"
            if self.last_trade_price is not None:
                if order.side is Side.BUY and order.stop_price < self.last_trade_price:
                    return "buy stop below last trade"
                if order.side is Side.SELL and order.stop_price > self.last_trade_price:
                    return "sell stop above last trade"
        elif order.kind is OrderKind.MARKET and order.tif is not Tif.AON:
            # AON market orders may wait for liquidity; immediate ones need a book to hit.
            if not self._prices[order.side.opposite]:
                return "market order into empty opposite side"
        if order.tif is Tif.GTD and order.tif_time is None:
            return "gtd order without expiry"
        if order.tif is Tif.GAT and order.tif_time is None:
            return "gat order without start time"
        if order.tif is Tif.DAY and self.session_close is None:
            return "day order without a configured session close"
        return None

    def _convert_protection(self, order: Order) -> Order:
        offset = order.protection_offset or 0
        limit = (self.last_trade_price + offset if order.side is Side.BUY
                 else self.last_trade_price - offset)
        converted = Order(
            order_id=order.order_id, side=order.side, kind=OrderKind.LIMIT,
            quantity=order.quantity, limit_price=limit,
            display_quantity=order.display_quantity,
            discretion_offset=order.discretion_offset, tif=order.tif,
            tif_time=order.tif_time, timestamp=order.timestamp,
            venue_id=order.venue_id)
        return converted

    def _effective_limit(self, order: Order) -> Optional[int]:
        if order.limit_price is None:
            return None
        if order.side is Side.BUY:
            return order.limit_price + order.discretion_offset
        return order.limit_price - order.discretion_offset

    # -- matching -----------------------------------------------------------

    def _acceptable(self, side: Side, price: int, eff_limit: Optional[int]) -> bool:
        if eff_limit is None:
            return True
        return price <= eff_limit if side is Side.BUY else price >= eff_limit

    def _opposite_prices(self, side: Side) -> list[int]:
        """Opposite-side prices in matching (best-first) order."""
        prices = self._prices[side.opposite]
        return list(prices) if side is Side.BUY else list(reversed(prices))

    def _crossable(self, side: Side, needed: int, eff_limit: Optional[int]) -> int:
        """Total quantity a taker could cross right now, mirroring _execute."""
        total = 0
        opp = side.opposite
        levels = self._levels[opp]
        reach_prices = []
        for price in self._opposite_prices(side):
            if not self._acceptable(side, price, eff_limit):
                reach_prices.append(price)
                continue
            level = levels[price]
            total += sum(e.remaining for e in level.visible)
            total += sum(e.remaining for e in level.hidden)
            if total >= needed:
                return total
        if eff_limit is not None:
            max_disc = self._max_discretion[opp]
            for price in reach_prices:
                if abs(price - eff_limit) > max_disc:
                    break
                level = levels[price]
                for entry in list(level.visible) + list(level.hidden):
                    if self._reaches(entry, eff_limit):
                        total += entry.remaining
                        if total >= needed:
                            return total
        return total

    def _reaches(self, entry: _Resting, eff_limit: int) -> bool:
        disc = entry.order.discretion_offset
        if disc <= 0 or entry.order.limit_price is None:
            return False
        if entry.order.side is Side.SELL:
            return entry.order.limit_price - disc <= eff_limit
        return entry.order.limit_price + disc >= eff_limit

    def _execute(self, taker: Order, qty: int, eff_limit: Optional[int]) -> tuple[list[Fill], int]:
        fills: list[Fill] = []
        opp = taker.side.opposite
        levels = self._levels[opp]
        while qty > 0:
            prices = self._opposite_prices(taker.side)
            if not prices or not self._acceptable(taker.side, prices[0], eff_limit):
                break
            level = levels[prices[0]]
            qty = self._consume_level(level, taker, qty, level.price, fills)
            self._drop_if_empty(opp, level)
        if qty > 0 and eff_limit is not None:
            qty = self._consume_discretionary(taker, qty, eff_limit, fills)
        return fills, qty

    def _consume_level(self, level: _Level, taker: Order, qty: int,
                       trade_price: int, fills: list[Fill]) -> int:
        while qty > 0 and level.visible:
            entry = level.visible[0]
            take = min(qty, entry.visible_qty)
            self._record_fill(taker, entry, trade_price, take, hidden=False, fills=fills)
            entry.visible_qty -= take
            qty -= take
            if entry.visible_qty == 0:
                level.visible.popleft()
                self._refill_or_retire(level, entry)
        while qty > 0 and level.hidden:
            entry = level.hidden[0]
            take = min(qty, entry.hidden_qty)
            self._record_fill(taker, entry, trade_price, take, hidden=True, fills=fills)
            entry.hidden_qty -= take
            qty -= take
            if entry.hidden_qty == 0:
                level.hidden.popleft()
                self._index.pop(entry.order.order_id, None)
        return qty

    def _refill_or_retire(self, level: _Level, entry: _Resting) -> None:
        if entry.hidden_qty > 0:
            # Iceberg refresh: new display slice, fresh priority (time priority lost).
            refill = min(entry.order.display, entry.hidden_qty)
            entry.visible_qty = refill
            entry.hidden_qty -= refill
            entry.ts = self.clock
            entry.seq = self._next_seq()
            level.visible.append(entry)
        else:
            self._index.pop(entry.order.order_id, None)

    def _consume_discretionary(self, taker: Order, qty: int, eff_limit: int,
                               fills: list[Fill]) -> int:
        """Match resting orders whose discretion reaches the taker's limit.

        Trades print at the taker's effective limit; reach candidates rank
        behind everything displayed at that price (already consumed) and are
        walked in displayed-price order, visible before hidden.
        """
        opp = taker.side.opposite
        levels = self._levels[opp]
        max_disc = self._max_discretion[opp]
        while qty > 0:
            matched = False
            for price in self._opposite_prices(taker.side):
                if self._acceptable(taker.side, price, eff_limit):
                    continue
                if abs(price - eff_limit) > max_disc:
                    break
                level = levels[price]
                entry = next((e for e in level.visible if self._reaches(e, eff_limit)), None)
                hidden = False
                if entry is None:
                    entry = next((e for e in level.hidden if self._reaches(e, eff_limit)), None)
                    hidden = True
                if entry is None:
                    continue
                if hidden:
                    take = min(qty, entry.hidden_qty)
                    self._record_fill(taker, entry, eff_limit, take, hidden=True, fills=fills)
                    entry.hidden_qty -= take
                    qty -= take
                    if entry.hidden_qty == 0:
                        level.hidden.remove(entry)
                        self._index.pop(entry.order.order_id, None)
                else:
                    take = min(qty, entry.visible_qty)
                    self._record_fill(taker, entry, eff_limit, take, hidden=False, fills=fills)
                    entry.visible_qty -= take
                    qty -= take
                    if entry.visible_qty == 0:
                        level.visible.remove(entry)
                        self._refill_or_retire(level, entry)
                self._drop_if_empty(opp, level)
                matched = True
                break
            if not matched:
                break
        return qty

    def _record_fill(self, taker: Order, maker: _Resting, price: int, qty: int,
                     hidden: bool, fills: list[Fill]) -> None:
        fill = Fill(taker_order_id=taker.order_id, maker_order_id=maker.order.order_id,
                    price=price, quantity=qty, time=self.clock, maker_was_hidden=hidden)
        fills.append(fill)
        self._fills.append(fill)
        self._ledger[taker.order_id].filled += qty
        self._ledger.setdefault(maker.order.order_id, _Ledger()).filled += qty
        self.last_trade_price = price
        self._log("fill", taker.order_id, taker.side.value, price, qty,
                  {"maker": maker.order.order_id, "maker_hidden": int(hidden)})

    # -- resting ------------------------------------------------------------

    def _rest(self, order: Order, leftover: int) -> None:
        display = min(order.display, leftover)
        entry = _Resting(order=order, visible_qty=display, hidden_qty=leftover - display,
                         ts=self.clock, seq=self._next_seq())
        level = self._level_for(order.side, order.limit_price)
        if display > 0:
            level.visible.append(entry)
        else:
            level.hidden.append(entry)
        self._index[order.order_id] = ("book", order.side, order.limit_price)
        if order.discretion_offset > 0:
            side_max = self._max_discretion[order.side]
            self._max_discretion[order.side] = max(side_max, order.discretion_offset)
        self._push_expiry(order)

    def _level_for(self, side: Side, price: int) -> _Level:
        levels = self._levels[side]
        level = levels.get(price)
        if level is None:
            level = _Level(price)
            levels[price] = level
            bisect.insort(self._prices[side], price)
        return level

    def _drop_if_empty(self, side: Side, level: _Level) -> None:
        if level.empty:
            del self._levels[side][level.price]
            self._prices[side].remove(level.price)

    def _find_resting(self, order_id: str, loc: tuple) -> _Resting:
        _, side, price = loc
        level = self._levels[side][price]
        for entry in level.visible:
            if entry.order.order_id == order_id:
                return entry
        for entry in level.hidden:
            if entry.order.order_id == order_id:
                return entry
        raise UnknownOrderError(order_id)

    def _pending_order(self, order_id: str, loc: tuple) -> Order:
        pool = {"stop": self._stops, "aon": self._aons}.get(loc[0])
        if pool is not None:
            for _, order in pool:
                if order.order_id == order_id:
                    return order
        else:
            for _, _, order in self._gats:
                if order.order_id == order_id:
                    return order
        raise UnknownOrderError(order_id)

    # -- cancel / expiry ----------------------------------------------------

    def _remove(self, order_id: str) -> tuple[Order, int]:
        """Pull an order out of the book or a pending set; returns (order, qty removed)."""
        loc = self._index.get(order_id)
        if loc is None:
            raise UnknownOrderError(order_id)
        if loc[0] == "book":
            entry = self._find_resting(order_id, loc)
            removed = entry.remaining
            _, side, price = loc
            level = self._levels[side][price]
            if entry in level.visible:
                level.visible.remove(entry)
            else:
                level.hidden.remove(entry)
            self._drop_if_empty(side, level)
            order = entry.order
        else:
            order = self._pending_order(order_id, loc)
            removed = order.quantity
            if loc[0] == "stop":
                self._stops = [(s, o) for s, o in self._stops if o.order_id != order_id]
            elif loc[0] == "aon":
                self._aons = [(s, o) for s, o in self._aons if o.order_id != order_id]
            else:
                self._gats = [(t, s, o) for t, s, o in self._gats if o.order_id != order_id]
                heapq.heapify(self._gats)
        del self._index[order_id]
        self._ledger[order_id].cancelled += removed
        return order, removed

    def cancel(self, order_id: str) -> int:
        order, removed = self._remove(order_id)
        self._log("cancel", order_id, order.side.value, order.limit_price,
                  removed, {"why": "user"})
        return removed

    def expire(self, clock: int) -> list[str]:
        """Remove dated orders past their horizon; activate due GAT orders."""
        self.clock = max(self.clock, clock)
        expired: list[str] = []
        while self._expiries and self._expiries[0][0] <= self.clock:
            _, order_id = heapq.heappop(self._expiries)
            loc = self._index.get(order_id)
            if loc is None:
                continue
            if loc[0] == "book":
                order = self._find_resting(order_id, loc).order
            else:
                order = self._pending_order(order_id, loc)
            if not self._is_expired(order):
                continue
            _, removed = self._remove(order_id)
            self._log("expire", order_id, order.side.value, order.limit_price,
                      removed, {"tif": order.tif.value})
            expired.append(order_id)
        activated = False
        while self._gats and self._gats[0][0] <= self.clock:
            _, _, order = heapq.heappop(self._gats)
            if self._index.get(order.order_id) != ("gat",):
                continue
            del self._index[order.order_id]
            self._log("trigger", order.order_id, order.side.value, order.limit_price,
                      order.quantity, {"kind": "gat"})
            self._enter(order)
            activated = True
        if activated or expired:
            self._settle()
        return expired

    def _is_expired(self, order: Order) -> bool:
        if order.tif is Tif.GTD and order.tif_time is not None:
            return self.clock >= order.tif_time
        if order.tif is Tif.DAY and self.session_close is not None:
            return self.clock >= self.session_close
        return False

    def _push_expiry(self, order: Order) -> None:
        if order.tif is Tif.GTD and order.tif_time is not None:
            heapq.heappush(self._expiries, (order.tif_time, order.order_id))
        elif order.tif is Tif.DAY and self.session_close is not None:
            heapq.heappush(self._expiries, (self.session_close, order.order_id))

    # -- stops / AON settle loop ---------------------------------------------

    def trigger_stops(self, last_trade_price: Optional[int] = None) -> list[Order]:
        """Activate pending stops against the given (or current) trade price."""
        price = self.last_trade_price if last_trade_price is None else last_trade_price
        activated: list[Order] = []
        if price is None:
            return activated
        while True:
            fired = self._fire_one_stop(price)
            if fired is None:
                break
            activated.append(fired)
            price = self.last_trade_price if self.last_trade_price is not None else price
        self._settle()
        return activated

    def _fire_one_stop(self, price: int) -> Optional[Order]:
        for seq, order in self._stops:
            hit = (price >= order.stop_price if order.side is Side.BUY
                   else price <= order.stop_price)
            if not hit:
                continue
            self._stops = [(s, o) for s, o in self._stops if o.order_id != order.order_id]
            self._index.pop(order.order_id, None)
            converted = Order(
                order_id=order.order_id, side=order.side, kind=order.stop_kind,
                quantity=order.quantity, limit_price=order.limit_price,
                display_quantity=order.display_quantity,
                discretion_offset=order.discretion_offset, tif=order.tif,
                tif_time=order.tif_time, timestamp=order.timestamp,
                venue_id=order.venue_id)
            self._log("trigger", order.order_id, order.side.value, order.stop_price,
                      order.quantity, {"kind": "stop", "as": converted.kind.value})
            if converted.kind is OrderKind.MARKET and not self._prices[converted.side.opposite]:
                # nothing to hit: the stop dies rather than resting as a market order
                self._ledger[order.order_id].cancelled += order.quantity
                self._log("cancel", order.order_id, order.side.value, None,
                          order.quantity, {"why": "stop-into-empty-book"})
            else:
                self._enter(converted)
            return order
        return None

    def _try_fire_aons(self) -> list[Order]:
        fired: list[Order] = []
        progress = True
        while progress:
            progress = False
            for seq, order in list(self._aons):
                eff_limit = self._effective_limit(order)
                if order.kind is OrderKind.MARKET and not self._prices[order.side.opposite]:
                    continue
                if self._crossable(order.side, order.quantity, eff_limit) < order.quantity:
                    continue
                self._aons = [(s, o) for s, o in self._aons if o.order_id != order.order_id]
                self._index.pop(order.order_id, None)
                self._execute(order, order.quantity, eff_limit)
                fired.append(order)
                progress = True
                break
        return fired

    def _settle(self) -> None:
        while True:
            fired_stop = (self._fire_one_stop(self.last_trade_price)
                          if self.last_trade_price is not None else None)
            fired_aons = self._try_fire_aons()
            if fired_stop is None and not fired_aons:
                break

    # -- views ----------------------------------------------------------------

    def snapshot(self, depth: Optional[int] = None, visibility: str = "public") -> BookSnapshot:
        omniscient = visibility == "omniscient"
        bids = self._side_view(Side.BUY, depth, omniscient)
        asks = self._side_view(Side.SELL, depth, omniscient)
        stops = tuple(o.order_id for _, o in self._stops) if omniscient else ()
        aons = tuple(o.order_id for _, o in self._aons) if omniscient else ()
        return BookSnapshot(bids=bids, asks=asks, last_trade_price=self.last_trade_price,
                            clock=self.clock, pending_stops=stops, pending_aons=aons)

    def _side_view(self, side: Side, depth: Optional[int], omniscient: bool):
        prices = self._prices[side]
        ordered = list(reversed(prices)) if side is Side.BUY else list(prices)
        out = []
        for price in ordered:
            level = self._levels[side][price]
            entries = [SnapshotEntry(e.order.order_id, e.visible_qty, False, (e.ts, e.seq))
                       for e in level.visible]
            if omniscient:
                entries += [SnapshotEntry(e.order.order_id, e.hidden_qty, True, (e.ts, e.seq))
                            for e in level.visible if e.hidden_qty > 0]
                entries += [SnapshotEntry(e.order.order_id, e.hidden_qty, True, (e.ts, e.seq))
                            for e in level.hidden]
            total = sum(e.quantity for e in entries)
            if not entries:
                continue
            out.append(SnapshotLevel(price=price, total=total, entries=tuple(entries)))
            if depth is not None and len(out) >= depth:
                break
        return tuple(out)

    # -- invariant checks (used by property tests) ----------------------------

    def check_invariants(self) -> None:
        for side in (Side.BUY, Side.SELL):
            prices = self._prices[side]
            assert prices == sorted(prices), "price index out of order"
            assert len(prices) == len(self._levels[side])
            for price in prices:
                level = self._levels[side][price]
                assert not level.empty, f"empty level retained at {price}"
                keys = [(e.ts, e.seq) for e in level.visible]
                assert keys == sorted(keys), "visible queue violates time priority"
                hkeys = [(e.ts, e.seq) for e in level.hidden]
                assert hkeys == sorted(hkeys), "hidden queue violates time priority"
                for e in list(level.visible) + list(level.hidden):
                    assert e.remaining > 0, "resting order with zero remaining"
        bid, ask = self.best_bid(), self.best_ask()
        if bid is not None and ask is not None:
            visible_bid = self._best_visible(Side.BUY)
            visible_ask = self._best_visible(Side.SELL)
            if visible_bid is not None and visible_ask is not None:
                assert visible_bid < visible_ask, "crossed visible book at rest"

    def _best_visible(self, side: Side) -> Optional[int]:
        prices = self._prices[side]
        ordered = reversed(prices) if side is Side.BUY else iter(prices)
        for price in ordered:
            if self._levels[side][price].visible:
                return price
        return None

    # -- plumbing -------------------------------------------------------------

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _submit_flags(self, order: Order, rejected: Optional[str]) -> dict:
        flags = {"kind": order.kind.value, "tif": order.tif.value, "disp": order.display}
        if order.kind is OrderKind.STOP:
            flags["stop"] = order.stop_price
            flags["as"] = order.stop_kind.value
        if order.discretion_offset:
            flags["disc"] = order.discretion_offset
        if rejected:
            flags["rejected"] = rejected.replace(",", ";").replace("=", ":")
        return flags

    def _log(self, event: str, order_id: str, side: str, price: Optional[int],
             qty: int, flags: Optional[dict] = None) -> None:
        if self.log is not None:
            self.log.record(event, self.clock, order_id, side, price, qty, flags)
