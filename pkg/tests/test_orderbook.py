"""Matching-engine semantics: golden book scenarios and order-type contracts."""

import pytest

from tradelab.orderbook import (
    Disposition,
    EventLog,
    Order,
    OrderBook,
    OrderKind,
    Side,
    Tif,
    UnknownOrderError,
)


def hms(h, m, s):
    return h * 3600 + m * 60 + s


def limit(oid, side, price, qty, display=None, tif=Tif.GTC, disc=0, **kw):
    return Order(order_id=oid, side=side, kind=OrderKind.LIMIT, quantity=qty,
                 limit_price=price, display_quantity=display, tif=tif,
                 discretion_offset=disc, **kw)


def market(oid, side, qty, tif=Tif.GTC, **kw):
    return Order(order_id=oid, side=side, kind=OrderKind.MARKET, quantity=qty,
                 tif=tif, **kw)


def slicing_book(native_iceberg=False):
    """The 3-level book behind the 2,200-share crossing example."""
    book = OrderBook()
    if native_iceberg:
        # S1 is the displayed peak of a 10,000-share native iceberg.
        book.submit(limit("S1", Side.SELL, 51, 10_000, display=1_000), clock=hms(10, 20, 0))
    else:
        book.submit(limit("S1", Side.SELL, 51, 1_000), clock=hms(10, 20, 0))
    book.submit(limit("B2", Side.BUY, 49, 2_000), clock=hms(10, 20, 25))
    book.submit(limit("S3", Side.SELL, 52, 2_500), clock=hms(10, 24, 9))
    book.submit(limit("B3", Side.BUY, 48, 1_500), clock=hms(10, 24, 20))
    book.submit(limit("B1", Side.BUY, 50, 1_000), clock=hms(10, 25, 0))
    book.submit(limit("S2", Side.SELL, 51, 800), clock=hms(10, 25, 25))
    return book


def visible_sells(book):
    snap = book.snapshot(visibility="omniscient")
    return [(lvl.price, e.order_id, e.quantity, e.hidden)
            for lvl in snap.asks for e in lvl.entries]


class TestMarketCross:
    """Market buy 2,200 against {S1:1000@51, S2:800@51, S3:2500@52}."""

    def test_fills_walk_price_then_time(self):
        book = slicing_book()
        result = book.submit(market("MO", Side.BUY, 2_200), clock=hms(10, 26, 0))
        assert result.disposition is Disposition.FILLED
        assert [(f.price, f.quantity, f.maker_order_id) for f in result.fills] == [
            (51, 1_000, "S1"),
            (51, 800, "S2"),
            (52, 400, "S3"),
        ]

    def test_residual_maker_remains(self):
        book = slicing_book()
        book.submit(market("MO", Side.BUY, 2_200), clock=hms(10, 26, 0))
        assert book.remaining("S3") == 2_100
        assert visible_sells(book) == [(52, "S3", 2_100, False)]
        assert book.last_trade_price == 52

    def test_native_iceberg_completes_at_51(self):
        book = slicing_book(native_iceberg=True)
        result = book.submit(market("MO", Side.BUY, 2_200), clock=hms(10, 26, 0))
        assert [(f.price, f.quantity, f.maker_order_id) for f in result.fills] == [
            (51, 1_000, "S1"),
            (51, 800, "S2"),
            (51, 400, "S1"),   # consumed from the fresh refill slice
        ]
        # a fresh 600-share display slice rests; reserve down to 8,000
        sells = visible_sells(book)
        assert (51, "S1", 600, False) in sells
        assert (51, "S1", 8_000, True) in sells
        assert (52, "S3", 2_500, False) in sells


class TestHiddenOrderNarrative:
    """Hidden 2,000-share buy working at 51, then discovered by a ping."""

    def build(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 1_000), clock=hms(10, 35, 0))
        book.submit(limit("B2", Side.BUY, 49, 1_000), clock=hms(10, 35, 10))
        book.submit(limit("S2", Side.SELL, 52, 1_500), clock=hms(10, 37, 15))
        book.submit(limit("S3", Side.SELL, 52, 800), clock=hms(10, 39, 9))
        book.submit(limit("B3", Side.BUY, 48, 8_000), clock=hms(10, 40, 10))
        book.submit(limit("B1", Side.BUY, 50, 2_000), clock=hms(10, 41, 0))
        book.submit(limit("S4", Side.SELL, 52, 2_000), clock=hms(10, 41, 0))
        return book

    def test_half_fills_half_rests_latent(self):
        book = self.build()
        result = book.submit(limit("HB", Side.BUY, 51, 2_000, display=0),
                             clock=hms(10, 42, 0))
        assert result.disposition is Disposition.PARTIAL_RESTING
        assert [(f.price, f.quantity) for f in result.fills] == [(51, 1_000)]
        assert book.remaining("HB") == 1_000
        # latent: absent from the public view, present omnisciently
        public = book.snapshot(visibility="public")
        assert all(e.order_id != "HB" for lvl in public.bids for e in lvl.entries)
        omni = book.snapshot(visibility="omniscient")
        assert any(e.order_id == "HB" and e.hidden and e.quantity == 1_000
                   for lvl in omni.bids for e in lvl.entries)

    def test_ioc_ping_crosses_the_latent_order(self):
        book = self.build()
        book.submit(limit("HB", Side.BUY, 51, 2_000, display=0), clock=hms(10, 42, 0))
        ping = book.submit(limit("PING", Side.SELL, 51, 1_000, tif=Tif.IOC),
                           clock=hms(10, 43, 0))
        assert [(f.price, f.quantity, f.maker_order_id, f.maker_was_hidden)
                for f in ping.fills] == [(51, 1_000, "HB", True)]
        assert book.remaining("HB") == 0


class TestIcebergRefill:
    """20,000-share iceberg at 51 displaying 2,000; aggressor takes 3,000."""

    def build(self):
        book = OrderBook()
        book.submit(limit("ICE", Side.SELL, 51, 20_000, display=2_000),
                    clock=hms(10, 5, 10))
        book.submit(limit("B1", Side.BUY, 50, 2_000), clock=hms(10, 6, 0))
        book.submit(limit("B2", Side.BUY, 49, 700), clock=hms(10, 6, 1))
        book.submit(limit("B3", Side.BUY, 48, 2_500), clock=hms(10, 6, 2))
        book.submit(limit("S2", Side.SELL, 51, 2_000), clock=hms(10, 21, 15))
        book.submit(limit("S3", Side.SELL, 52, 2_500), clock=hms(10, 25, 31))
        return book

    def test_refill_slice_and_reserve_drawdown(self):
        book = self.build()
        result = book.submit(market("MO", Side.BUY, 3_000), clock=hms(10, 28, 30))
        assert [(f.price, f.quantity, f.maker_order_id) for f in result.fills] == [
            (51, 2_000, "ICE"),
            (51, 1_000, "S2"),
        ]
        # refill slice of display size, reserve 18,000 -> 16,000
        sells = visible_sells(book)
        assert sells == [
            (51, "S2", 1_000, False),
            (51, "ICE", 2_000, False),
            (51, "ICE", 16_000, True),
            (52, "S3", 2_500, False),
        ]

    def test_refill_loses_time_priority(self):
        book = self.build()
        book.submit(market("MO", Side.BUY, 3_000), clock=hms(10, 28, 30))
        omni = book.snapshot(visibility="omniscient")
        level51 = omni.asks[0]
        by_id = {e.order_id: e for e in level51.entries if not e.hidden}
        assert by_id["ICE"].priority > by_id["S2"].priority

    def test_public_view_hides_the_reserve(self):
        book = self.build()
        public = book.snapshot(visibility="public")
        level51 = public.asks[0]
        assert [(e.order_id, e.quantity) for e in level51.entries] == [
            ("ICE", 2_000), ("S2", 2_000)]
        assert level51.total == 4_000

    def test_depth_limits_levels_per_side(self):
        book = self.build()
        one_deep = book.snapshot(depth=1)
        assert len(one_deep.asks) == 1 and one_deep.asks[0].price == 51
        assert len(one_deep.bids) == 1 and one_deep.bids[0].price == 50
        assert len(book.snapshot().asks) == 2
        assert len(book.snapshot().bids) == 3


class TestDiscretion:
    """A 52-limit sell prepared to trade at 51 ranks behind everything shown at 51."""

    def build(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 1_000), clock=1)
        book.submit(limit("S2", Side.SELL, 51, 3_000), clock=2)
        book.submit(limit("S3", Side.SELL, 52, 4_000, disc=1), clock=3)
        book.submit(limit("S4", Side.SELL, 52, 2_000), clock=4)
        return book

    def test_reach_fills_after_displayed_orders(self):
        book = self.build()
        result = book.submit(limit("BIG", Side.BUY, 51, 5_000), clock=5)
        assert [(f.price, f.quantity, f.maker_order_id) for f in result.fills] == [
            (51, 1_000, "S1"),
            (51, 3_000, "S2"),
            (51, 1_000, "S3"),
        ]
        assert book.remaining("S3") == 3_000
        assert book.remaining("S4") == 2_000

    def test_taker_discretion_extends_crossing_range(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 52, 500), clock=1)
        result = book.submit(limit("B1", Side.BUY, 51, 500, disc=1), clock=2)
        assert [(f.price, f.quantity) for f in result.fills] == [(52, 500)]

    def test_without_discretion_no_reach(self):
        book = self.build()
        book.cancel("S3")
        book.submit(limit("S3", Side.SELL, 52, 4_000), clock=5)  # no discretion now
        result = book.submit(limit("BIG", Side.BUY, 51, 5_000), clock=6)
        assert sum(f.quantity for f in result.fills) == 4_000
        assert book.remaining("BIG") == 1_000


class TestTimeInForce:
    def test_non_crossing_limit_rests(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 1_000), clock=1)
        result = book.submit(limit("B1", Side.BUY, 49, 100), clock=2)
        assert result.disposition is Disposition.RESTING
        assert result.fills == ()
        assert book.remaining("B1") == 100

    def test_fok_boundary_all_or_nothing(self):
        from dataclasses import replace
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 3_000), clock=1)
        book.submit(limit("S2", Side.SELL, 51, 1_999, display=500), clock=2)
        before = book.snapshot(visibility="omniscient")
        result = book.submit(limit("FOK", Side.BUY, 51, 5_000, tif=Tif.FOK), clock=3)
        assert result.disposition is Disposition.CANCELLED
        assert result.fills == ()
        after = book.snapshot(visibility="omniscient")
        assert replace(after, clock=0) == replace(before, clock=0)

    def test_fok_counts_hidden_liquidity(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 1_000), clock=1)
        book.submit(limit("H1", Side.SELL, 51, 4_000, display=0), clock=2)
        result = book.submit(limit("FOK", Side.BUY, 51, 5_000, tif=Tif.FOK), clock=3)
        assert result.disposition is Disposition.FILLED
        assert sum(f.quantity for f in result.fills) == 5_000

    def test_ioc_cancels_remainder(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 300), clock=1)
        result = book.submit(limit("B1", Side.BUY, 51, 1_000, tif=Tif.IOC), clock=2)
        assert result.disposition is Disposition.CANCELLED
        assert sum(f.quantity for f in result.fills) == 300
        assert "B1" not in book.order_ids()
        submitted, filled, cancelled = book.ledger("B1")
        assert (submitted, filled, cancelled) == (1_000, 300, 700)

    def test_aon_waits_until_fully_fillable(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 600), clock=1)
        result = book.submit(limit("AON", Side.BUY, 51, 1_000, tif=Tif.AON), clock=2)
        assert result.disposition is Disposition.RESTING
        assert book.remaining("S1") == 600           # untouched
        book.submit(limit("S2", Side.SELL, 51, 400), clock=3)
        assert book.ledger("AON")[1] == 1_000        # fired on feasibility
        assert book.remaining("S1") == 0

    def test_feasible_aons_fire_in_entry_order(self):
        book = OrderBook()
        book.submit(limit("A1", Side.BUY, 51, 500, tif=Tif.AON), clock=1)
        book.submit(limit("A2", Side.BUY, 51, 500, tif=Tif.AON), clock=2)
        book.submit(limit("S1", Side.SELL, 51, 500), clock=3)
        assert book.ledger("A1")[1] == 500
        assert book.ledger("A2")[1] == 0

    def test_gat_queues_until_start(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 1_000), clock=1)
        result = book.submit(limit("GAT", Side.BUY, 51, 400, tif=Tif.GAT, tif_time=100),
                             clock=2)
        assert result.disposition is Disposition.RESTING
        assert book.remaining("S1") == 1_000
        book.expire(100)
        assert book.ledger("GAT")[1] == 400
        assert book.remaining("S1") == 600

    def test_gtd_expires_day_and_gtc_retained(self):
        book = OrderBook(session_close=1_000)
        book.submit(limit("GTD", Side.BUY, 49, 100, tif=Tif.GTD, tif_time=1_000), clock=1)
        book.submit(limit("DAY", Side.BUY, 48, 100, tif=Tif.DAY), clock=2)
        book.submit(limit("GTC", Side.BUY, 47, 100), clock=3)
        expired = book.expire(1_000)
        assert sorted(expired) == ["DAY", "GTD"]
        assert book.remaining("GTC") == 100


class TestStops:
    def build(self):
        # establish a last trade at 110 (prices in tenths: 11.0)
        book = OrderBook()
        book.submit(limit("S0", Side.SELL, 110, 100), clock=1)
        book.submit(market("B0", Side.BUY, 100), clock=2)
        assert book.last_trade_price == 110
        return book

    def test_protective_sell_stop_fires_on_downtick(self):
        book = self.build()
        book.submit(limit("BIDS", Side.BUY, 109, 1_000), clock=3)
        stop = Order(order_id="STP", side=Side.SELL, kind=OrderKind.STOP,
                     quantity=500, stop_price=110, stop_kind=OrderKind.MARKET)
        result = book.submit(stop, clock=4)
        assert result.disposition is Disposition.RESTING
        # a trade prints at 109: below the threshold
        book.submit(limit("S1", Side.SELL, 109, 200), clock=5)
        book.submit(market("B1", Side.BUY, 200), clock=6)
        assert book.ledger("STP")[1] == 500
        assert book.last_trade_price == 109

    def test_threshold_inclusive(self):
        book = self.build()
        book.submit(limit("BIDS", Side.BUY, 109, 1_000), clock=3)
        stop = Order(order_id="STP", side=Side.SELL, kind=OrderKind.STOP,
                     quantity=100, stop_price=109, stop_kind=OrderKind.MARKET)
        book.submit(stop, clock=4)
        book.submit(limit("S1", Side.SELL, 109, 100), clock=5)
        book.submit(market("B1", Side.BUY, 100), clock=6)   # prints exactly 109
        assert book.ledger("STP")[1] == 100

    def test_untouched_threshold_keeps_pending(self):
        book = self.build()
        stop = Order(order_id="STP", side=Side.SELL, kind=OrderKind.STOP,
                     quantity=100, stop_price=105, stop_kind=OrderKind.MARKET)
        book.submit(stop, clock=3)
        book.submit(limit("S1", Side.SELL, 108, 100), clock=4)
        book.submit(limit("B1", Side.BUY, 108, 100), clock=5)  # prints 108 > 105
        assert book.ledger("STP")[1] == 0
        assert "STP" in book.snapshot(visibility="omniscient").pending_stops

    def test_entry_side_validation(self):
        book = self.build()
        bad = Order(order_id="BAD", side=Side.BUY, kind=OrderKind.STOP,
                    quantity=100, stop_price=105, stop_kind=OrderKind.MARKET)
        result = book.submit(bad, clock=3)
        assert result.disposition is Disposition.REJECTED
        assert "buy stop below last trade" in result.reason

    def test_simultaneous_stops_fire_in_entry_order(self):
        book = self.build()
        book.submit(limit("BIDS", Side.BUY, 100, 150), clock=3)
        for i, oid in enumerate(["ST1", "ST2"]):
            book.submit(Order(order_id=oid, side=Side.SELL, kind=OrderKind.STOP,
                              quantity=100, stop_price=105, stop_kind=OrderKind.MARKET),
                        clock=4 + i)
        book.submit(limit("S1", Side.SELL, 105, 10), clock=6)
        book.submit(market("B1", Side.BUY, 10), clock=7)
        # only 150 shares of bids: ST1 (first in) filled, ST2 partially then dies
        assert book.ledger("ST1")[1] == 100
        assert book.ledger("ST2")[1] == 50


class TestMarketWithProtection:
    def test_converts_to_limit_off_last_trade(self):
        book = OrderBook()
        book.submit(limit("S0", Side.SELL, 50, 100), clock=1)
        book.submit(market("B0", Side.BUY, 100), clock=2)
        book.submit(limit("S1", Side.SELL, 51, 200), clock=3)
        book.submit(limit("S2", Side.SELL, 53, 200), clock=4)
        mwp = Order(order_id="MWP", side=Side.BUY, kind=OrderKind.MARKET_WITH_PROTECTION,
                    quantity=400, protection_offset=1)
        result = book.submit(mwp, clock=5)
        # limit = 50 + 1 = 51: fills 200@51, remainder rests at 51
        assert [(f.price, f.quantity) for f in result.fills] == [(51, 200)]
        assert result.disposition is Disposition.PARTIAL_RESTING
        assert book.remaining("MWP") == 200
        assert book.best_bid() == 51

    def test_requires_reference_price(self):
        book = OrderBook()
        book.submit(limit("S1", Side.SELL, 51, 100), clock=1)
        mwp = Order(order_id="MWP", side=Side.BUY, kind=OrderKind.MARKET_WITH_PROTECTION,
                    quantity=100, protection_offset=1)
        assert book.submit(mwp, clock=2).disposition is Disposition.REJECTED


class TestCancel:
    def test_cancel_resting(self):
        book = OrderBook()
        book.submit(limit("B1", Side.BUY, 49, 500), clock=1)
        assert book.cancel("B1") == 500
        assert "B1" not in book.order_ids()

    def test_cancel_after_partial_fill(self):
        book = OrderBook()
        book.submit(limit("B1", Side.BUY, 49, 500), clock=1)
        book.submit(limit("S1", Side.SELL, 49, 300), clock=2)
        assert book.cancel("B1") == 200

    def test_cancel_unknown_raises(self):
        book = OrderBook()
        with pytest.raises(UnknownOrderError):
            book.cancel("NOPE")


class TestRejections:
    def test_market_into_empty_book(self):
        book = OrderBook()
        result = book.submit(market("M", Side.BUY, 100), clock=1)
        assert result.disposition is Disposition.REJECTED
        assert "empty opposite side" in result.reason

    def test_nonpositive_quantity(self):
        book = OrderBook()
        assert book.submit(limit("Z", Side.BUY, 50, 0), clock=1).disposition \
            is Disposition.REJECTED

    def test_limit_without_price(self):
        book = OrderBook()
        bad = Order(order_id="L", side=Side.BUY, kind=OrderKind.LIMIT, quantity=10)
        assert book.submit(bad, clock=1).disposition is Disposition.REJECTED

    def test_display_larger_than_quantity(self):
        book = OrderBook()
        assert book.submit(limit("D", Side.BUY, 50, 10, display=20), clock=1).disposition \
            is Disposition.REJECTED


class TestEventLog:
    def test_fixed_column_lines(self):
        log = EventLog()
        book = OrderBook(log=log)
        book.submit(limit("S1", Side.SELL, 51, 1_000), clock=1)
        book.submit(market("B1", Side.BUY, 400), clock=2)
        book.cancel("S1")
        events = [line.split("|")[0] for line in log.lines]
        assert events == ["submit", "submit", "fill", "cancel"]
        fill_line = log.lines[2].split("|")
        assert fill_line[:6] == ["fill", "2", "B1", "buy", "51", "400"]
        assert "maker=S1" in fill_line[6]

    def test_expire_and_trigger_events(self):
        log = EventLog()
        book = OrderBook(log=log, session_close=100)
        book.submit(limit("D", Side.BUY, 49, 10, tif=Tif.DAY), clock=1)
        book.expire(100)
        assert any(line.startswith("expire|100|D|") for line in log.lines)
