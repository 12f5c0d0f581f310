"""Transaction-cost analysis: benchmarks, the relative performance measure,
and the implementation-shortfall decomposition on a simulated execution.

Run:  python demos/06_tca_reports.py
"""

from tradelab.exec_algos import AlgoSpec, ParentOrder, run_algorithm
from tradelab.orderbook import Side
from tradelab.tca import (
    TapeTrade,
    TCAInputs,
    expanded_tc,
    ohlc,
    paper_vs_real,
    report_text,
    rpm,
    shortfall,
    twap,
    vwap,
)
from tradelab.venue_sim import MarketParams, MarketSim, u_shape_profile

print("== benchmark prices on a toy tape ==")
tape = [TapeTrade(price=p, size=v) for p, v in
        ((50, 300), (51, 100), (54, 100), (52, 200), (49, 150))]
print(f"vwap {vwap(tape):.3f}   twap {twap(tape):.3f} (size-blind)   "
      f"ohlc {ohlc(50, 54, 49, 52):.3f}")
print(f"RPM of a buy done at 50: {rpm(tape, 50, 'buy'):.0%} of volume traded "
      f"at less favorable prices")

print("\n== the worked shortfall decomposition ==")
inputs = TCAInputs(side="buy", intended_qty=1_000, fills=[(600, 50.5)],
                   final_price=51.0, decision_price=50.0, arrival_price=50.2)
r = expanded_tc(inputs)
print(report_text(r, side="buy", label="worked-example"))
paper, real, is_total = paper_vs_real(
    TCAInputs(side="buy", intended_qty=1_000, fills=[(1_000, 50.5)],
              final_price=51.0, decision_price=50.0))
print(f"paper-vs-real cross-check on the fully executed variant: "
      f"paper {paper:.0f} real {real:.0f} shortfall {is_total:.0f}")

print("== TCA on a live simulated TWAP run ==")
sim = MarketSim(MarketParams(initial_price=50.0, volatility=0.2, adv=1_000_000,
                             seed=21, session_ticks=5_850, intensity=1.0),
                profile=u_shape_profile(13))
parent = ParentOrder(side=Side.BUY, quantity=13_000, start=0, end=5_850)
trace = run_algorithm(AlgoSpec(type="twap", bucket_ticks=450), parent, sim)
run_inputs = TCAInputs(
    side="buy", intended_qty=parent.quantity,
    fills=[(f.quantity, float(f.price)) for f in trace.fills],
    final_price=trace.final_price, decision_price=None,
    arrival_price=trace.arrival_price)
print(f"filled {trace.filled:,} at average {trace.average_price():.3f}; "
      f"arrival mid was {trace.arrival_price:.2f}")
print(report_text(expanded_tc(run_inputs), side="buy", label="twap-run"))
