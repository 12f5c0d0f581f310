"""TWAP, VWAP and POV against the simulated market.

The classic schedule: 10,000 shares as 500 every 15 minutes for five hours,
then the same parent with a tilt accelerating after 30% completion, a
volume-profile-weighted variant, and a 10% participation run.

Run:  python demos/03_execution_algorithms.py
"""

from tradelab.exec_algos import (
    AlgoSpec,
    ParentOrder,
    TiltPolicy,
    run_algorithm,
    twap_schedule,
    vwap_schedule,
)
from tradelab.orderbook import Side
from tradelab.venue_sim import MarketParams, MarketSim, u_shape_profile

FULL_DAY = 23_400     # one tick per second, 6.5 hours

parent = ParentOrder(side=Side.BUY, quantity=10_000, start=0, end=18_000)

print("== TWAP: 500 shares every 15 minutes for 5 hours ==")
sched = twap_schedule(parent, bucket_ticks=900)
print(f"  {len(sched)} buckets, sizes {sorted(set(sched.targets))}")

print("\n== tilted TWAP: twice as fast after 30% done ==")
tilted = twap_schedule(parent, bucket_ticks=900,
                       tilt=TiltPolicy(threshold=0.3, factor=2.0))
print(f"  targets: {list(tilted.targets)}")
print(f"  total still {tilted.total}")

print("\n== VWAP weights follow the intraday profile ==")
vsched = vwap_schedule(parent, u_shape_profile(13))
print(f"  targets: {list(vsched.targets)} (sum {vsched.total})")

print("\n== live runs against a quarter-day simulated session ==")


def fresh_sim(seed):
    return MarketSim(MarketParams(initial_price=50.0, volatility=0.15,
                                  adv=1_000_000, seed=seed, session_ticks=5_850,
                                  intensity=1.0), profile=u_shape_profile(13))


p = ParentOrder(side=Side.BUY, quantity=13_000, start=0, end=5_850)
trace = run_algorithm(AlgoSpec(type="twap", bucket_ticks=450), p, fresh_sim(3))
print(f"TWAP : filled {trace.filled:,}/{p.quantity:,} "
      f"avg px {trace.average_price():.2f} participation {trace.participation:.1%}")

trace = run_algorithm(AlgoSpec(type="vwap"), p, fresh_sim(3))
print(f"VWAP : filled {trace.filled:,}/{p.quantity:,} "
      f"avg px {trace.average_price():.2f}")

big = ParentOrder(side=Side.BUY, quantity=500_000, start=0, end=5_850)
trace = run_algorithm(AlgoSpec(type="pov", pr=0.1, bucket_ticks=450), big, fresh_sim(3))
print(f"POV  : filled {trace.filled:,} at participation {trace.participation:.2%} "
      f"(target 10.00%)")

trace = run_algorithm(AlgoSpec(type="pov-adaptive", pr=0.1, sensitivity=50.0,
                               bucket_ticks=450), big, fresh_sim(3))
print(f"POV-adaptive: filled {trace.filled:,} "
      f"participation {trace.participation:.2%} (backs off when price runs)")
