"""Impact vs timing risk: the cost surfaces, the optimal trading rate for a
given risk aversion, and the efficient trading frontier for two benchmarks.

Writes frontier_demo.png when matplotlib is available.

Run:  python demos/05_cost_and_frontier.py
"""

import numpy as np

from tradelab.cost_model import (
    ImpactParams,
    RateCoefficients,
    RiskParams,
    mi_rate,
    risk_rate,
)
from tradelab.optimizer import frontier, objective, solve_constrained, solve_rate

# non-normative demo calibration: 100k shares, 10% of ADV, 25% vol stock at 50
params = ImpactParams(scale=0.5, size_exponent=0.5, vol_exponent=0.75,
                      temp_fraction=0.8, adv=1_000_000, sigma=0.25, price=50.0,
                      order_size=100_000)
coeffs = RateCoefficients.from_params(params)
risk = RiskParams(price=50.0, order_size=100_000, sigma=0.25, horizon_fraction=0.1)

print(f"whole-order impact: {coeffs.total_impact:,.0f} "
      f"(temporary coeff {coeffs.temp_coeff:.4f}, permanent {coeffs.perm_coeff:.4f})")

print("\nimpact rises and risk falls with the trading rate:")
for alpha in (0.01, 0.05, 0.2, 0.5, 1.0):
    print(f"  rate {alpha:4.2f}: impact/share {mi_rate(alpha, coeffs):8.4f}   "
          f"timing risk {risk_rate(alpha, risk):12,.0f}")

lam = 2e-6
best = solve_rate(lam, coeffs, risk)
print(f"\nrisk aversion {lam:g}: optimal rate {best:.4f} "
      f"(objective {objective(best, lam, coeffs, risk):,.2f})")
for alpha in (best / 2, best * 2):
    print(f"  off-optimal rate {alpha:.4f}: "
          f"objective {objective(alpha, lam, coeffs, risk):,.2f} (worse)")

cap = 2.0 * risk.price * risk.order_size * risk.sigma
capped = solve_constrained(cap, coeffs, risk)
print(f"\nrisk cap {cap:,.0f}: slowest compliant rate {capped:.4f} "
      f"(risk there {risk_rate(capped, risk):,.0f})")

print("\nefficient trading frontier (every point is a lambda-optimal strategy):")
grid = np.geomspace(1e-7, 2e-5, 9)
arrival = frontier(grid, coeffs, risk, benchmark="arrival")
close = frontier(grid, coeffs, risk, benchmark="previous_close", drift=0.05)
print(f"  {'lambda':>10} {'rate':>8} {'cost(arr)':>10} {'cost(close)':>11} {'risk':>14}")
for a, c in zip(arrival, close):
    print(f"  {a.risk_aversion:10.2e} {a.alpha_star:8.4f} {a.cost:10.4f} "
          f"{c.cost:11.4f} {a.risk:14,.0f}")
print("previous-close cost = arrival cost + permanent impact + decision drift")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    dense = frontier(np.geomspace(1e-7, 2e-5, 200), coeffs, risk)
    dense_close = frontier(np.geomspace(1e-7, 2e-5, 200), coeffs, risk,
                           benchmark="previous_close", drift=0.05)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot([p.risk for p in dense], [p.cost for p in dense],
            label="arrival benchmark")
    ax.plot([p.risk for p in dense_close], [p.cost for p in dense_close],
            linestyle="--", label="previous close benchmark")
    ax.set_xlabel("timing risk")
    ax.set_ylabel("expected cost")
    ax.set_title("efficient trading frontier")
    ax.legend()
    fig.tight_layout()
    fig.savefig("frontier_demo.png", dpi=120)
    print("\nwrote frontier_demo.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the plot)")
