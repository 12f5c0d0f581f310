"""Scenario runs, golden-fixture replays, and plot-data emission.

``run`` executes a scenario end to end (simulation, algorithm, TCA,
optimizer) and writes its artifact files: the echoed config, per-venue event
logs, the parent fill log, the TCA report, frontier tables and the cost
surface. Every artifact starts with a header line carrying the artifact
version and the scenario hash, so fixtures invalidate when formats change.
Runs are deterministic: the same scenario and seed produce byte-identical
files.

``replay_fixtures`` replays the packaged golden book fixtures (delimited
event-log scripts with expected fills and after-states) and reports the
first divergence per fixture.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from tradelab.cost_model import mi_rate, risk_rate, sample_cost_surface
from tradelab.exec_algos import ExecutionTrace, ExecutionWiring, run_algorithm
from tradelab.optimizer import frontier, frontier_to_delimited, objective
from tradelab.orderbook import (
    EventLog,
    Order,
    OrderBook,
    OrderKind,
    Side,
    Tif,
)
from tradelab.scenario import Scenario, ScenarioError, load_scenario
from tradelab.tca import ISReport, TCAInputs, expanded_tc, report_text
from tradelab.tactics import SlicePolicy, parse_tactics_config, slice_next
from tradelab.venue_sim import MarketSim


# ---------------------------------------------------------------------------
# fixture replay
# ---------------------------------------------------------------------------

@dataclass
class FixtureResult:
    name: str
    passed: bool
    diff: list = field(default_factory=list)


class FixtureFormatError(ValueError):
    pass


_KIND_MAP = {
    "market": OrderKind.MARKET,
    "limit": OrderKind.LIMIT,
    "market_with_protection": OrderKind.MARKET_WITH_PROTECTION,
    "stop": OrderKind.STOP,
}


def _parse_flags(text: str) -> dict:
    flags = {}
    if text:
        for part in text.split(","):
            key, _, value = part.partition("=")
            flags[key] = value
    return flags


def _parse_order_line(line: str) -> tuple[int, Order]:
    cols = line.split("|")
    if len(cols) != 7:
        raise FixtureFormatError(f"bad event line (want 7 columns): {line!r}")
    _, clock, oid, side, price, qty, flag_text = cols
    flags = _parse_flags(flag_text)
    kind = _KIND_MAP[flags.get("kind", "market" if price == "-" else "limit")]
    order = Order(
        order_id=oid,
        side=Side(side),
        kind=kind,
        quantity=int(qty),
        limit_price=None if price == "-" else int(price),
        display_quantity=int(flags["disp"]) if "disp" in flags else None,
        discretion_offset=int(flags.get("disc", 0)),
        stop_price=int(flags["stop"]) if "stop" in flags else None,
        stop_kind=_KIND_MAP[flags.get("as", "market")],
        protection_offset=int(flags["prot"]) if "prot" in flags else None,
        tif=Tif(flags.get("tif", "gtc")),
        tif_time=int(flags["tif_time"]) if "tif_time" in flags else None,
    )
    return int(clock), order


def _parse_slice_line(line: str) -> tuple[int, Order]:
    cols = line.split("|")
    if len(cols) != 7:
        raise FixtureFormatError(f"bad slice line (want 7 columns): {line!r}")
    _, clock, oid, side, price, _qty, flag_text = cols
    flags = _parse_flags(flag_text)
    policy = SlicePolicy(display=int(flags["display"]), randomize=True,
                         jitter=float(flags["jitter"]), seed=int(flags["seed"]))
    child = slice_next(parent_qty=int(flags["parent"]), side=Side(side),
                       price=int(price), fills_so_far=int(flags["filled"]),
                       children_emitted=int(flags["emitted"]), policy=policy)
    if child is None:
        raise FixtureFormatError(f"slice action produced no child: {line!r}")
    renamed = Order(oid, child.side, child.kind, child.quantity,
                    limit_price=child.limit_price)
    return int(clock), renamed


def _parse_fixture(text: str) -> dict:
    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    version_seen = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("version|"):
            version_seen = True
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
            continue
        if current is None:
            raise FixtureFormatError(f"line outside any section: {line!r}")
        sections[current].append(line)
    if not version_seen:
        raise FixtureFormatError("fixture missing version line")
    for required in ("setup", "action", "expect.fills", "expect.book"):
        if required not in sections:
            raise FixtureFormatError(f"fixture missing [{required}] section")
    return sections


def _flatten_book(book: OrderBook, visibility: str) -> list[str]:
    snap = book.snapshot(visibility=visibility)
    rows = []
    for side_name, levels in (("sell", snap.asks), ("buy", snap.bids)):
        for lvl in levels:
            for e in lvl.entries:
                vis = "hidden" if e.hidden else "visible"
                rows.append(f"book|{side_name}|{lvl.price}|{e.order_id}|{e.quantity}|{vis}")
    return rows


def _first_divergence(expected: list[str], actual: list[str], label: str) -> list[str]:
    for i, (exp, act) in enumerate(zip(expected, actual)):
        if exp != act:
            return [f"{label}[{i}] expected: {exp}", f"{label}[{i}] actual:   {act}"]
    if len(expected) != len(actual):
        i = min(len(expected), len(actual))
        exp = expected[i] if i < len(expected) else "<nothing>"
        act = actual[i] if i < len(actual) else "<nothing>"
        return [f"{label}[{i}] expected: {exp}", f"{label}[{i}] actual:   {act}"]
    return []


def replay_fixture_text(name: str, text: str) -> FixtureResult:
    try:
        sections = _parse_fixture(text)
    except FixtureFormatError as exc:
        return FixtureResult(name=name, passed=False, diff=[f"format: {exc}"])
    log = EventLog()
    book = OrderBook(log=log)
    for line in sections["setup"]:
        clock, order = _parse_order_line(line)
        book.submit(order, clock=clock)
    log_mark = len(log.lines)
    for line in sections["action"]:
        if line.startswith("slice|"):
            clock, order = _parse_slice_line(line)
        else:
            clock, order = _parse_order_line(line)
        book.submit(order, clock=clock)
    actual_fills = [l for l in log.lines[log_mark:] if l.startswith("fill|")]
    diff = _first_divergence(sections["expect.fills"], actual_fills, "fills")
    if not diff:
        diff = _first_divergence(sections["expect.book"],
                                 _flatten_book(book, "omniscient"), "book")
    if not diff and "expect.public" in sections:
        diff = _first_divergence(sections["expect.public"],
                                 _flatten_book(book, "public"), "public")
    if not diff and "expect.last_trade" in sections:
        expected = sections["expect.last_trade"][0]
        actual = f"last_trade|{book.last_trade_price}"
        diff = _first_divergence([expected], [actual], "last_trade")
    return FixtureResult(name=name, passed=not diff, diff=diff)


def replay_fixtures(directory: Optional[Path] = None) -> list[FixtureResult]:
    """Replay every ``*.fixture`` file; packaged goldens when no dir is given."""
    results = []
    if directory is not None:
        paths = sorted(Path(directory).glob("*.fixture"))
        for p in paths:
            results.append(replay_fixture_text(p.stem, p.read_text()))
        return results
    root = resources.files("tradelab").joinpath("fixtures")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".fixture"):
            results.append(replay_fixture_text(entry.name[:-8], entry.read_text()))
    return results


# ---------------------------------------------------------------------------
# scenario runs
# ---------------------------------------------------------------------------

@dataclass
class RunReport:
    scenario_name: str
    scenario_hash: str
    seed: int
    filled: int = 0
    residual: int = 0
    average_price: Optional[float] = None      # currency
    participation: Optional[float] = None
    arrival_price: Optional[float] = None      # currency
    final_price: Optional[float] = None        # currency
    decision_price: Optional[float] = None     # currency
    is_report: Optional[ISReport] = None
    fees: dict = field(default_factory=dict)
    frontier_files: list = field(default_factory=list)
    child_count: int = 0

    def to_dict(self) -> dict:
        out = {
            "scenario_name": self.scenario_name,
            "scenario_hash": self.scenario_hash,
            "seed": self.seed,
            "filled": self.filled,
            "residual": self.residual,
            "average_price": self.average_price,
            "participation": self.participation,
            "arrival_price": self.arrival_price,
            "final_price": self.final_price,
            "decision_price": self.decision_price,
            "fees": {k: self.fees[k] for k in sorted(self.fees)},
            "frontier_files": list(self.frontier_files),
            "child_count": self.child_count,
        }
        if self.is_report is not None:
            out["tca"] = {
                "execution_cost": self.is_report.execution_cost,
                "delay_cost": self.is_report.delay_cost,
                "trade_related_cost": self.is_report.trade_related_cost,
                "opportunity_cost": self.is_report.opportunity_cost,
                "fixed_cost": self.is_report.fixed_cost,
                "total": self.is_report.total,
                "unexecuted": self.is_report.unexecuted,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        flat: list[tuple[str, object]] = []

        def walk(prefix, value):
            if isinstance(value, dict):
                for k in sorted(value):
                    walk(f"{prefix}.{k}" if prefix else k, value[k])
            elif isinstance(value, list):
                flat.append((prefix, ";".join(str(v) for v in value)))
            else:
                flat.append((prefix, value))

        walk("", self.to_dict())
        lines = ["key,value"] + [f"{k},{v}" for k, v in flat]
        return "\n".join(lines) + "\n"


def _write(path: Path, header: str, body: str) -> None:
    path.write_text(header + body)


def _wiring_from_tactics(scenario: Scenario) -> ExecutionWiring:
    """Build the runner's tactic hooks from a scenario's [tactics] section."""
    parsed = parse_tactics_config(scenario.tactics, scenario.parent.side,
                                  scenario.parent.quantity)
    return ExecutionWiring(slice_policy=parsed.slice_policy,
                           route_weights=parsed.route_weights)


def run(scenario: Scenario, out_dir: Path,
        report_format: Optional[str] = None) -> RunReport:
    """Execute a scenario and emit its artifact files into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = scenario.header()
    fmt = report_format or scenario.report_format
    if fmt not in ("csv", "json"):
        raise ScenarioError(f"invalid report format {fmt!r}")
    _write(out / "scenario_echo.ini", header, scenario.echo())
    report = RunReport(scenario_name=scenario.name, scenario_hash=scenario.digest(),
                       seed=scenario.seed)

    trace: Optional[ExecutionTrace] = None
    if scenario.algo is not None:
        sim = MarketSim(scenario.market, venues=scenario.venues,
                        profile=scenario.profile)
        trace = run_algorithm(scenario.algo, scenario.parent, sim,
                              wiring=_wiring_from_tactics(scenario))
        _emit_trace_files(scenario, sim, trace, out, header, report, fmt)

    if scenario.optimizer is not None:
        report.frontier_files = run_frontier(scenario, out)

    body = report.to_json() if fmt == "json" else report.to_csv()
    _write(out / f"report.{fmt}", header, body)
    return report


def _emit_trace_files(scenario: Scenario, sim: MarketSim, trace: ExecutionTrace,
                      out: Path, header: str, report: RunReport, fmt: str) -> None:
    tick = scenario.tick_size
    for vid, book in sim.books.items():
        _write(out / f"events_{vid}.log", header, book.log.to_text())
    fill_lines = [f"{f.tick}|{f.price}|{f.quantity}" for f in trace.fills]
    _write(out / "fills.log", header, "\n".join(fill_lines) + ("\n" if fill_lines else ""))

    report.filled = trace.filled
    report.residual = trace.residual
    report.child_count = len(trace.children)
    report.participation = trace.participation
    avg_ticks = trace.average_price()
    report.average_price = None if avg_ticks is None else avg_ticks * tick
    report.arrival_price = (None if trace.arrival_price is None
                            else trace.arrival_price * tick)
    report.final_price = (None if trace.final_price is None
                          else trace.final_price * tick)
    report.fees = dict(trace.fees)

    decision = scenario.tca.decision_price
    if decision is None:
        decision = report.arrival_price   # mid at order arrival, the default benchmark
    report.decision_price = decision
    inputs = TCAInputs(
        side=scenario.parent.side.value,
        intended_qty=scenario.parent.quantity,
        fills=[(f.quantity, f.price * tick) for f in trace.fills],
        final_price=report.final_price,
        decision_price=decision,
        arrival_price=report.arrival_price,
        fixed=scenario.tca.fixed + sum(trace.fees.values()),
    )
    report.is_report = expanded_tc(inputs)
    _write(out / "tca_report.txt", header,
           report_text(report.is_report, side=scenario.parent.side.value))


def run_frontier(scenario: Scenario, out_dir: Path) -> list[str]:
    """Emit frontier tables (per benchmark) and the cost surface; returns filenames."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = scenario.header()
    opt = scenario.optimizer
    coeffs = scenario.coefficients()
    risk = scenario.risk
    benchmarks = (("arrival", "previous_close") if opt.benchmark == "both"
                  else (opt.benchmark,))
    written = []
    for benchmark in benchmarks:
        if opt.lambda_grid:
            points = frontier(opt.lambda_grid, coeffs, risk, benchmark=benchmark,
                              drift=opt.drift, alpha_min=opt.alpha_min,
                              alpha_max=opt.alpha_max)
        else:
            points = []
        name = f"frontier_{benchmark}.txt"
        _write(out / name, header, frontier_to_delimited(points))
        written.append(name)
    alphas = np.linspace(opt.alpha_min, opt.alpha_max, 400)
    rows = sample_cost_surface(coeffs, risk, alphas)
    surface = "alpha|mi|risk\n" + "".join(
        f"{a!r}|{m!r}|{r!r}\n" for a, m, r in rows)
    _write(out / "cost_surface.txt", header, surface)
    written.append("cost_surface.txt")
    return written


def emit_figures(scenario: Scenario, out_dir: Path) -> list[str]:
    """Plot-data files: the objective decomposition and both frontier tables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = scenario.header()
    opt = scenario.optimizer
    if opt is None or scenario.cost is None:
        raise ScenarioError("figures need [cost_model] and [optimizer] sections")
    coeffs = scenario.coefficients()
    risk = scenario.risk
    written = []

    grid = opt.lambda_grid
    lam = grid[len(grid) // 2] if grid else 0.0
    alphas = np.linspace(opt.alpha_min, opt.alpha_max, 400)
    lines = ["alpha|mi|lambda_r|objective"]
    for a in alphas:
        mi = mi_rate(float(a), coeffs)
        lr = lam * risk_rate(float(a), risk)
        lines.append(f"{float(a)!r}|{mi!r}|{lr!r}|{mi + lr!r}")
    _write(out / "fig1.txt", header, "\n".join(lines) + "\n")
    written.append("fig1.txt")

    for benchmark in ("arrival", "previous_close"):
        points = (frontier(grid, coeffs, risk, benchmark=benchmark, drift=opt.drift,
                           alpha_min=opt.alpha_min, alpha_max=opt.alpha_max)
                  if grid else [])
        name = f"fig2_{benchmark}.txt"
        _write(out / name, header, frontier_to_delimited(points))
        written.append(name)
    return written


def figures_for_run_dir(run_dir: Path, out_dir: Optional[Path] = None) -> list[str]:
    """Re-load the echoed scenario in a run directory and emit figure data."""
    echo = Path(run_dir) / "scenario_echo.ini"
    if not echo.exists():
        raise ScenarioError(f"no scenario_echo.ini in {run_dir}")
    scenario = load_scenario(echo)
    return emit_figures(scenario, Path(out_dir) if out_dir else Path(run_dir))
