"""Scenario configuration: a sectioned key/value file describing a full run.

The file format is INI (configparser): sections ``[scenario]``, ``[market]``,
one ``[venue:<id>]`` per venue, ``[parent]``, ``[algo]``, ``[tactics]``,
``[cost_model]``, ``[optimizer]`` and ``[tca]``. Only ``[scenario]`` with a
``seed`` is mandatory; a file with just cost/optimizer sections describes a
frontier-only scenario (no simulation). ``load_scenario`` materializes every
default explicitly, so the echo-back is a complete, reproducible description
whose hash identifies the run.

Prices in the file are in currency; they convert to integer ticks through
``market.tick_size`` wherever they meet the book.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field
from typing import Optional

from tradelab.cost_model import ImpactParams, RateCoefficients, RiskParams
from tradelab.exec_algos import AlgoSpec, ParentOrder, TiltPolicy
from tradelab.orderbook import Side
from tradelab.venue_sim import MarketParams, VenueConfig, VolumeProfile, u_shape_profile

ARTIFACT_VERSION = "1"


class ScenarioError(ValueError):
    """Config parse or validation failure; message names the offending field."""


@dataclass
class TCAConfig:
    decision_price: Optional[float] = None   # currency; None -> arrival mid
    fixed: float = 0.0


@dataclass
class OptimizerConfig:
    lambda_grid: tuple
    alpha_min: float = 1e-4
    alpha_max: float = 1.0
    benchmark: str = "both"      # arrival | previous_close | both
    drift: float = 0.0


@dataclass
class Scenario:
    seed: int
    name: str = "scenario"
    report_format: str = "csv"
    market: Optional[MarketParams] = None
    profile: Optional[VolumeProfile] = None
    profile_spec: str = "u13"
    venues: list = field(default_factory=list)
    parent: Optional[ParentOrder] = None
    algo: Optional[AlgoSpec] = None
    tactics: dict = field(default_factory=dict)
    cost: Optional[ImpactParams] = None
    risk: Optional[RiskParams] = None
    optimizer: Optional[OptimizerConfig] = None
    tca: TCAConfig = field(default_factory=TCAConfig)

    @property
    def tick_size(self) -> float:
        return self.market.tick_size if self.market is not None else 1.0

    def coefficients(self) -> RateCoefficients:
        if self.cost is None:
            raise ScenarioError("scenario has no [cost_model] section")
        return RateCoefficients.from_params(self.cost)

    def echo(self) -> str:
        """Fully materialized config text: every default made explicit."""
        out = configparser.ConfigParser()
        out["scenario"] = {"seed": str(self.seed), "name": self.name,
                           "format": self.report_format}
        if self.market is not None:
            m = self.market
            out["market"] = {
                "initial_price": repr(m.initial_price), "tick_size": repr(m.tick_size),
                "volatility": repr(m.volatility), "adv": repr(m.adv),
                "session_ticks": str(m.session_ticks), "intensity": repr(m.intensity),
                "profile": self.profile_spec,
                "market_order_fraction": repr(m.market_order_fraction),
                "maker_size_mult": repr(m.maker_size_mult),
                "limit_ttl": str(m.limit_ttl),
                "max_quote_offset": str(m.max_quote_offset),
                "cancel_prob": repr(m.cancel_prob),
            }
        for v in self.venues:
            out[f"venue:{v.venue_id}"] = {
                "maker_fee": repr(v.maker_fee), "taker_fee": repr(v.taker_fee),
                "latency": str(v.latency),
                "supports_hidden": str(v.supports_hidden).lower(),
                "supports_iceberg": str(v.supports_iceberg).lower(),
            }
        if self.parent is not None:
            p = self.parent
            section = {"side": p.side.value, "quantity": str(p.quantity),
                       "start": str(p.start), "end": str(p.end),
                       "benchmark": p.benchmark}
            if p.price_limit is not None:
                section["price_limit_ticks"] = str(p.price_limit)
            out["parent"] = section
        if self.algo is not None:
            a = self.algo
            tilt = a.tilt or TiltPolicy()
            section = {"type": a.type, "bucket_ticks": str(a.bucket_ticks),
                       "pr": repr(a.pr), "tilt_threshold": repr(tilt.threshold),
                       "tilt_factor": repr(tilt.factor), "tilt_jitter": repr(tilt.jitter),
                       "tilt_seed": str(tilt.seed), "sensitivity": repr(a.sensitivity),
                       "pr_max": repr(a.pr_max)}
            if a.max_child is not None:
                section["max_child"] = str(a.max_child)
            if a.price_limit is not None:
                section["price_limit_ticks"] = str(a.price_limit)
            if a.window_ticks is not None:
                section["window_ticks"] = str(a.window_ticks)
            out["algo"] = section
        if self.tactics:
            out["tactics"] = {k: str(v) for k, v in sorted(self.tactics.items())}
        if self.cost is not None:
            c = self.cost
            out["cost_model"] = {
                "a1": repr(c.scale), "a2": repr(c.size_exponent),
                "a3": repr(c.vol_exponent), "b1": repr(c.temp_fraction),
                "adv": repr(c.adv), "sigma": repr(c.sigma), "price": repr(c.price),
                "order_size": repr(c.order_size),
                "horizon_fraction": repr(self.risk.horizon_fraction),
            }
        if self.optimizer is not None:
            o = self.optimizer
            out["optimizer"] = {
                "lambda_grid": ",".join(repr(x) for x in o.lambda_grid),
                "alpha_min": repr(o.alpha_min), "alpha_max": repr(o.alpha_max),
                "benchmark": o.benchmark, "drift": repr(o.drift),
            }
        tca_section = {"fixed": repr(self.tca.fixed)}
        if self.tca.decision_price is not None:
            tca_section["decision_price"] = repr(self.tca.decision_price)
        out["tca"] = tca_section
        buf = io.StringIO()
        out.write(buf)
        return buf.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(self.echo().encode()).hexdigest()[:12]

    def header(self) -> str:
        return f"# tradelab-artifact v{ARTIFACT_VERSION} scenario={self.digest()}\n"


def _get(parser, section, key, conv, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            raise ScenarioError(f"missing required field [{section}].{key}")
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid value for [{section}].{key}: {raw!r} ({exc})")


def _bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_profile(spec: str) -> VolumeProfile:
    text = spec.strip().lower()
    if text.startswith("u") and text[1:].isdigit():
        return u_shape_profile(int(text[1:]))
    if text.startswith("uniform") and text[7:].isdigit():
        return VolumeProfile.uniform(int(text[7:]))
    fractions = tuple(float(x) for x in text.split(","))
    return VolumeProfile(fractions)


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file; all defaults come back explicit."""
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ScenarioError(f"parse error in {path}: {exc}")
    if not read:
        raise ScenarioError(f"scenario file not found: {path}")
    if not parser.has_section("scenario"):
        raise ScenarioError("missing required section [scenario]")
    seed = _get(parser, "scenario", "seed", int, required=True)
    scenario = Scenario(
        seed=seed,
        name=_get(parser, "scenario", "name", str, default="scenario"),
        report_format=_get(parser, "scenario", "format", str, default="csv"),
    )
    if scenario.report_format not in ("csv", "json"):
        raise ScenarioError(
            f"invalid value for [scenario].format: {scenario.report_format!r}")

    if parser.has_section("market"):
        profile_spec = _get(parser, "market", "profile", str, default="u13")
        try:
            scenario.profile = _parse_profile(profile_spec)
        except ValueError as exc:
            raise ScenarioError(f"invalid value for [market].profile: {exc}")
        scenario.profile_spec = profile_spec
        scenario.market = MarketParams(
            initial_price=_get(parser, "market", "initial_price", float, required=True),
            volatility=_get(parser, "market", "volatility", float, default=0.25),
            adv=_get(parser, "market", "adv", float, required=True),
            seed=seed,
            session_ticks=_get(parser, "market", "session_ticks", int, default=23_400),
            intensity=_get(parser, "market", "intensity", float, default=1.0),
            tick_size=_get(parser, "market", "tick_size", float, default=1.0),
            market_order_fraction=_get(parser, "market", "market_order_fraction",
                                       float, default=0.25),
            maker_size_mult=_get(parser, "market", "maker_size_mult", float, default=2.0),
            limit_ttl=_get(parser, "market", "limit_ttl", int, default=600),
            max_quote_offset=_get(parser, "market", "max_quote_offset", int, default=5),
            cancel_prob=_get(parser, "market", "cancel_prob", float, default=0.01),
        )

    for section in parser.sections():
        if not section.startswith("venue:"):
            continue
        vid = section.split(":", 1)[1]
        if not vid:
            raise ScenarioError(f"venue section with empty id: [{section}]")
        scenario.venues.append(VenueConfig(
            venue_id=vid,
            maker_fee=_get(parser, section, "maker_fee", float, default=0.0),
            taker_fee=_get(parser, section, "taker_fee", float, default=0.0),
            latency=_get(parser, section, "latency", int, default=0),
            supports_hidden=_get(parser, section, "supports_hidden", _bool, default=True),
            supports_iceberg=_get(parser, section, "supports_iceberg", _bool,
                                  default=True),
        ))

    if parser.has_section("parent"):
        side_text = _get(parser, "parent", "side", str, required=True)
        if side_text not in ("buy", "sell"):
            raise ScenarioError(f"invalid value for [parent].side: {side_text!r}")
        try:
            scenario.parent = ParentOrder(
                side=Side(side_text),
                quantity=_get(parser, "parent", "quantity", int, required=True),
                start=_get(parser, "parent", "start", int, default=0),
                end=_get(parser, "parent", "end", int, required=True),
                price_limit=_get(parser, "parent", "price_limit_ticks", int),
                benchmark=_get(parser, "parent", "benchmark", str, default="arrival"),
            )
        except ValueError as exc:
            raise ScenarioError(f"invalid [parent] section: {exc}")

    if parser.has_section("algo"):
        algo_type = _get(parser, "algo", "type", str, required=True)
        tilt = TiltPolicy(
            threshold=_get(parser, "algo", "tilt_threshold", float, default=1.0),
            factor=_get(parser, "algo", "tilt_factor", float, default=1.0),
            jitter=_get(parser, "algo", "tilt_jitter", float, default=0.0),
            seed=_get(parser, "algo", "tilt_seed", int, default=seed),
        )
        try:
            scenario.algo = AlgoSpec(
                type=algo_type,
                bucket_ticks=_get(parser, "algo", "bucket_ticks", int, default=450),
                pr=_get(parser, "algo", "pr", float, default=0.1),
                tilt=tilt,
                max_child=_get(parser, "algo", "max_child", int),
                price_limit=_get(parser, "algo", "price_limit_ticks", int),
                window_ticks=_get(parser, "algo", "window_ticks", int),
                sensitivity=_get(parser, "algo", "sensitivity", float, default=0.0),
                pr_max=_get(parser, "algo", "pr_max", float, default=0.95),
                both_sides_volume=_get(parser, "algo", "both_sides_volume", _bool,
                                       default=True),
            )
        except ValueError as exc:
            raise ScenarioError(f"invalid value for [algo].type: {exc}")

    if parser.has_section("tactics"):
        scenario.tactics = dict(parser.items("tactics"))

    if parser.has_section("cost_model"):
        horizon_fraction = _get(parser, "cost_model", "horizon_fraction", float,
                                default=0.1)
        scenario.cost = ImpactParams(
            scale=_get(parser, "cost_model", "a1", float, default=0.5),
            size_exponent=_get(parser, "cost_model", "a2", float, default=0.5),
            vol_exponent=_get(parser, "cost_model", "a3", float, default=0.75),
            temp_fraction=_get(parser, "cost_model", "b1", float, default=0.8),
            adv=_get(parser, "cost_model", "adv", float,
                     default=scenario.market.adv if scenario.market else 1e6),
            sigma=_get(parser, "cost_model", "sigma", float,
                       default=scenario.market.volatility if scenario.market else 0.25),
            price=_get(parser, "cost_model", "price", float,
                       default=(scenario.market.initial_price
                                if scenario.market else 50.0)),
            order_size=_get(parser, "cost_model", "order_size", float, required=True),
        )
        scenario.risk = RiskParams(
            price=scenario.cost.price, order_size=scenario.cost.order_size,
            sigma=scenario.cost.sigma, horizon_fraction=horizon_fraction)
        try:
            scenario.cost.validate()
        except ValueError as exc:
            raise ScenarioError(f"invalid [cost_model] section: {exc}")

    if parser.has_section("optimizer"):
        if parser.has_option("optimizer", "lambda_grid"):
            raw_grid = parser.get("optimizer", "lambda_grid").strip()
            grid = (tuple(float(x) for x in raw_grid.split(","))
                    if raw_grid else ())
        else:
            lo = _get(parser, "optimizer", "lambda_min", float, default=1e-8)
            hi = _get(parser, "optimizer", "lambda_max", float, default=1e-2)
            n = _get(parser, "optimizer", "lambda_points", int, default=50)
            if lo <= 0 or hi <= lo or n < 1:
                raise ScenarioError("invalid [optimizer] lambda range")
            if n == 1:
                grid = (lo,)
            else:
                ratio = (hi / lo) ** (1.0 / (n - 1))
                grid = tuple(lo * ratio ** i for i in range(n))
        benchmark = _get(parser, "optimizer", "benchmark", str, default="both")
        if benchmark not in ("arrival", "previous_close", "both"):
            raise ScenarioError(
                f"invalid value for [optimizer].benchmark: {benchmark!r}")
        scenario.optimizer = OptimizerConfig(
            lambda_grid=grid,
            alpha_min=_get(parser, "optimizer", "alpha_min", float, default=1e-4),
            alpha_max=_get(parser, "optimizer", "alpha_max", float, default=1.0),
            benchmark=benchmark,
            drift=_get(parser, "optimizer", "drift", float, default=0.0),
        )
        if scenario.cost is None:
            raise ScenarioError("[optimizer] requires a [cost_model] section")

    if parser.has_section("tca"):
        scenario.tca = TCAConfig(
            decision_price=_get(parser, "tca", "decision_price", float),
            fixed=_get(parser, "tca", "fixed", float, default=0.0),
        )

    _validate(scenario)
    return scenario


def _validate(scenario: Scenario) -> None:
    if scenario.algo is not None:
        if scenario.market is None:
            raise ScenarioError("[algo] requires a [market] section")
        if not scenario.venues:
            raise ScenarioError("[algo] requires at least one [venue:<id>] section")
        if scenario.parent is None:
            raise ScenarioError("[algo] requires a [parent] section")
        if scenario.parent.end > scenario.market.session_ticks:
            raise ScenarioError("[parent].end runs past [market].session_ticks")
    if (scenario.algo is None and scenario.optimizer is None
            and scenario.market is None):
        raise ScenarioError("scenario describes nothing to run "
                            "(no [algo], no [optimizer], no [market])")
