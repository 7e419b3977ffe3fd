"""Scenario control: load a config, sweep gateway counts and strategies,
evaluate KPIs, and emit comparison tables plus all per-run datasets.

For every master seed the two strategies consume the same per-device traffic
substreams, so a paired energy difference is attributable to placement alone.
"""

from __future__ import annotations

import dataclasses
import json
import operator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, EmptySweep, HydroLoraError, PredicateError, ScenarioError
from .graph import build_adjacency, centrality_csv, degree_centrality, graph_stats
from .hydraulics import flow_proxy, ingest_hydraulic_csv, placement_weights
from .inp import read_inp
from .lora import EnergyModel, PropagationModel, RadioConfig
from .placement import STRATEGIES, GatewaySet, export_gateways_csv, place
from .sim import SimulationResult, TrafficModel, export_wireless_csv, simulate


@dataclass
class ScenarioConfig:
    """Everything one sweep needs; JSON document mirrors these fields.

    Nested objects (radio, energy, propagation, traffic) are given in JSON as
    partial dicts overriding the defaults, e.g. ``{"radio": {"payload_bytes":
    51}}``.  Unspecified fields keep the documented defaults.
    """

    inp_path: str
    name: str = "scenario"
    output_dir: str = "out"
    hydraulic_node_csv: str | None = None
    hydraulic_link_csv: str | None = None
    alpha: float = 0.5
    coordinate_scale: float = 1.0
    gateway_counts: tuple[int, ...] = (77, 96, 117, 140, 165)
    strategies: tuple[str, ...] = ("regular_grid", "degree_centrality")
    seeds: tuple[int, ...] = (0,)
    horizon_s: float = 86_400.0
    radio: RadioConfig = field(default_factory=RadioConfig)
    energy: EnergyModel = field(default_factory=EnergyModel)
    propagation: PropagationModel = field(default_factory=PropagationModel)
    traffic: TrafficModel = field(default_factory=TrafficModel)
    snap_gateways_to_nodes: bool = False
    greedy_radius_m: float = 1000.0
    flow_proxy_by_length: bool = False
    write_artifacts: bool = True

    def __post_init__(self):
        self.gateway_counts = tuple(int(k) for k in self.gateway_counts)
        self.strategies = tuple(self.strategies)
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.gateway_counts:
            raise ConfigError("gateway_counts must not be empty")
        if any(k <= 0 for k in self.gateway_counts):
            raise ConfigError("gateway counts must be positive")
        if any(b <= a for a, b in zip(self.gateway_counts, self.gateway_counts[1:])):
            raise ConfigError("gateway counts must be strictly increasing")
        if not self.seeds:
            raise ConfigError("at least one seed required")
        if not self.strategies:
            raise ConfigError("at least one strategy required")
        for strategy in self.strategies:
            if strategy not in STRATEGIES:
                raise ConfigError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.horizon_s < 0:
            raise ConfigError("horizon_s must be nonnegative")
        if (self.hydraulic_node_csv is None) != (self.hydraulic_link_csv is None):
            raise ConfigError("hydraulic CSVs must be given as a node/link pair")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        try:
            radio = _nested(RadioConfig(), data.pop("radio", None), _coerce_radio)
            energy = _nested(EnergyModel(), data.pop("energy", None), _coerce_energy)
            propagation = _nested(PropagationModel(), data.pop("propagation", None))
            traffic = _nested(TrafficModel(), data.pop("traffic", None))
            return cls(radio=radio, energy=energy, propagation=propagation, traffic=traffic, **data)
        except TypeError as exc:
            raise ConfigError(f"bad scenario config: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"bad scenario config: {exc}") from None

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))


def _nested(defaults, overrides, coerce=None):
    if not overrides:
        return defaults
    if coerce is not None:
        overrides = coerce(overrides)
    return dataclasses.replace(defaults, **overrides)


def _coerce_radio(overrides: dict) -> dict:
    overrides = dict(overrides)
    if "channels_hz" in overrides:
        overrides["channels_hz"] = tuple(int(c) for c in overrides["channels_hz"])
    for table in ("sensitivity_dbm", "required_snr_db"):
        if table in overrides:
            overrides[table] = {int(k): float(v) for k, v in overrides[table].items()}
    return overrides


def _coerce_energy(overrides: dict) -> dict:
    overrides = dict(overrides)
    if "tx_current_a" in overrides:
        overrides["tx_current_a"] = {float(k): float(v) for k, v in overrides["tx_current_a"].items()}
    return overrides


@dataclass(frozen=True)
class RunSummary:
    """Totals of one (K, strategy, seed) simulation."""

    k: int
    strategy: str
    seed: int
    energy_j: float
    pdr: float
    mean_sf: float
    sent: int
    delivered: int
    lost_no_coverage: int
    lost_collision: int


@dataclass(frozen=True)
class ComparisonRow:
    """Per-(K, strategy) aggregate over seeds."""

    k: int
    strategy: str
    energy_j_mean: float
    energy_j_std: float
    pdr: float
    mean_sf: float


@dataclass
class ComparisonTable:
    rows: list[ComparisonRow]

    def sorted_rows(self) -> list[ComparisonRow]:
        return sorted(self.rows, key=lambda r: (r.k, r.strategy))

    def row(self, k: int, strategy: str) -> ComparisonRow:
        for row in self.rows:
            if row.k == k and row.strategy == strategy:
                return row
        raise KeyError((k, strategy))

    def pivot_text(self) -> str:
        """One line per K, strategies side by side (mean energy in joules)."""
        strategies = sorted({row.strategy for row in self.rows})
        header = ["K".ljust(6)] + [f"{s} [J]".ljust(24) for s in strategies]
        lines = ["".join(header).rstrip()]
        for k in sorted({row.k for row in self.rows}):
            cells = [str(k).ljust(6)]
            for strategy in strategies:
                try:
                    cells.append(f"{self.row(k, strategy).energy_j_mean:.1f}".ljust(24))
                except KeyError:
                    cells.append("-".ljust(24))
            lines.append("".join(cells).rstrip())
        return "\n".join(lines) + "\n"


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    table: ComparisonTable
    runs: list[RunSummary]
    outdir: Path | None


class _Prepared:
    """Network-derived state shared by every run of a scenario."""

    def __init__(self, cfg: ScenarioConfig):
        self.net = read_inp(cfg.inp_path, coordinate_scale=cfg.coordinate_scale)
        self.adj = build_adjacency(self.net)
        self.stats = graph_stats(self.adj)
        self.cv = degree_centrality(self.adj)
        if cfg.hydraulic_node_csv is not None:
            series = ingest_hydraulic_csv(cfg.hydraulic_node_csv, cfg.hydraulic_link_csv, self.net)
            flows = series.node_flow
            self.flow_warnings: list[str] = []
        else:
            proxy = flow_proxy(self.net, self.adj, weight_by_length=cfg.flow_proxy_by_length)
            flows = proxy.values
            self.flow_warnings = [f"unreachable demand at {i}" for i in proxy.unreachable]
        self.flows = flows
        self.fw = placement_weights(self.cv, flows, alpha=cfg.alpha)

    def place(self, cfg: ScenarioConfig, strategy: str, k: int) -> GatewaySet:
        return place(
            strategy, k,
            bbox=self.net.bbox,
            node_xy=self.net.coordinates(),
            weights=self.fw.weight,
            seed=0,  # placement strategies are deterministic; recorded for provenance
            snap_to_nodes=cfg.snap_gateways_to_nodes,
            radius_m=cfg.greedy_radius_m,
        )


def _summarize(result: SimulationResult, k: int, strategy: str, seed: int) -> RunSummary:
    f = result.features
    return RunSummary(
        k=k, strategy=strategy, seed=seed,
        energy_j=result.energy.total_j, pdr=f.pdr, mean_sf=f.mean_sf,
        sent=f.sent, delivered=f.delivered,
        lost_no_coverage=f.lost_no_coverage, lost_collision=f.lost_collision,
    )


def _aggregate(per_seed: list[RunSummary]) -> ComparisonRow:
    energies = np.array([run.energy_j for run in per_seed])
    return ComparisonRow(
        k=per_seed[0].k, strategy=per_seed[0].strategy,
        energy_j_mean=float(energies.mean()),
        energy_j_std=float(energies.std()),  # ddof=0: well defined for one seed
        pdr=float(np.mean([run.pdr for run in per_seed])),
        mean_sf=float(np.mean([run.mean_sf for run in per_seed])),
    )


def _run_combo(prepared: _Prepared, cfg: ScenarioConfig, k: int, strategy: str,
               outdir: Path | None) -> tuple[ComparisonRow, list[RunSummary]]:
    try:
        gateways = prepared.place(cfg, strategy, k)
    except HydroLoraError as exc:
        raise ScenarioError(f"(K={k}, strategy={strategy}) {type(exc).__name__}: {exc}") from exc
    if outdir is not None:
        export_gateways_csv(gateways, outdir / f"gateways_k{k}_{strategy}.csv")
    per_seed = []
    for seed in cfg.seeds:
        try:
            result = simulate(
                prepared.net, gateways, cfg.radio, cfg.energy,
                horizon_s=cfg.horizon_s, seed=seed,
                propagation=cfg.propagation, traffic=cfg.traffic,
            )
        except HydroLoraError as exc:
            raise ScenarioError(f"(K={k}, strategy={strategy}, seed={seed}) "
                                f"{type(exc).__name__}: {exc}") from exc
        per_seed.append(_summarize(result, k, strategy, seed))
        if outdir is not None:
            export_wireless_csv(result, outdir / f"run_k{k}_{strategy}_seed{seed}")
    return _aggregate(per_seed), per_seed


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Full pipeline: parse, weight, then sweep (K, strategy, seed) runs.

    Writes every intermediate dataset under ``<output_dir>/<name>/`` unless
    ``write_artifacts`` is off.  Reruns with an identical config reproduce
    every output file byte for byte.
    """
    prepared = _Prepared(cfg)
    outdir = None
    if cfg.write_artifacts:
        outdir = Path(cfg.output_dir) / cfg.name
        outdir.mkdir(parents=True, exist_ok=True)
        summary = prepared.net.summary()
        summary["graph"] = prepared.stats.as_dict()
        summary["flow_warnings"] = prepared.flow_warnings
        (outdir / "network_summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        with open(outdir / "centrality.csv", "w", encoding="utf-8", newline="") as handle:
            centrality_csv(prepared.cv, handle)
        _write_weights_csv(prepared, outdir / "weights.csv")

    rows: list[ComparisonRow] = []
    runs: list[RunSummary] = []
    for k in cfg.gateway_counts:
        for strategy in cfg.strategies:
            row, per_seed = _run_combo(prepared, cfg, k, strategy, outdir)
            rows.append(row)
            runs.extend(per_seed)

    table = ComparisonTable(rows)
    if outdir is not None:
        export_comparison(table, outdir)
    return ScenarioResult(config=cfg, table=table, runs=runs, outdir=outdir)


def _write_weights_csv(prepared: _Prepared, path: Path) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["node_id", "centrality", "flow", "weight"])
        for i, node_id in enumerate(prepared.cv.node_ids):
            writer.writerow([node_id, repr(float(prepared.cv.centrality[i])),
                             repr(float(prepared.flows[i])), repr(float(prepared.fw.weight[i]))])


def export_comparison(table: ComparisonTable, outdir) -> dict[str, Path]:
    """Write comparison.csv (schema ``k,strategy,energy_j_mean,energy_j_std,
    pdr,mean_sf``, rows K ascending then strategy) and comparison.txt."""
    import csv

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "comparison.csv"
    txt_path = outdir / "comparison.txt"
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["k", "strategy", "energy_j_mean", "energy_j_std", "pdr", "mean_sf"])
        for row in table.sorted_rows():
            writer.writerow([row.k, row.strategy, repr(row.energy_j_mean), repr(row.energy_j_std),
                             repr(row.pdr), repr(row.mean_sf)])
    txt_path.write_text(table.pivot_text(), encoding="utf-8")
    return {"csv": csv_path, "txt": txt_path}


_PREDICATE_OPS = (("<=", operator.le), (">=", operator.ge), ("==", operator.eq),
                  ("<", operator.lt), (">", operator.gt))
_PREDICATE_METRICS = {"pdr": "pdr", "energy_j": "energy_j_mean", "mean_sf": "mean_sf"}


def parse_predicate(text: str):
    """Turn e.g. ``"pdr>=0.9"`` into a function of a ComparisonRow."""
    stripped = text.replace(" ", "")
    for symbol, op in _PREDICATE_OPS:
        if symbol in stripped:
            metric, _, value_text = stripped.partition(symbol)
            if metric not in _PREDICATE_METRICS:
                raise PredicateError(
                    f"unknown metric {metric!r}; expected one of {sorted(_PREDICATE_METRICS)}")
            try:
                value = float(value_text)
            except ValueError:
                raise PredicateError(f"bad threshold {value_text!r} in {text!r}") from None
            attribute = _PREDICATE_METRICS[metric]
            return lambda row: op(getattr(row, attribute), value)
    raise PredicateError(f"no comparison operator found in {text!r}")


@dataclass
class KpiResult:
    satisfiable: bool
    k: int | None
    row: ComparisonRow | None
    evaluated: list[ComparisonRow]


def kpi_search(cfg: ScenarioConfig, predicate, strategy: str | None = None,
               axis: str = "k") -> KpiResult:
    """Smallest sweep-axis value whose mean summary satisfies the predicate,
    by linear scan (no bisection assumption).  The gateway count is the one
    supported axis.  ``predicate`` is a callable on a ComparisonRow or a
    string such as ``"pdr>=0.9"``.  Evaluates the given strategy (default:
    the first configured one); no artifacts are written.
    """
    if axis != "k":
        raise ConfigError(f"unsupported sweep axis {axis!r}; only 'k' is available")
    if isinstance(predicate, str):
        predicate = parse_predicate(predicate)
    if not cfg.gateway_counts:
        raise EmptySweep("no gateway counts to scan")
    chosen = strategy or cfg.strategies[0]
    if chosen not in cfg.strategies:
        raise ConfigError(f"strategy {chosen!r} not in configured strategies {cfg.strategies}")
    prepared = _Prepared(cfg)
    evaluated: list[ComparisonRow] = []
    for k in cfg.gateway_counts:
        row, _ = _run_combo(prepared, cfg, k, chosen, outdir=None)
        evaluated.append(row)
        if predicate(row):
            return KpiResult(satisfiable=True, k=k, row=row, evaluated=evaluated)
    return KpiResult(satisfiable=False, k=None, row=None, evaluated=evaluated)
