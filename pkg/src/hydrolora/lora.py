"""LoRa radio primitives: configuration, time on air, link budget, ADR.

All radio numbers (sensitivities, margins, capture threshold, propagation
defaults) are widely used reference values and every one is overridable
through the config objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSf, NoGateways

SF_RANGE = (7, 8, 9, 10, 11, 12)

# Typical 125 kHz sensitivities and demodulation SNR floors per SF.
DEFAULT_SENSITIVITY_DBM = {7: -123.0, 8: -126.0, 9: -129.0, 10: -132.0, 11: -134.5, 12: -137.0}
DEFAULT_REQUIRED_SNR_DB = {7: -7.5, 8: -10.0, 9: -12.5, 10: -15.0, 11: -17.5, 12: -20.0}

# EU868 default uplink channels.
DEFAULT_CHANNELS_HZ = (868_100_000, 868_300_000, 868_500_000)


@dataclass(frozen=True)
class RadioConfig:
    """Uplink radio parameters shared by every device in a run."""

    sf_min: int = 7
    sf_max: int = 12
    bandwidth_hz: int = 125_000
    coding_rate_denominator: int = 1  # 1..4 meaning 4/5..4/8
    preamble_symbols: int = 8
    explicit_header: bool = True
    payload_bytes: int = 20
    tx_power_dbm: float = 14.0
    channels_hz: tuple[int, ...] = DEFAULT_CHANNELS_HZ
    duty_cycle_limit: float = 0.01
    sensitivity_dbm: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_SENSITIVITY_DBM))
    required_snr_db: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_REQUIRED_SNR_DB))
    adr_margin_db: float = 10.0
    capture_threshold_db: float = 6.0

    def __post_init__(self):
        if not (7 <= self.sf_min <= self.sf_max <= 12):
            raise ValueError(f"SF range must sit inside 7..12, got {self.sf_min}..{self.sf_max}")
        if not 1 <= self.payload_bytes <= 222:
            raise ValueError(f"payload_bytes must be in [1, 222], got {self.payload_bytes}")
        if self.coding_rate_denominator not in (1, 2, 3, 4):
            raise ValueError("coding_rate_denominator must be 1..4 (4/5..4/8)")
        if not 0.0 < self.duty_cycle_limit <= 1.0:
            raise ValueError("duty_cycle_limit must be in (0, 1]")
        if not self.channels_hz:
            raise ValueError("at least one channel required")
        for table, name in ((self.sensitivity_dbm, "sensitivity_dbm"), (self.required_snr_db, "required_snr_db")):
            values = [table[sf] for sf in self.sfs()]
            if any(b >= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name} must strictly decrease with SF")

    def sfs(self) -> range:
        return range(self.sf_min, self.sf_max + 1)


@dataclass(frozen=True)
class EnergyModel:
    """Transmit-only energy accounting: E = V * I * airtime per uplink.

    Receive-window cost is off the ledger by default; setting
    ``rx_energy_per_uplink_j`` adds a flat per-uplink term for the windows
    that follow every transmission.
    """

    supply_voltage_v: float = 3.3
    tx_current_a: dict[float, float] = field(default_factory=lambda: {14.0: 0.028})
    initial_battery_j: float = 10_000.0
    rx_energy_per_uplink_j: float = 0.0

    def current_for(self, tx_power_dbm: float) -> float:
        try:
            return self.tx_current_a[tx_power_dbm]
        except KeyError:
            raise ValueError(f"no current draw configured for {tx_power_dbm} dBm") from None

    def tx_energy_j(self, tx_power_dbm: float, airtime_s: float) -> float:
        return self.supply_voltage_v * self.current_for(tx_power_dbm) * airtime_s

    def uplink_energy_j(self, tx_power_dbm: float, airtime_s: float) -> float:
        return self.tx_energy_j(tx_power_dbm, airtime_s) + self.rx_energy_per_uplink_j


def airtime(sf: int, cfg: RadioConfig) -> float:
    """Time on air in seconds for one uplink at the given spreading factor.

    Symbol time is 2^SF / BW.  The payload symbol count is
    8 + max(ceil((8*PL - 4*SF + 28 + 16 - 20*H) / (4*(SF - 2*DE))) * (CR + 4), 0)
    with H = 0 for an explicit header, and low-data-rate optimization
    (DE = 1) active for SF >= 11 at 125 kHz.  The preamble adds 4.25 symbol
    durations on top of the configured preamble symbols.
    """
    if sf not in cfg.sfs():
        raise InvalidSf(f"SF{sf} outside configured range {cfg.sf_min}..{cfg.sf_max}")
    t_sym = (2**sf) / cfg.bandwidth_hz
    de = 1 if sf >= 11 and cfg.bandwidth_hz == 125_000 else 0
    h = 0 if cfg.explicit_header else 1
    numerator = 8 * cfg.payload_bytes - 4 * sf + 28 + 16 - 20 * h
    payload_symbols = 8 + max(
        math.ceil(numerator / (4 * (sf - 2 * de))) * (cfg.coding_rate_denominator + 4), 0
    )
    return (cfg.preamble_symbols + 4.25 + payload_symbols) * t_sym


@dataclass(frozen=True)
class PropagationModel:
    """Log-distance path loss with optional per-link log-normal shadowing."""

    ref_loss_db: float = 128.95
    ref_distance_m: float = 1000.0
    exponent: float = 2.32
    shadowing_sigma_db: float = 0.0


def path_loss_db(distance_m, model: PropagationModel = PropagationModel()):
    """Deterministic path loss in dB; distances are clamped to 1 m."""
    d = np.maximum(np.asarray(distance_m, dtype=np.float64), 1.0)
    loss = model.ref_loss_db + 10.0 * model.exponent * np.log10(d / model.ref_distance_m)
    return float(loss) if np.isscalar(distance_m) else loss


def rssi(tx_dbm: float, loss_db):
    """Received power: transmit power minus path loss."""
    return tx_dbm - loss_db


def link_rssi_matrix(
    device_xy: np.ndarray,
    gateway_xy: np.ndarray,
    cfg: RadioConfig,
    model: PropagationModel = PropagationModel(),
    shadowing_db: np.ndarray | None = None,
) -> np.ndarray:
    """Received power of every device at every gateway, shape (N, K).

    ``shadowing_db`` is an optional (N, K) realization added to the path
    loss; it is drawn once per device-gateway pair by the caller so repeated
    evaluations see the same channel.
    """
    device_xy = np.asarray(device_xy, dtype=np.float64)
    gateway_xy = np.asarray(gateway_xy, dtype=np.float64)
    delta = device_xy[:, None, :] - gateway_xy[None, :, :]
    distance = np.sqrt((delta**2).sum(axis=2))
    loss = path_loss_db(distance, model)
    if shadowing_db is not None:
        loss = loss + shadowing_db
    return cfg.tx_power_dbm - loss


@dataclass(frozen=True)
class SfAssignment:
    sf: int
    coverage_marginal: bool
    best_rssi_dbm: float


def smallest_feasible_sf(best_rssi_dbm: float, cfg: RadioConfig) -> tuple[int, bool]:
    """Smallest SF whose sensitivity clears the RSSI minus the ADR margin.

    Falls back to the largest SF, flagged coverage-marginal, when even that
    one misses the margin.
    """
    budget = best_rssi_dbm - cfg.adr_margin_db
    for sf in cfg.sfs():
        if cfg.sensitivity_dbm[sf] <= budget:
            return sf, False
    return cfg.sf_max, True


def adr_assign(
    device_xy,
    gateways_xy,
    cfg: RadioConfig,
    model: PropagationModel = PropagationModel(),
    shadowing_db: np.ndarray | None = None,
) -> SfAssignment:
    """One-shot ADR: assign the cheapest SF the best gateway link supports."""
    gateways_xy = np.atleast_2d(np.asarray(gateways_xy, dtype=np.float64))
    if gateways_xy.shape[0] == 0:
        raise NoGateways("ADR needs at least one gateway")
    matrix = link_rssi_matrix(np.atleast_2d(np.asarray(device_xy, dtype=np.float64)),
                              gateways_xy, cfg, model, shadowing_db)
    best = float(matrix.max())
    sf, marginal = smallest_feasible_sf(best, cfg)
    return SfAssignment(sf=sf, coverage_marginal=marginal, best_rssi_dbm=best)
