"""Synthetic two-sided-marketplace population and its ground-truth risk model.

The world holds guests, hosts, and listings with documented latent
attributes. A booking's true probability of needing support is a linear
model of its raw features pushed through a sigmoid, so the generator's own
probabilities give a computable ceiling (the best possible AUC) for any
trained model. Risk drivers follow the marketplace folklore the generator
encodes: pairing a brand-new guest with a brand-new host is risky,
same-day bookings are risky, responsive hosts and good listings are safer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..losses import sigmoid


@dataclass(frozen=True)
class RiskCoefficients:
    """Ground-truth coefficients on (transforms of) the raw features.

    Each transform is centered (constants baked in for the default
    marginals) so the realized support rate stays near the configured base
    rate; with all coefficients at 0 it matches the base rate exactly.
    """

    new_pair: float = 1.1  # new-guest x new-host interaction
    short_lead: float = 1.2  # on (exp(-lead_days / lead_scale_days) - 0.52)
    host_response: float = -4.2  # on (response_rate - 0.9)
    listing_quality: float = -0.38
    guest_experience: float = -0.38  # on (log1p(past_bookings) - 0.72)
    nights: float = 0.21  # on (log1p(nights) - 1.14)
    region_scale: float = 0.3  # std of per-region offsets
    device_scale: float = 0.2  # std of per-device offsets

    def zeroed(self) -> "RiskCoefficients":
        return RiskCoefficients(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class WorldConfig:
    # population sizes
    n_guests: int = 50_000
    n_hosts: int = 8_000
    n_listings: int = 10_000
    n_regions: int = 8
    n_devices: int = 4
    # booking stream
    n_bookings: int = 200_000
    n_days: int = 240
    # marginal distributions (all means unless noted)
    guest_tenure_mean_days: float = 400.0
    past_bookings_per_year: float = 1.5  # Poisson rate scaled by tenure
    host_tenure_mean_days: float = 500.0
    host_response_beta: tuple[float, float] = (9.0, 1.0)
    lead_mean_days: float = 7.0
    nights_mean: float = 2.5
    party_poisson_mean: float = 1.2
    # ground-truth risk; the marginal realized rate lands near 5% once the
    # risk spread lifts the mean above this zero-coefficient base
    base_cs_rate: float = 0.03
    risk: RiskCoefficients = field(default_factory=RiskCoefficients)
    new_host_days: float = 90.0
    lead_scale_days: float = 7.0
    delay_mean_days: float = 5.0
    host_cancel_fraction: float = 0.3
    # search sessions and the booking-choice model
    n_results: int = 15
    booking_temperature: float = 0.7
    position_bias_strength: float = 3.0
    no_booking_utility: float = 1.0
    appeal_quality_weight: float = 1.0
    appeal_noise: float = 0.7
    base_score_noise: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if min(self.n_guests, self.n_hosts, self.n_listings, self.n_regions, self.n_devices) < 0:
            raise ConfigError("population sizes must be non-negative")
        if not 0.0 < self.base_cs_rate < 0.5:
            raise ConfigError("base_cs_rate must be in (0, 0.5)")
        for name in ("delay_mean_days", "booking_temperature", "lead_scale_days"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.position_bias_strength < 0:
            raise ConfigError("position_bias_strength must be non-negative")
        if not 0.0 <= self.host_cancel_fraction <= 1.0:
            raise ConfigError("host_cancel_fraction must be a fraction")
        if self.n_listings % max(self.n_regions, 1):
            raise ConfigError("n_listings must divide evenly into n_regions pools")


# raw feature bundle every booking exposes, in dataset column order
CONTINUOUS_FEATURES = (
    ("guest_tenure_days", True),
    ("guest_past_bookings", True),
    ("host_response_rate", False),
    ("host_tenure_days", True),
    ("listing_quality", False),
    ("lead_days", True),
    ("nights", True),
    ("party_size", False),
)
CATEGORICAL_FEATURES = ("region", "device")
FEATURE_NAMES = tuple(name for name, _ in CONTINUOUS_FEATURES) + CATEGORICAL_FEATURES


@dataclass
class World:
    config: WorldConfig
    guest_tenure_days: np.ndarray
    guest_past_bookings: np.ndarray
    guest_device: np.ndarray
    host_response_rate: np.ndarray
    host_tenure_days: np.ndarray
    listing_host: np.ndarray
    listing_region: np.ndarray
    listing_quality: np.ndarray
    region_offsets: np.ndarray
    device_offsets: np.ndarray

    @property
    def region_pool_size(self) -> int:
        return self.config.n_listings // self.config.n_regions

    def region_name(self, ids: np.ndarray) -> np.ndarray:
        return np.char.add("r", ids.astype(str))

    def device_name(self, ids: np.ndarray) -> np.ndarray:
        return np.char.add("d", ids.astype(str))


def world_rng(config: WorldConfig, stage: int, *extra: int) -> np.random.Generator:
    """One deterministic stream per (seed, stage); extra keys split cohorts."""
    return np.random.default_rng(np.random.SeedSequence([config.seed, stage, *extra]))


def generate_world(config: WorldConfig) -> World:
    """Draw the population; deterministic per config seed."""
    rng = world_rng(config, 0)
    n_g, n_h, n_l = config.n_guests, config.n_hosts, config.n_listings
    guest_tenure = np.floor(rng.exponential(config.guest_tenure_mean_days, n_g))
    past_rate = config.past_bookings_per_year * guest_tenure / 365.0
    guest_past = rng.poisson(past_rate) if n_g else np.zeros(0, dtype=np.int64)
    guest_device = rng.integers(0, max(config.n_devices, 1), n_g)
    a, b = config.host_response_beta
    host_response = rng.beta(a, b, n_h) if n_h else np.zeros(0)
    host_tenure = np.floor(rng.exponential(config.host_tenure_mean_days, n_h))
    listing_host = rng.integers(0, max(n_h, 1), n_l)
    # contiguous equal-size region pools keep candidate retrieval simple
    listing_region = np.arange(n_l, dtype=np.int64) % config.n_regions if n_l else np.zeros(0, dtype=np.int64)
    listing_region = np.sort(listing_region)
    listing_quality = rng.normal(0.0, 1.0, n_l)
    region_offsets = rng.normal(0.0, config.risk.region_scale, config.n_regions)
    device_offsets = rng.normal(0.0, config.risk.device_scale, config.n_devices)
    return World(
        config=config,
        guest_tenure_days=guest_tenure,
        guest_past_bookings=guest_past,
        guest_device=guest_device,
        host_response_rate=host_response,
        host_tenure_days=host_tenure,
        listing_host=listing_host,
        listing_region=listing_region,
        listing_quality=listing_quality,
        region_offsets=region_offsets,
        device_offsets=device_offsets,
    )


def risk_logit(world: World, columns: dict[str, np.ndarray]) -> np.ndarray:
    """True support-need log-odds for raw feature columns.

    Every term is a function of observable features, so the signal is fully
    learnable; the intercept is the log-odds of the configured base rate and
    all coefficient terms are (approximately) centered around it.
    """
    cfg = world.config
    c = cfg.risk
    base = np.log(cfg.base_cs_rate / (1.0 - cfg.base_cs_rate))
    past = np.asarray(columns["guest_past_bookings"], dtype=np.float64)
    host_tenure = np.asarray(columns["host_tenure_days"], dtype=np.float64)
    lead = np.asarray(columns["lead_days"], dtype=np.float64)
    z = np.full(past.shape, base)
    z += c.new_pair * ((past == 0) & (host_tenure < cfg.new_host_days))
    z += c.short_lead * (np.exp(-lead / cfg.lead_scale_days) - 0.52)
    z += c.host_response * (np.asarray(columns["host_response_rate"], dtype=np.float64) - 0.9)
    z += c.listing_quality * np.asarray(columns["listing_quality"], dtype=np.float64)
    z += c.guest_experience * (np.log1p(past) - 0.72)
    z += c.nights * (np.log1p(np.asarray(columns["nights"], dtype=np.float64)) - 1.14)
    region_ids = _strip_prefix_ids(columns["region"], "r")
    device_ids = _strip_prefix_ids(columns["device"], "d")
    z += world.region_offsets[region_ids]
    z += world.device_offsets[device_ids]
    return z


def _strip_prefix_ids(values: np.ndarray, prefix: str) -> np.ndarray:
    return np.char.lstrip(np.asarray(values, dtype=str), prefix).astype(np.int64)


def risk_probability(world: World, columns: dict[str, np.ndarray]) -> np.ndarray:
    return sigmoid(risk_logit(world, columns))
