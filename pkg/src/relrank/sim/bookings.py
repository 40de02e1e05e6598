"""Booking stream generation, attribution-window labeling, time-based splits.

Bookings realize support needs as Bernoulli draws from the ground-truth
probability; when a need is realized, the delay from booking to the support
event is geometric on {1, 2, ...} with the configured mean, so the share of
events landing inside a w-day window is 1 - (1 - q)^w.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from .world import FEATURE_NAMES, World, risk_probability, world_rng

NO_DELAY = -1  # sentinel: the booking never needs support


@dataclass
class BookingTable:
    """Columnar bookings; ``features`` holds the raw per-booking bundle."""

    guest_id: np.ndarray
    listing_id: np.ndarray
    host_id: np.ndarray
    booking_day: np.ndarray
    features: dict[str, np.ndarray]
    true_cs_prob: np.ndarray
    cs_delay_days: np.ndarray  # NO_DELAY when support is never needed

    def __len__(self) -> int:
        return self.booking_day.size


@dataclass
class LabeledTable:
    """Feature bundle plus a matured label, the unit of classifier training."""

    features: dict[str, np.ndarray]
    label: np.ndarray
    booking_day: np.ndarray
    true_cs_prob: np.ndarray

    def __len__(self) -> int:
        return self.label.size

    def rows(self):
        """Row-dict view of the feature bundle (schema fitting contract)."""
        names = list(self.features)
        for i in range(len(self)):
            yield {name: self.features[name][i] for name in names}

    def take(self, idx: np.ndarray) -> "LabeledTable":
        return LabeledTable(
            features={k: v[idx] for k, v in self.features.items()},
            label=self.label[idx],
            booking_day=self.booking_day[idx],
            true_cs_prob=self.true_cs_prob[idx],
        )


def simulate_bookings(
    world: World, n_days: int | None = None, n_bookings: int | None = None
) -> BookingTable:
    """Draw the booking stream; deterministic per world config seed.

    Each booking pairs a random guest with a random listing on a uniform
    day, with query attributes (lead days, nights, party size) from their
    configured marginals.
    """
    cfg = world.config
    if cfg.n_listings == 0 or cfg.n_guests == 0:
        raise DataError("cannot simulate bookings in an empty world")
    n_days = cfg.n_days if n_days is None else n_days
    n = cfg.n_bookings if n_bookings is None else n_bookings
    rng = world_rng(cfg, 1)

    guest = rng.integers(0, cfg.n_guests, n)
    listing = rng.integers(0, cfg.n_listings, n)
    day = rng.integers(0, n_days, n)
    lead = rng.geometric(1.0 / (1.0 + cfg.lead_mean_days), n) - 1  # support {0,1,...}
    nights = rng.geometric(1.0 / cfg.nights_mean, n)  # support {1,2,...}
    party = 1 + rng.poisson(cfg.party_poisson_mean, n)

    features = {
        "guest_tenure_days": world.guest_tenure_days[guest],
        "guest_past_bookings": world.guest_past_bookings[guest],
        "host_response_rate": world.host_response_rate[world.listing_host[listing]],
        "host_tenure_days": world.host_tenure_days[world.listing_host[listing]],
        "listing_quality": world.listing_quality[listing],
        "lead_days": lead.astype(np.float64),
        "nights": nights.astype(np.float64),
        "party_size": party.astype(np.float64),
        "region": world.region_name(world.listing_region[listing]),
        "device": world.device_name(world.guest_device[guest]),
    }
    assert tuple(features) == FEATURE_NAMES

    p_true = risk_probability(world, features)
    needs_support = rng.uniform(size=n) < p_true
    delay = np.full(n, NO_DELAY, dtype=np.int64)
    delay[needs_support] = rng.geometric(1.0 / cfg.delay_mean_days, int(needs_support.sum()))

    return BookingTable(
        guest_id=guest,
        listing_id=listing,
        host_id=world.listing_host[listing],
        booking_day=day,
        features=features,
        true_cs_prob=p_true,
        cs_delay_days=delay,
    )


def label_with_window(
    bookings: BookingTable, window_days: int, as_of_day: int
) -> tuple[LabeledTable, int]:
    """Fix labels for mature bookings; immature ones are excluded.

    A booking is mature once ``booking_day + window_days <= as_of_day``; its
    label is 1 exactly when a support need was realized within the window
    (delay <= window_days). Returns (labeled table, excluded count).
    """
    if window_days < 1:
        raise DataError("window_days must be >= 1")
    mature = bookings.booking_day + window_days <= as_of_day
    excluded = int((~mature).sum())
    delay = bookings.cs_delay_days[mature]
    label = ((delay != NO_DELAY) & (delay <= window_days)).astype(np.int64)
    table = LabeledTable(
        features={k: v[mature] for k, v in bookings.features.items()},
        label=label,
        booking_day=bookings.booking_day[mature],
        true_cs_prob=bookings.true_cs_prob[mature],
    )
    return table, excluded


def time_split(
    examples: LabeledTable, eval_days: int, train_days: int
) -> tuple[LabeledTable, LabeledTable]:
    """Last ``eval_days`` of labeled data held out; the ``train_days``
    immediately before form the training set. Day ranges never overlap.
    """
    if len(examples) == 0:
        raise DataError("no labeled examples to split")
    if eval_days < 1 or train_days < 1:
        raise DataError("eval_days and train_days must be >= 1")
    last = int(examples.booking_day.max())
    eval_lo = last - eval_days + 1
    train_lo = eval_lo - train_days
    eval_mask = examples.booking_day >= eval_lo
    train_mask = (examples.booking_day >= train_lo) & (examples.booking_day < eval_lo)
    if not train_mask.any() or not eval_mask.any():
        raise DataError(
            f"empty split: days {train_lo}..{eval_lo - 1} hold {int(train_mask.sum())} "
            f"training rows, days {eval_lo}..{last} hold {int(eval_mask.sum())} eval rows"
        )
    return examples.take(np.nonzero(train_mask)[0]), examples.take(np.nonzero(eval_mask)[0])
