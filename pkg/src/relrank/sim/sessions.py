"""Search-session generation with a position-biased booking-choice model.

Per session: sample a query (region, lead days, nights, party size) for a
random searcher, retrieve a uniform subset of the region's listings, rank
them with the combined scoring function, then draw at most one booking from
a softmax choice over the slate plus a no-booking option. A candidate's
choice utility is its (latent) appeal plus a position bonus that decays down
the ranked list, so ordering causally shifts which listing gets booked.
Support needs for the booked stay are realized from the ground truth.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..ranking import RankingConfig, reliability_penalty
from ..sessions import SessionSet
from .world import World, risk_probability, world_rng

_CHUNK = 4096


def position_bonus(strength: float, n_positions: int) -> np.ndarray:
    """Attention bonus per rank, strongest at the top of the list."""
    return strength / np.log2(2.0 + np.arange(n_positions, dtype=np.float64))


def generate_sessions(
    world: World,
    scorer,
    ranking_config: RankingConfig,
    n_sessions: int,
    rng_key: tuple[int, ...] = (2,),
) -> SessionSet:
    """Simulate sessions under one ranking policy; deterministic per
    (config seed, rng_key). ``scorer.probabilities`` supplies the p_cs used
    for ranking and logging; realized outcomes always come from the ground
    truth.
    """
    cfg = world.config
    if cfg.n_listings == 0:
        raise DataError("cannot generate sessions in a world without listings")
    k = cfg.n_results
    pool = world.region_pool_size
    if k > pool:
        raise DataError(f"n_results {k} exceeds the region pool size {pool}")
    rng = world_rng(cfg, *rng_key)

    out_ids = np.empty((n_sessions, k), dtype=np.int64)
    out_base = np.empty((n_sessions, k))
    out_probs = np.empty((n_sessions, k))
    out_booked = np.full(n_sessions, -1, dtype=np.int64)
    out_cs = np.zeros(n_sessions, dtype=bool)
    out_cancel = np.zeros(n_sessions, dtype=bool)

    bonus = position_bonus(cfg.position_bias_strength, k)
    for start in range(0, n_sessions, _CHUNK):
        c = min(_CHUNK, n_sessions - start)
        sl = slice(start, start + c)

        guest = rng.integers(0, cfg.n_guests, c)
        region = rng.integers(0, cfg.n_regions, c)
        lead = rng.geometric(1.0 / (1.0 + cfg.lead_mean_days), c) - 1
        nights = rng.geometric(1.0 / cfg.nights_mean, c)
        party = 1 + rng.poisson(cfg.party_poisson_mean, c)

        # uniform k-subset of the query region's pool: keep the k smallest of
        # one random key per listing, then restore ascending-id order
        keys = rng.random((c, pool))
        local = np.sort(np.argpartition(keys, k - 1, axis=1)[:, :k], axis=1)
        listing = region[:, None] * pool + local

        columns = _candidate_columns(world, guest, lead, nights, party, region, listing, c, k)
        p_cs = np.asarray(scorer.probabilities(columns), dtype=np.float64).reshape(c, k)

        quality = world.listing_quality[listing]
        appeal = cfg.appeal_quality_weight * quality + rng.normal(0.0, cfg.appeal_noise, (c, k))
        base = appeal + rng.normal(0.0, cfg.base_score_noise, (c, k))

        combined = base + ranking_config.alpha * reliability_penalty(p_cs, ranking_config)
        order = np.argsort(-combined, axis=1, kind="stable")  # ties: ascending id

        ranked_ids = np.take_along_axis(listing, order, axis=1)
        ranked_base = np.take_along_axis(base, order, axis=1)
        ranked_probs = np.take_along_axis(p_cs, order, axis=1)
        ranked_appeal = np.take_along_axis(appeal, order, axis=1)

        # softmax choice over (candidates at their positions) + no-booking,
        # sampled exactly via the Gumbel-max trick
        utility = np.concatenate(
            [ranked_appeal + bonus, np.full((c, 1), cfg.no_booking_utility)], axis=1
        )
        gumbel = -np.log(-np.log(rng.uniform(size=(c, k + 1))))
        choice = np.argmax(utility / cfg.booking_temperature + gumbel, axis=1)
        booked = np.where(choice < k, choice, -1)

        rows = np.nonzero(booked >= 0)[0]
        # map booked ranked positions back to pre-ranking column indices
        orig = order[rows, booked[rows]]
        booked_cols = {
            name: np.asarray(col).reshape(c, k)[rows, orig] for name, col in columns.items()
        }
        p_true_booked = risk_probability(world, booked_cols)
        cs_draw = rng.uniform(size=c)
        cancel_draw = rng.uniform(size=c)
        cs = np.zeros(c, dtype=bool)
        cs[rows] = cs_draw[rows] < p_true_booked
        cancel = cs & (cancel_draw < cfg.host_cancel_fraction)

        out_ids[sl] = ranked_ids
        out_base[sl] = ranked_base
        out_probs[sl] = ranked_probs
        out_booked[sl] = booked
        out_cs[sl] = cs
        out_cancel[sl] = cancel

    return SessionSet(
        candidate_ids=out_ids,
        base_scores=out_base,
        cs_probs=out_probs,
        booked_pos=out_booked,
        cs_realized=out_cs,
        host_cancelled=out_cancel,
    )


def _candidate_columns(world, guest, lead, nights, party, region, listing, c, k):
    """Raw feature columns for every (searcher, candidate) pair, flattened."""
    rep = lambda a: np.repeat(a, k)  # noqa: E731 - local shorthand
    flat = listing.reshape(-1)
    host = world.listing_host[flat]
    return {
        "guest_tenure_days": rep(world.guest_tenure_days[guest]),
        "guest_past_bookings": rep(world.guest_past_bookings[guest]),
        "host_response_rate": world.host_response_rate[host],
        "host_tenure_days": world.host_tenure_days[host],
        "listing_quality": world.listing_quality[flat],
        "lead_days": rep(lead.astype(np.float64)),
        "nights": rep(nights.astype(np.float64)),
        "party_size": rep(party.astype(np.float64)),
        "region": world.region_name(np.repeat(region, k)),
        "device": world.device_name(rep(world.guest_device[guest])),
    }
