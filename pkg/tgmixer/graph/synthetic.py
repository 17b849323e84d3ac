"""Bundled synthetic dataset: users re-contacting a preferred item on a periodic schedule."""

import numpy as np

from ..logging_setup import get_logger
from .events import EventLog

__all__ = ["generate_periodic_dataset"]

log = get_logger("graph")


def generate_periodic_dataset(  # noqa: PLR0913
    num_users: int = 1500,
    num_items: int = 500,
    num_events: int = 50_000,
    noise: float = 0.2,
    d_link: int = 8,
    seed: int = 0,
    min_period: float = 20.0,
    max_period: float = 200.0,
    jitter: float = 0.05,
) -> EventLog:
    """Generate a bipartite interaction log with periodic structure.

    Each user has a preferred item, a period and a phase, and contacts that item at
    ``phase + k * period`` plus Gaussian jitter. A `noise` fraction of the events are
    uniform random (user, item) pairs at uniform random times. Link features are the
    item's latent signature plus small Gaussian noise.

    Users take ids [0, num_users), items [num_users, num_users + num_items).

    Args:
        num_users: Source node count
        num_items: Destination node count
        num_events: Total events
        noise: Fraction of uniform random events
        d_link: Link feature width
        seed: Generator seed
        min_period: Shortest user period
        max_period: Longest user period
        jitter: Jitter standard deviation, as a fraction of the period
    """
    rng = np.random.default_rng(seed)
    preferred = rng.integers(num_items, size=num_users)
    period = rng.uniform(min_period, max_period, size=num_users)
    phase = rng.uniform(0.0, period)

    n_noise = round(noise * num_events)
    n_periodic = num_events - n_noise
    # event counts proportional to each user's rate so all users span the same horizon
    rate = 1.0 / period
    counts = rng.multinomial(n_periodic, rate / rate.sum())
    users = np.repeat(np.arange(num_users), counts)
    occurrence = np.arange(n_periodic) - np.repeat(np.cumsum(counts) - counts, counts)
    ts = phase[users] + occurrence * period[users] + rng.normal(0.0, jitter, size=n_periodic) * period[users]
    ts = np.clip(ts, 0.0, None)
    horizon = float(ts.max()) if n_periodic else 1.0

    noise_users = rng.integers(num_users, size=n_noise)
    noise_items = rng.integers(num_items, size=n_noise)
    noise_ts = rng.uniform(0.0, horizon, size=n_noise)

    src = np.concatenate([users, noise_users])
    items = np.concatenate([preferred[users], noise_items])
    signature = rng.normal(size=(num_items, d_link))
    features = signature[items] + 0.1 * rng.normal(size=(num_events, d_link))

    events = EventLog.from_arrays(
        src,
        items + num_users,
        np.concatenate([ts, noise_ts]),
        features,
        num_nodes=num_users + num_items,
        dst_range=(num_users, num_users + num_items),
    )
    log.info("Generated %d events over %d users and %d items (noise=%.2f, seed=%d)", num_events, num_users, num_items, noise, seed)
    return events
