"""Dataset summary statistics."""

from dataclasses import asdict, dataclass

from .events import EventLog

__all__ = ["DatasetStats", "dataset_statistics"]


@dataclass(frozen=True, slots=True)
class DatasetStats:
    """Headline numbers printed by `ingest` and echoed in run manifests."""

    num_nodes: int
    num_events: int
    d_link: int
    t_max: float
    avg_time_gap: float
    avg_degree: float

    @property
    def has_link_features(self) -> bool:
        """True when events carry a feature vector."""
        return self.d_link > 0

    def as_dict(self) -> dict[str, float | int | bool]:
        """Flat dict, for manifests."""
        return {**asdict(self), "has_link_features": self.has_link_features}


def dataset_statistics(events: EventLog) -> DatasetStats:
    """Compute |V|, |E|, average time gap and average degree (|E| / |V|)."""
    n = len(events)
    t_min = float(events.ts[0]) if n else 0.0
    t_max = float(events.ts[-1]) if n else 0.0
    return DatasetStats(
        num_nodes=events.num_nodes,
        num_events=n,
        d_link=events.d_link,
        t_max=t_max,
        avg_time_gap=(t_max - t_min) / n if n else 0.0,
        avg_degree=n / events.num_nodes if events.num_nodes else 0.0,
    )
