"""Run configuration: schema defaults < run file < command-line flags."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .config import Configuration, load_run_file
from .constants import CONFIG_FILE
from .graph.features import NodeFeatureMode
from .logging_setup import get_logger
from .model.settings import GraphMixerConfig
from .models import ConfigError
from .schema import RUN_CONFIG_SCHEMA
from .training.trainer import TrainSettings
from .validation import ConfigValidator

__all__ = ["FLAG_KEYS", "RunConfig"]

# command-line flag -> config key
FLAG_KEYS = {
    "--seed": "seed",
    "--epochs": "epochs",
    "--dataset": "dataset",
    "--out": "out",
    "--k": "k",
    "--time-mode": "time_mode",
    "--neighbor-mode": "neighbor_mode",
    "--variant": "variant",
    "--encoder": "encoder",
    "--undirected": "undirected",
    "--checkpoint": "checkpoint",
}


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration.

    Attributes:
        values: The merged configuration (schema defaults through `Configuration.get`)
        source: The run file, if any
    """

    values: Configuration
    source: Path | None = None

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
        """Merge and validate.

        Without `path`, ``tgmixer.conf`` in the working directory is used when present.

        Raises:
            ConfigError: unreadable file or invalid values
        """
        log = get_logger("startup")
        source = Path(path) if path else None
        if source is None and Path(CONFIG_FILE).exists():
            source = Path(CONFIG_FILE)
        file_values = load_run_file(source, RUN_CONFIG_SCHEMA) if source else {}
        values = Configuration.layered(file_values, overrides or {}, logger=log, schema=RUN_CONFIG_SCHEMA)
        validator = ConfigValidator(values, "run", log)
        errors = validator.validate(RUN_CONFIG_SCHEMA)
        if errors:
            raise ConfigError(errors)
        validator.warn_unknown_keys(RUN_CONFIG_SCHEMA)
        return cls(values, source)

    def replace(self, **changes: Any) -> RunConfig:  # noqa: ANN401
        """Copy with some keys overridden (used by ablations)."""
        merged = Configuration.layered(dict(self.values), changes, logger=self.values.log, schema=RUN_CONFIG_SCHEMA)
        return RunConfig(merged, self.source)

    @property
    def seed(self) -> int:
        """Root seed."""
        return self.values.get_int("seed")

    @property
    def seeds(self) -> list[int]:
        """Ablation seeds, defaulting to the root seed alone."""
        return self.values.get_int_list("seeds") or [self.seed]

    @property
    def out_dir(self) -> Path:
        """Artifact directory."""
        return Path(self.values.get_str("out"))

    @property
    def checkpoint_prefix(self) -> Path:
        """Checkpoint prefix, ``<out>/model`` unless set."""
        return Path(self.values.get_str("checkpoint") or self.out_dir / "model")

    @property
    def node_feature_mode(self) -> NodeFeatureMode:
        """Explicit mode, else dense when a feature file is given."""
        explicit = self.values.get_str("node_feature_mode")
        if explicit:
            return NodeFeatureMode(explicit)
        return NodeFeatureMode.DENSE if self.values.get_str("node_features") else NodeFeatureMode.ONE_HOT

    def model_config(self, window: float) -> GraphMixerConfig:
        """GraphMixerConfig with `window` used when the file leaves it at 0."""
        v = self.values
        return GraphMixerConfig(
            k=v.get_int("k"),
            window=v.get_float("window") or window,
            d_time=v.get_int("d_time"),
            d_hidden=v.get_int("d_hidden"),
            alpha=v.get_float("alpha"),
            beta=v.get_float("beta"),
            time_mode=v.get_str("time_mode"),  # type: ignore[arg-type]
            neighbor_mode=v.get_str("neighbor_mode"),  # type: ignore[arg-type]
            undirected=v.get_bool("undirected"),
            node_feature_mode=self.node_feature_mode,
            variant=v.get_str("variant"),  # type: ignore[arg-type]
            link_encoder=v.get_str("encoder"),  # type: ignore[arg-type]
            attention_scope=v.get_str("attention_scope"),  # type: ignore[arg-type]
            attention_pooling=v.get_str("attention_pooling"),  # type: ignore[arg-type]
            time_encoder=v.get_str("time_encoder"),  # type: ignore[arg-type]
            token_hidden=v.get_int("token_hidden") or None,
            channel_hidden=v.get_int("channel_hidden") or None,
        )

    def train_settings(self, seed: int | None = None) -> TrainSettings:
        """Optimization settings, optionally for another seed."""
        v = self.values
        return TrainSettings(
            epochs=v.get_int("epochs"),
            batch_size=v.get_int("batch_size"),
            lr=v.get_float("lr"),
            weight_decay=v.get_float("weight_decay"),
            seed=self.seed if seed is None else seed,
            negatives_all_nodes=v.get_bool("negatives_all_nodes"),
            record_trajectory=v.get_bool("record_trajectory"),
            recall_k=v.get_int("recall_k"),
        )

    def echo(self) -> dict[str, Any]:
        """Every schema key with its effective value, for manifests."""
        return {name: self.values.get(name) for name in RUN_CONFIG_SCHEMA.names}
