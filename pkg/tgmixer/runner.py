"""The tgmixer commands.

Every ``run_<name>`` method is a command; its docstring's first line names the
arguments (``<required>``, ``[optional]``) and is what ``tgmixer help`` shows.
Commands return the text printed on standard output and write their artifacts
plus a ``<command>.manifest.json`` under the output directory.
"""

from __future__ import annotations

import asyncio
import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from .ansi import ReportStyles, styled
from .artifacts import check_written, write_csv, write_manifest
from .constants import MIN_SPLIT_EVENTS
from .graph import (
    EventLog,
    NodeFeatureMode,
    NodeFeatures,
    SplitBoundaries,
    TemporalGraph,
    build_index,
    chronological_split,
    compute_default_window,
    dataset_statistics,
    generate_periodic_dataset,
    load_events,
    load_node_features,
    write_events_csv,
)
from .help import get_command_help, get_help
from .logging_setup import get_logger
from .model import GraphMixer, TimeEncoderKind
from .models import ArtifactError, ConfigError, ReportedError, SeedStream, ShapeError, Split
from .rng import derive_rng
from .run_config import RunConfig
from .schema import ABLATION_AXES
from .tensor import checkpoint_paths, flatten_params, load_checkpoint, load_into, save_checkpoint
from .training import (
    SeqEncoderKind,
    SeqTask,
    evaluate_split,
    history_rows,
    loss_landscape,
    model_gradcheck,
    parameter_trajectory,
    synth_seq_experiments,
    synth_time_experiment,
    train,
    training_loss,
)
from .training.batches import sample_negative_dst
from .training.trainer import HISTORY_COLUMNS
from .version import VERSION

__all__ = ["Runner", "Workspace", "ablation_variants"]

GRADCHECK_TOLERANCE = 1e-5

METRIC_COLUMNS = ("split", "ap", "auc", "recall_at_k", "mrr", "loss")
ABLATION_COLUMNS = ("axis", "variant", "seeds", "test_ap", "test_ap_std", "test_auc", "test_auc_std", "test_mrr")
TRAJECTORY_COLUMNS = ("t", "r", "theta")


@dataclass
class Workspace:
    """A loaded dataset with its index, splits and node-encoder window."""

    events: EventLog
    graph: TemporalGraph
    bounds: SplitBoundaries
    window: float
    features: NodeFeatures
    inputs: list[Path] = field(default_factory=list)


def ablation_variants(axis: str) -> list[tuple[str, dict[str, Any]]]:
    """(label, config changes) for every setting of `axis`, in report order.

    Raises:
        ConfigError: unknown axis
    """
    match axis:
        case "time_mode":
            return [(m, {"time_mode": m}) for m in ("relative_raw", "relative_encoded", "absolute_raw", "absolute_encoded")]
        case "neighbor_mode":
            return [(m, {"neighbor_mode": m}) for m in ("recent_1hop", "uniform_1hop", "recent_2hop", "uniform_2hop")]
        case "undirected":
            return [("undirected", {"undirected": True}), ("directed", {"undirected": False})]
        case "variant":
            return [(m, {"variant": m}) for m in ("full", "link_only", "node_only")]
        case "link_encoder":
            attention = [
                (f"{scope}_{pooling}", {"encoder": "attention", "attention_scope": scope, "attention_pooling": pooling})
                for scope in ("full", "one_hop")
                for pooling in ("sum", "mean")
            ]
            return [("mixer", {"encoder": "mixer"}), *attention]
        case "time_encoder":
            return [(m.value, {"time_encoder": m.value}) for m in TimeEncoderKind]
    raise ConfigError([f"Unknown ablation axis {axis!r}, expected one of {', '.join(ABLATION_AXES)}"])


def _metric_row(report: Any) -> dict[str, Any]:  # noqa: ANN401
    return {
        "split": report.split,
        "ap": report.average_precision,
        "auc": report.auc,
        "recall_at_k": report.recall_at_k,
        "mrr": report.mrr,
        "loss": report.loss,
    }


class Runner:
    """Command host. The run configuration is loaded on first use, so `help` works without one.

    Args:
        config_path: Run file (``tgmixer.conf`` in the working directory when empty)
        overrides: Values from command-line flags
    """

    def __init__(self, config_path: str | None = None, overrides: dict[str, Any] | None = None) -> None:
        self.config_path = config_path
        self.overrides = overrides or {}
        self.log = get_logger("runner")

    @cached_property
    def config(self) -> RunConfig:
        """The validated run configuration."""
        return RunConfig.load(self.config_path, self.overrides)

    # Data and model construction

    def _events(self) -> tuple[EventLog, list[Path]]:
        v = self.config.values
        dataset = v.get_str("dataset")
        if dataset:
            return load_events(dataset, v.get_bool("has_header")), [Path(dataset)]
        self.log.info("No dataset configured, using the bundled synthetic generator")
        events = generate_periodic_dataset(
            num_users=v.get_int("synth_users"),
            num_items=v.get_int("synth_items"),
            num_events=v.get_int("synth_events"),
            noise=v.get_float("synth_noise"),
            seed=self.config.seed,
        )
        return events, []

    def _node_features(self, num_nodes: int, inputs: list[Path]) -> NodeFeatures:
        path = self.config.values.get_str("node_features")
        mode = self.config.node_feature_mode
        if mode is NodeFeatureMode.DENSE and not path:
            raise ConfigError(["node_feature_mode = 'dense' needs a node_features file"])
        if mode is NodeFeatureMode.ONE_HOT:
            if path:
                self.log.warning("node_feature_mode is one_hot, ignoring %s", path)
            return NodeFeatures.one_hot(num_nodes)
        inputs.append(Path(path))
        return load_node_features(path, num_nodes)

    def _workspace(
        self,
        undirected: bool | None = None,
        events: tuple[EventLog, list[Path]] | None = None,
        features: NodeFeatures | None = None,
    ) -> Workspace:
        log_events, inputs = events or self._events()
        inputs = list(inputs)
        bounds = chronological_split(len(log_events))
        window = compute_default_window(log_events.ts, bounds.train_end)
        if undirected is None:
            undirected = self.config.values.get_bool("undirected")
        graph = build_index(log_events, undirected=undirected)
        features = features or self._node_features(log_events.num_nodes, inputs)
        return Workspace(log_events, graph, bounds, window, features, inputs)

    def _model(self, ws: Workspace, run: RunConfig | None = None, seed: int | None = None) -> GraphMixer:
        run = run or self.config
        return GraphMixer(run.model_config(ws.window), ws.events.d_link, ws.features, seed=run.seed if seed is None else seed)

    def _restore(self, ws: Workspace, prefix: Path) -> GraphMixer:
        header, tensors = load_checkpoint(prefix)
        model = self._model(ws)
        expected = {key: str(value) for key, value in model.header().items()}
        mismatch = [
            f"{key}: checkpoint {header[key]!r}, config {value!r}" for key, value in expected.items() if key in header and header[key] != value
        ]
        if mismatch:
            msg = "checkpoint does not match the configuration: " + "; ".join(mismatch)
            raise ShapeError(msg)
        load_into(model.params, tensors)
        return model

    async def _finish(self, command: str, artifacts: list[Path], inputs: list[Path], extra: dict[str, Any] | None = None) -> None:
        manifest = await write_manifest(self.config.out_dir, command, self.config.echo(), self.config.seed, inputs, artifacts, extra)
        await check_written([*artifacts, manifest])

    # Commands

    def run_version(self) -> str:
        """Show the tgmixer version."""
        return f"{VERSION}\n"

    def run_help(self, command: str = "") -> str:
        """[command] Show available commands or detailed help.

        Usage:
          tgmixer help           List all commands
          tgmixer help <command> Show detailed help
        """
        return get_command_help(self, command) if command else get_help(self)

    def run_ingest(self, path: str = "") -> str:
        """[path] Load an event CSV and print its size, splits and default window.

        Without a path the configured dataset is used. Inputs with fewer than
        10 events are still summarized, with a warning.
        """
        v = self.config.values
        path = path or v.get_str("dataset")
        if not path:
            raise ConfigError(["ingest needs a path argument or a dataset in the run file"])
        events = load_events(path, v.get_bool("has_header"))
        stats = dataset_statistics(events)
        if len(events) < MIN_SPLIT_EVENTS:
            self.log.warning("Only %d events, splits will be degenerate", len(events))
        bounds = chronological_split(len(events), min_events=1)
        window = f"{compute_default_window(events.ts, bounds.train_end):g}" if bounds.train_end >= 2 else "n/a"  # noqa: PLR2004
        lines = [
            styled(f"{stats.num_nodes} nodes, {stats.num_events} events, d_link={stats.d_link}", ReportStyles.HEADER),
            f"split boundaries: ({bounds.train_end}, {bounds.val_end})",
            f"default window T: {window}",
            f"average time gap: {stats.avg_time_gap:g}",
            f"average degree: {stats.avg_degree:g}",
        ]
        return "\n".join(lines) + "\n"

    async def run_generate(self, path: str = "") -> str:
        """[path] Write the bundled synthetic dataset as a JODIE-layout CSV (default <out>/synthetic.csv)."""
        if self.config.values.get_str("dataset"):
            raise ConfigError(["generate writes the synthetic dataset; unset dataset to use it"])
        target = Path(path) if path else self.config.out_dir / "synthetic.csv"
        events, _ = self._events()
        target.parent.mkdir(parents=True, exist_ok=True)
        await asyncio.to_thread(write_events_csv, events, target)
        stats = dataset_statistics(events)
        await self._finish("generate", [target], [], {"dataset": stats.as_dict()})
        return f"wrote {target}: {stats.num_nodes} nodes, {stats.num_events} events\n"

    async def run_train(self) -> str:
        """Train GraphMixer, keep the best validation epoch and report its test metrics.

        Writes history.csv (epoch, split, ap, auc, recall_at_k, mrr, loss, gap),
        the checkpoint (model.manifest / model.bin) and, with
        record_trajectory = true, trajectory.csv.
        """
        ws = self._workspace()
        model = self._model(ws)
        settings = self.config.train_settings()
        result = await train(model, ws.graph, ws.bounds, settings)
        out = self.config.out_dir

        final = flatten_params(model.params)
        if not np.all(np.isfinite(final)):
            msg = "trained parameters are not finite"
            raise ArtifactError(msg)
        header = {**model.header(), "seed": settings.seed, "best_epoch": result.best_epoch}
        artifacts = list(checkpoint_paths(self.config.checkpoint_prefix))
        await asyncio.to_thread(save_checkpoint, self.config.checkpoint_prefix, model.params, header)
        artifacts.append(await write_csv(out / "history.csv", history_rows(result), HISTORY_COLUMNS))
        if settings.record_trajectory:
            rows = [{"t": r.step, "r": r.r, "theta": r.theta} for r in parameter_trajectory(result.snapshots, final)]
            artifacts.append(await write_csv(out / "trajectory.csv", rows, TRAJECTORY_COLUMNS))

        stats = dataset_statistics(ws.events)
        await self._finish("train", artifacts, ws.inputs, {"dataset": stats.as_dict(), "window": ws.window})
        assert result.test is not None
        return f"best epoch {result.best_epoch} (val AP {result.best_val_ap:.4f})\n{result.test.summary()}\n"

    async def run_evaluate(self, checkpoint: str = "") -> str:
        """[checkpoint] Evaluate a checkpoint on every split, with ranking metrics.

        The checkpoint must have been trained with the same model settings; a
        mismatch is reported as a configuration error.
        """
        prefix = Path(checkpoint) if checkpoint else self.config.checkpoint_prefix
        ws = self._workspace()
        model = self._restore(ws, prefix)
        k = self.config.values.get_int("recall_k")
        reports = [
            await evaluate_split(model, ws.graph, ws.bounds.range_of(split), self.config.seed, split, with_ranking=True, k=k)
            for split in Split
        ]
        path = await write_csv(self.config.out_dir / "evaluate.csv", [_metric_row(r) for r in reports], METRIC_COLUMNS)
        await self._finish("evaluate", [path], [*ws.inputs, *checkpoint_paths(prefix)])
        return "\n".join(r.summary() for r in reports) + "\n"

    async def run_ablate(self, axis: str = "") -> str:
        """[axis] Train every setting of one ablation axis and compare test metrics.

        Axes: time_mode, neighbor_mode, undirected, variant, link_encoder,
        time_encoder. Settings run one after another, once per seed in `seeds`
        (or the root seed), and each row reports the mean and standard deviation.
        """
        axis = axis or self.config.values.get_str("axis")
        variants = ablation_variants(axis)
        events = self._events()
        workspaces: dict[bool, Workspace] = {}
        rows = []
        for label, changes in variants:
            run = self.config.replace(**changes)
            undirected = run.values.get_bool("undirected")
            if undirected not in workspaces:
                workspaces[undirected] = self._workspace(undirected, events)
            ws = workspaces[undirected]
            ap, area, mrr = [], [], []
            for seed in self.config.seeds:
                model = self._model(ws, run, seed)
                result = await train(model, ws.graph, ws.bounds, run.train_settings(seed))
                assert result.test is not None
                ap.append(result.test.average_precision)
                area.append(result.test.auc)
                mrr.append(result.test.mrr or 0.0)
            rows.append(
                {
                    "axis": axis,
                    "variant": label,
                    "seeds": len(ap),
                    "test_ap": float(np.mean(ap)),
                    "test_ap_std": float(np.std(ap)),
                    "test_auc": float(np.mean(area)),
                    "test_auc_std": float(np.std(area)),
                    "test_mrr": float(np.mean(mrr)),
                }
            )
            self.log.info("ablation %s=%s: test AP %.4f", axis, label, rows[-1]["test_ap"])
        path = await write_csv(self.config.out_dir / f"ablate_{axis}.csv", rows, ABLATION_COLUMNS)
        await self._finish(f"ablate_{axis}", [path], next(iter(workspaces.values())).inputs)
        return "\n".join(f"{r['variant']:20s} AP {r['test_ap']:.4f} ± {r['test_ap_std']:.4f}" for r in rows) + "\n"

    async def run_synth_time(self) -> str:
        """Classify t1 > t2 from fixed versus trainable time encodings.

        Writes synth_time.csv (mode, step, accuracy, encoder_grad_norm,
        classifier_grad_norm) and synth_time_trajectory.csv (mode, t, r, theta).
        """
        v = self.config.values
        chosen = v.get_str("synth_mode")
        modes = list(TimeEncoderKind) if chosen == "both" else [TimeEncoderKind(chosen)]
        steps = v.get_int("steps") or 300
        rows, trajectory, lines = [], [], []
        for mode in modes:
            result = await asyncio.to_thread(synth_time_experiment, mode, steps, self.config.seed)
            for step, (acc, enc, cls) in enumerate(zip(result.accuracy, result.encoder_grad_norm, result.classifier_grad_norm, strict=True)):
                rows.append({"mode": mode.value, "step": step, "accuracy": acc, "encoder_grad_norm": enc, "classifier_grad_norm": cls})
            if result.snapshots:
                records = parameter_trajectory(result.snapshots, result.snapshots[-1])
                trajectory.extend({"mode": mode.value, "t": r.step, "r": r.r, "theta": r.theta} for r in records)
            lines.append(
                f"{mode.value:10s} final accuracy {result.accuracy[-1]:.4f}"
                f"  peak encoder grad {max(result.encoder_grad_norm):.3g}  peak classifier grad {max(result.classifier_grad_norm):.3g}"
            )
        out = self.config.out_dir
        artifacts = [
            await write_csv(out / "synth_time.csv", rows, ("mode", "step", "accuracy", "encoder_grad_norm", "classifier_grad_norm")),
            await write_csv(out / "synth_time_trajectory.csv", trajectory, ("mode", *TRAJECTORY_COLUMNS)),
        ]
        await self._finish("synth_time", artifacts, [])
        return "\n".join(lines) + "\n"

    async def run_synth_seq(self) -> str:
        """Compare sequence encoders on the duplicated-sequence and length tasks.

        Writes synth_seq.csv (encoder, task, step, accuracy).
        """
        v = self.config.values
        encoders = list(SeqEncoderKind) if v.get_str("seq_encoder") == "all" else [SeqEncoderKind(v.get_str("seq_encoder"))]
        tasks = list(SeqTask) if v.get_str("seq_task") == "all" else [SeqTask(v.get_str("seq_task"))]
        steps = v.get_int("steps") or 500
        rows, lines = [], []
        for encoder in encoders:
            for task in tasks:
                result = await asyncio.to_thread(synth_seq_experiments, encoder, task, steps, self.config.seed)
                rows.extend({"encoder": encoder.value, "task": task.value, "step": i, "accuracy": a} for i, a in enumerate(result.accuracy))
                gap = f"  duplicate gap {result.duplicate_gap:.3g}" if task is SeqTask.IDENTITY else ""
                lines.append(f"{encoder.value:10s} {task.value:9s} final accuracy {result.accuracy[-1]:.4f}{gap}")
        path = await write_csv(self.config.out_dir / "synth_seq.csv", rows, ("encoder", "task", "step", "accuracy"))
        await self._finish("synth_seq", [path], [])
        return "\n".join(lines) + "\n"

    async def run_landscape(self, checkpoint: str = "") -> str:
        """[checkpoint] Training loss over a grid along two filter-normalized random directions.

        Writes landscape.csv (x, y, loss); the grid centre is the checkpoint itself.
        """
        prefix = Path(checkpoint) if checkpoint else self.config.checkpoint_prefix
        ws = self._workspace()
        model = self._restore(ws, prefix)
        v = self.config.values
        train_span = ws.bounds.range_of(Split.TRAIN)
        grid = await asyncio.to_thread(
            loss_landscape, model, ws.graph, train_span, v.get_int("landscape_n"), v.get_float("landscape_span"), self.config.seed
        )
        path = await write_csv(self.config.out_dir / "landscape.csv", grid.rows(), ("x", "y", "loss"))
        center = training_loss(model, ws.graph, train_span, self.config.seed)
        await self._finish("landscape", [path], [*ws.inputs, *checkpoint_paths(prefix)], {"center_loss": center})
        return f"landscape {len(grid.xs)}x{len(grid.ys)}: min {grid.losses.min():.4f} max {grid.losses.max():.4f} centre {center:.4f}\n"

    async def run_trajectory(self) -> str:
        """Train with per-epoch snapshots and write trajectory.csv (t, r, theta) relative to the selected parameters."""
        ws = self._workspace()
        model = self._model(ws)
        settings = dataclasses.replace(self.config.train_settings(), record_trajectory=True)
        result = await train(model, ws.graph, ws.bounds, settings)
        records = parameter_trajectory(result.snapshots, flatten_params(model.params))
        rows = [{"t": r.step, "r": r.r, "theta": r.theta} for r in records]
        path = await write_csv(self.config.out_dir / "trajectory.csv", rows, TRAJECTORY_COLUMNS)
        await self._finish("trajectory", [path], ws.inputs)
        return "\n".join(f"{r.step:4d} r={r.r:.4f} theta={r.theta:.4f}" for r in records) + "\n"

    async def run_gradcheck(self) -> str:
        """Finite-difference check of every parameter group on a 3-pair batch.

        Uses K=4, d_time=8, d_hidden=6, d_link=2 and the trainable time encoder
        on a small generated graph; fails when any relative error exceeds 1e-5.
        """
        seed = self.config.seed
        events = generate_periodic_dataset(num_users=6, num_items=4, num_events=60, d_link=2, seed=seed, min_period=2.0, max_period=8.0)
        run = self.config.replace(k=4, d_time=8, d_hidden=6, time_encoder="trainable")
        ws = self._workspace(run.values.get_bool("undirected"), (events, []), NodeFeatures.one_hot(events.num_nodes))
        model = self._model(ws, run)
        idx = np.arange(len(events) - 3, len(events))
        dst = events.dst[idx].copy()
        dst[1] = sample_negative_dst(dst[1:2], events.dst_lo, events.dst_hi, derive_rng(seed, SeedStream.EVAL_NEGATIVES))[0]
        report = await asyncio.to_thread(
            model_gradcheck, model, ws.graph, events.src[idx], dst, events.ts[idx], np.array([1.0, 0.0, 1.0]), seed
        )
        rows = [{"group": group, "max_rel_error": err} for group, err in sorted(report.per_group.items())]
        path = await write_csv(self.config.out_dir / "gradcheck.csv", rows, ("group", "max_rel_error"))
        await self._finish("gradcheck", [path], [])
        lines = [f"{r['group']:14s} {r['max_rel_error']:.3g}" for r in rows]
        if report.max_rel_error > GRADCHECK_TOLERANCE:
            self.log.error("Gradient check failed: %.3g at %s", report.max_rel_error, report.worst_param)
            raise ReportedError
        return "\n".join([*lines, styled("gradient check passed", ReportStyles.GOOD)]) + "\n"
