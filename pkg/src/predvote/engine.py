"""Monte Carlo orchestration: simulate, reduce, vote, predict.

Every (generator, iteration) cell owns a private random stream derived
from the master seed, and model fitting never consumes randomness, so runs
are bit-identical for a given (config, data) pair regardless of worker
count or scheduling. Strategy fit failures inside the loop are masked up
to a configurable ceiling instead of aborting the run.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .accuracy import AccuracyMatrix, ErrorTensor, Measure, build_accuracy_matrix
from .dataset import ColumnSchema, StudyFrame
from .errors import ConfigError, DataError, FitError, SimulationError
from .generators import KdeModel, fit_kde, gen_nonparametric, gen_parametric
from .models import ModelSpec, fit
from .prediction import Characteristic, PredictionStrategy, eval_characteristic, plug_in_predict
from .voting import (
    SelectionResult,
    VotingMatrix,
    ecdf_auc_vote,
    evaluative_vote,
    fptp_vote,
    positional_vote,
    scale_rows,
)

_M64 = (1 << 64) - 1
_B_MAX = 1 << 32  # stream id = g * _B_MAX + b stays unique for any b <= 2^32


def _avalanche(z: int) -> int:
    """64-bit splitmix64 finalizer; bijective, so distinct inputs never collide."""
    z &= _M64
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


def derive_stream(master_seed: int, g: int, b: int) -> np.random.Generator:
    """Independent random stream for 1-based generator index g, iteration b.

    Counter-based: the cell id g * 2^32 + b is mixed with the master seed
    through a 64-bit avalanche, so any single cell can be reproduced in
    isolation.
    """
    if g < 1 or b < 1:
        raise ValueError("stream indices are 1-based")
    if b > _B_MAX:
        raise ValueError(f"iteration index exceeds {_B_MAX}")
    stream_id = g * _B_MAX + b
    mixed = _avalanche(_avalanche(int(master_seed) & _M64) ^ stream_id)
    return np.random.Generator(np.random.PCG64(mixed))


@dataclass
class RunConfig:
    """Everything a run needs besides the data itself."""

    generators: list[ModelSpec]
    strategies: list[PredictionStrategy]
    characteristics: list[Characteristic]
    measures: list[Measure]
    iterations: int = 5000
    master_seed: int = 0
    parallelism: int | None = None  # None = one worker per available CPU
    failure_ceiling: float = 0.01
    kde_bandwidth: "str | float" = "silverman"
    schema: ColumnSchema | None = None

    def validate(self) -> None:
        if len(self.generators) < 1:
            raise ConfigError("generators: at least one data-generation model required")
        if len(self.strategies) < 2:
            raise ConfigError("strategies: at least two strategies required")
        if len(self.characteristics) < 1:
            raise ConfigError("characteristics: at least one characteristic required")
        if len(self.measures) < 1:
            raise ConfigError("measures: at least one accuracy measure required")
        if self.iterations < 2:
            raise ConfigError("iterations: need at least 2 Monte Carlo iterations")
        if self.iterations > _B_MAX:
            raise ConfigError(f"iterations: at most {_B_MAX} supported")
        names = [s.name for s in self.strategies]
        if len(set(names)) != len(names):
            raise ConfigError("strategies: names must be unique")
        if not 0.0 <= self.failure_ceiling < 1.0:
            raise ConfigError("failure_ceiling: must lie in [0, 1)")
        if self.parallelism is not None and self.parallelism < 1:
            raise ConfigError("parallelism: must be a positive worker count")


@dataclass
class RunOutput:
    accuracy_matrix: AccuracyMatrix
    w1: VotingMatrix
    w2: VotingMatrix
    w3: VotingMatrix
    selections: dict[str, SelectionResult]
    final_predictions: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)


def generator_label(index: int, spec: ModelSpec) -> str:
    return f"gen{index + 1}_{spec.family}"


def _fit_generators(
    config: RunConfig, frame: StudyFrame
) -> tuple[list, list[KdeModel | None], list[str]]:
    fitted, kdes, labels = [], [], []
    for i, spec in enumerate(config.generators):
        label = generator_label(i, spec)
        labels.append(label)
        try:
            model = fit(spec, frame.x_sample, frame.y_sample)
        except FitError as exc:
            raise ConfigError(f"generator {label!r} cannot be fitted on the sample data: {exc}") from exc
        fitted.append(model)
        if spec.is_parametric:
            kdes.append(None)
        else:
            try:
                kdes.append(fit_kde(model.sample_residuals, config.kde_bandwidth))
            except DataError as exc:
                raise ConfigError(f"generator {label!r}: residual KDE failed: {exc}") from exc
    return fitted, kdes, labels


def _simulate_block(
    frame: StudyFrame,
    generator_model,
    kde: KdeModel | None,
    strategies: list[PredictionStrategy],
    characteristics: list[Characteristic],
    master_seed: int,
    g: int,
    b_lo: int,
    b_hi: int,
) -> tuple[int, int, np.ndarray, np.ndarray]:
    """Compute error slices for iterations b_lo..b_hi-1 (0-based) of generator g."""
    n = frame.n
    x_full = frame.x_full
    count = b_hi - b_lo
    errors = np.zeros((count, len(characteristics), len(strategies)))
    mask = np.zeros((count, len(strategies)), dtype=bool)
    for local_b in range(count):
        b = b_lo + local_b
        rng = derive_stream(master_seed, g + 1, b + 1)
        if kde is None:
            population = gen_parametric(generator_model, x_full, rng, g, b)
        else:
            population = gen_nonparametric(generator_model, x_full, kde, rng, g, b)
        y_gen = population.y_full
        truth = np.array([eval_characteristic(c, y_gen) for c in characteristics])
        y_s_gen = y_gen[:n]
        for p, strategy in enumerate(strategies):
            try:
                predicted = plug_in_predict(strategy, frame, y_s_gen, characteristics)
            except FitError:
                mask[local_b, p] = True
                continue
            errors[local_b, :, p] = predicted - truth
    return g, b_lo, errors, mask


def simulate_errors(config: RunConfig, frame: StudyFrame, workers: int | None = None) -> ErrorTensor:
    """Run the Monte Carlo loop and return the raw error tensor.

    The result is independent of the worker count: every (g, b) cell is a
    pure function of (config, frame).
    """
    config.validate()
    if frame.k < 1:
        raise DataError("run needs at least one out-of-sample unit")
    fitted, kdes, _ = _fit_generators(config, frame)
    g_count = len(config.generators)
    b_count = config.iterations
    workers = workers or config.parallelism or os.cpu_count() or 1

    values = np.zeros((g_count, b_count, len(config.characteristics), len(config.strategies)))
    mask = np.zeros((g_count, b_count, len(config.strategies)), dtype=bool)

    chunk = max(1, -(-b_count // (workers * 4)))
    tasks = [
        (g, lo, min(lo + chunk, b_count))
        for g in range(g_count)
        for lo in range(0, b_count, chunk)
    ]

    def _absorb(result):
        g, b_lo, err_block, mask_block = result
        values[g, b_lo : b_lo + err_block.shape[0]] = err_block
        mask[g, b_lo : b_lo + mask_block.shape[0]] = mask_block

    if workers == 1 or len(tasks) == 1:
        for g, lo, hi in tasks:
            _absorb(
                _simulate_block(
                    frame, fitted[g], kdes[g], config.strategies, config.characteristics,
                    config.master_seed, g, lo, hi,
                )
            )
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _simulate_block,
                    frame, fitted[g], kdes[g], config.strategies, config.characteristics,
                    config.master_seed, g, lo, hi,
                )
                for g, lo, hi in tasks
            ]
            for future in futures:
                _absorb(future.result())

    failure_rate = mask.sum() / mask.size
    if failure_rate > config.failure_ceiling:
        raise SimulationError(
            f"strategy fit failures hit {failure_rate:.2%} of cells, "
            f"above the ceiling of {config.failure_ceiling:.2%}"
        )
    return ErrorTensor(values=values, failure_mask=mask)


def run(config: RunConfig, frame: StudyFrame, workers: int | None = None) -> RunOutput:
    """Full pipeline: simulate, build the accuracy matrix, vote, predict.

    Final plug-in predictions on the real sample are computed for the union
    of the four winner sets.
    """
    started = time.perf_counter()
    config.validate()
    workers = workers or config.parallelism or os.cpu_count() or 1
    tensor = simulate_errors(config, frame, workers=workers)
    gen_labels = [generator_label(i, s) for i, s in enumerate(config.generators)]
    char_labels = [c.name for c in config.characteristics]
    strategy_names = [s.name for s in config.strategies]
    try:
        matrix = build_accuracy_matrix(
            tensor, config.measures, gen_labels, char_labels, strategy_names
        )
    except DataError as exc:
        raise SimulationError(str(exc)) from exc

    w1, fptp_result = fptp_vote(matrix)
    w2, positional_result = positional_vote(matrix)
    w3 = scale_rows(matrix)
    evaluative_result = evaluative_vote(w3)
    ecdf_result = ecdf_auc_vote(w3)
    selections = {
        r.system: r for r in (fptp_result, positional_result, evaluative_result, ecdf_result)
    }

    final_predictions: dict[str, np.ndarray] = {}
    by_name = {s.name: s for s in config.strategies}
    for result in selections.values():
        for name in result.winners:
            if name not in final_predictions:
                try:
                    final_predictions[name] = plug_in_predict(
                        by_name[name], frame, frame.y_sample, config.characteristics
                    )
                except FitError as exc:
                    raise SimulationError(
                        f"winning strategy {name!r} cannot be fitted on the real sample: {exc}"
                    ) from exc

    metadata = {
        "version": __version__,
        "master_seed": config.master_seed,
        "iterations": config.iterations,
        "workers": workers,
        "wall_time_seconds": time.perf_counter() - started,
        "n": frame.n,
        "k": frame.k,
        "q": frame.q,
        "generators": gen_labels,
        "strategies": strategy_names,
        "characteristics": char_labels,
        "measures": [m.label for m in config.measures],
        "effective_iterations": tensor.effective_iterations().tolist(),
        "failure_rate": float(tensor.failure_mask.sum() / tensor.failure_mask.size),
    }
    return RunOutput(
        accuracy_matrix=matrix,
        w1=w1,
        w2=w2,
        w3=w3,
        selections=selections,
        final_predictions=final_predictions,
        metadata=metadata,
    )


# --- configuration document parsing (JSON-compatible tree) ---


def _parse_schema(node: dict) -> ColumnSchema:
    try:
        covariates = tuple((c["name"], c["kind"]) for c in node["covariates"])
        return ColumnSchema(
            response=node["response"], covariates=covariates, sample_flag=node["sample_flag"]
        )
    except (KeyError, TypeError, DataError) as exc:
        raise ConfigError(f"schema: {exc}") from exc


def _parse_model_spec(node: dict, context: str) -> ModelSpec:
    try:
        return ModelSpec(family=node["family"], hyperparams=dict(node.get("hyperparams", {})))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def config_from_dict(doc: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed configuration document."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a mapping")
    known = {
        "schema", "generators", "strategies", "characteristics", "measures",
        "iterations", "master_seed", "parallelism", "failure_ceiling", "kde_bandwidth",
    }
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown configuration field(s): {sorted(unknown)}")
    for required in ("generators", "strategies", "characteristics", "measures"):
        if required not in doc:
            raise ConfigError(f"{required}: missing required field")

    generators = [
        _parse_model_spec(node, f"generators[{i}]") for i, node in enumerate(doc["generators"])
    ]
    strategies = []
    for i, node in enumerate(doc["strategies"]):
        spec = _parse_model_spec(node, f"strategies[{i}]")
        name = node.get("name") or spec.family
        try:
            strategies.append(PredictionStrategy(name=name, model=spec))
        except ValueError as exc:
            raise ConfigError(f"strategies[{i}]: {exc}") from exc
    characteristics = []
    for i, node in enumerate(doc["characteristics"]):
        try:
            characteristics.append(
                Characteristic(kind=node["kind"], p=node.get("p"), name=node.get("name", ""))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"characteristics[{i}]: {exc}") from exc
    measures = []
    for i, node in enumerate(doc["measures"]):
        try:
            measures.append(Measure(kind=node["kind"], p=node.get("p")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"measures[{i}]: {exc}") from exc

    parallelism = doc.get("parallelism")
    if parallelism in ("auto", None):
        parallelism = None
    elif not isinstance(parallelism, int) or parallelism < 1:
        raise ConfigError("parallelism: must be a positive integer or 'auto'")

    try:
        config = RunConfig(
            generators=generators,
            strategies=strategies,
            characteristics=characteristics,
            measures=measures,
            iterations=int(doc.get("iterations", 5000)),
            master_seed=int(doc.get("master_seed", 0)),
            parallelism=parallelism,
            failure_ceiling=float(doc.get("failure_ceiling", 0.01)),
            kde_bandwidth=doc.get("kde_bandwidth", "silverman"),
            schema=_parse_schema(doc["schema"]) if "schema" in doc else None,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    config.validate()
    return config
