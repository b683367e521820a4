"""Command-line interface: run simulations, re-vote saved matrices, plot ECDFs.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
failure (fit-failure ceiling breached or a winner refit failed).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .accuracy import AccuracyMatrix
from .dataset import load_csv
from .engine import config_from_dict, run
from .errors import ConfigError, DataError, PredvoteError, SimulationError
from .matrix_io import read_ecdf_csv, read_matrix_csv, write_ecdf_csv, write_matrix_csv
from .plots import render_ecdf_svg
from .voting import (
    ECDF_AUC,
    SelectionResult,
    VotingMatrix,
    ecdf_auc_vote,
    ecdf_steps,
    evaluative_vote,
    fptp_vote,
    positional_vote,
    scale_rows,
    stochastic_dominance,
)

_EXIT_CODES = {ConfigError: 2, DataError: 3, SimulationError: 4}


def _tie_break_choice(winners: tuple[str, ...], auc_by_name: dict[str, float]) -> str:
    """Deterministic tie-break: lowest ECDF AUC, then lexicographic name."""
    return min(winners, key=lambda name: (auc_by_name[name], name))


def _selection_block(selections: dict[str, SelectionResult], col_labels: list[str], tie_break: bool) -> dict:
    auc = selections[ECDF_AUC]
    auc_by_name = dict(zip(col_labels, (float(v) for v in auc.criterion_values)))
    block = {
        "criteria": {
            system: {
                name: round(float(v), 3)
                for name, v in zip(col_labels, result.criterion_values)
            }
            for system, result in selections.items()
        },
        "directions": {system: result.direction for system, result in selections.items()},
        "winners": {system: sorted(result.winners) for system, result in selections.items()},
    }
    if tie_break:
        block["tie_break"] = {
            system: _tie_break_choice(result.winners, auc_by_name)
            for system, result in selections.items()
        }
    return block


def _dominance_block(w3: VotingMatrix) -> dict:
    """Stochastic-dominance diagnostics: (better, worse) strategy pairs."""
    names = w3.col_labels
    block = {}
    for order, key in ((1, "first_order"), (2, "second_order")):
        relation = stochastic_dominance(w3, order=order)
        block[key] = [
            [names[i], names[j]]
            for i in range(len(names))
            for j in range(len(names))
            if relation[i, j]
        ]
    return block


def _vote_on_matrix(matrix: AccuracyMatrix) -> tuple[dict[str, SelectionResult], dict[str, VotingMatrix]]:
    w1, fptp_result = fptp_vote(matrix)
    w2, positional_result = positional_vote(matrix)
    w3 = scale_rows(matrix)
    evaluative_result = evaluative_vote(w3)
    ecdf_result = ecdf_auc_vote(w3)
    selections = {
        r.system: r for r in (fptp_result, positional_result, evaluative_result, ecdf_result)
    }
    return selections, {"w1": w1, "w2": w2, "w3": w3}


def _write_voting_artifacts(
    out_dir: Path,
    matrices: dict[str, VotingMatrix],
    selections: dict[str, SelectionResult],
    svg: bool,
) -> dict[str, str]:
    paths: dict[str, str] = {}
    for key in ("w1", "w2", "w3"):
        m = matrices[key]
        path = out_dir / f"{key}.csv"
        write_matrix_csv(path, m.entries, m.row_labels, m.col_labels)
        paths[key] = path.name
    w3 = matrices["w3"]
    steps = {name: ecdf_steps(w3.entries[:, j]) for j, name in enumerate(w3.col_labels)}
    ecdf_path = out_dir / "ecdf.csv"
    write_ecdf_csv(ecdf_path, steps)
    paths["ecdf"] = ecdf_path.name
    if svg:
        aucs = dict(zip(w3.col_labels, (float(v) for v in selections[ECDF_AUC].criterion_values)))
        svg_path = out_dir / "ecdf.svg"
        svg_path.write_text(render_ecdf_svg(steps, aucs), encoding="utf-8")
        paths["ecdf_svg"] = svg_path.name
    return paths


def cmd_run(
    config_path: str,
    data_path: str,
    out_dir: str,
    seed: int | None = None,
    workers: int | None = None,
    tie_break: bool = False,
    svg: bool = False,
) -> int:
    try:
        doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {config_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{config_path}: invalid JSON: {exc}") from exc
    config = config_from_dict(doc)
    if config.schema is None:
        raise ConfigError("schema: required to load the data CSV")
    if seed is not None:
        config.master_seed = seed
    if workers is not None:
        if workers < 1:
            raise ConfigError("workers: must be a positive count")
        config.parallelism = workers

    try:
        frame = load_csv(data_path, config.schema)
    except OSError as exc:
        raise DataError(f"cannot read data file {data_path}: {exc}") from exc

    output = run(config, frame)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix = output.accuracy_matrix
    matrix_path = out / "accuracy_matrix.csv"
    write_matrix_csv(matrix_path, matrix.entries, matrix.row_labels, matrix.col_labels)
    artifact_paths = {"accuracy_matrix": matrix_path.name}
    artifact_paths.update(
        _write_voting_artifacts(
            out, {"w1": output.w1, "w2": output.w2, "w3": output.w3}, output.selections, svg
        )
    )

    report = {
        "version": __version__,
        "metadata": output.metadata,
        **_selection_block(output.selections, matrix.col_labels, tie_break),
        "dominance": _dominance_block(output.w3),
        "final_predictions": {
            name: {
                char: float(v)
                for char, v in zip(output.metadata["characteristics"], values)
            }
            for name, values in output.final_predictions.items()
        },
        "winner_accuracy": _winner_accuracy(matrix, set(output.final_predictions)),
        "artifacts": artifact_paths,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
    print(f"run complete: winners {report['winners']}; artifacts in {out}")
    return 0


def _winner_accuracy(matrix: AccuracyMatrix, winner_names: set[str]) -> dict:
    """Echo each winner's accuracy rows under every generator, characteristic and measure."""
    out: dict[str, list] = {}
    for name in sorted(winner_names):
        j = matrix.col_labels.index(name)
        rows = []
        for label, row in zip(matrix.row_labels, matrix.entries):
            generator, characteristic, measure = (
                label if isinstance(label, (tuple, list)) else (str(label), "", "")
            )
            rows.append(
                {
                    "generator": generator,
                    "characteristic": characteristic,
                    "measure": measure,
                    "value": float(row[j]),
                }
            )
        out[name] = rows
    return out


def cmd_vote(matrix_path: str, out_dir: str, tie_break: bool = False, svg: bool = False) -> int:
    entries, row_labels, col_labels = read_matrix_csv(matrix_path)
    if entries.shape[1] < 2:
        raise DataError(f"{matrix_path}: need at least two strategy columns")
    matrix = AccuracyMatrix(entries=entries, row_labels=row_labels, col_labels=col_labels)
    selections, matrices = _vote_on_matrix(matrix)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifact_paths = _write_voting_artifacts(out, matrices, selections, svg)
    report = {
        "version": __version__,
        "metadata": {
            "source_matrix": str(matrix_path),
            "rows": int(entries.shape[0]),
            "columns": int(entries.shape[1]),
        },
        **_selection_block(selections, col_labels, tie_break),
        "dominance": _dominance_block(matrices["w3"]),
        "artifacts": artifact_paths,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
    print(f"vote complete: winners {report['winners']}; artifacts in {out}")
    return 0


def _auc_from_steps(xs: np.ndarray, cdf: np.ndarray) -> float:
    if xs.size == 0:
        raise DataError("empty ECDF step data")
    if np.any(xs < 0) or np.any(xs > 1) or np.any(cdf < 0) or np.any(cdf > 1):
        raise DataError("ECDF step data must lie in [0, 1]")
    if np.any(np.diff(xs) < 0) or np.any(np.diff(cdf) < 0):
        raise DataError("ECDF steps must be nondecreasing")
    area = 0.0
    for i in range(xs.size):
        upper = xs[i + 1] if i + 1 < xs.size else 1.0
        area += float(cdf[i]) * float(upper - xs[i])
    return area


def cmd_plot_ecdf(input_path: str, out_svg: str) -> int:
    try:
        steps = read_ecdf_csv(input_path)
    except DataError:
        entries, _, col_labels = read_matrix_csv(input_path)
        if np.any(entries < 0) or np.any(entries > 1):
            raise DataError(f"{input_path}: scaled matrix entries must lie in [0, 1]") from None
        steps = {name: ecdf_steps(entries[:, j]) for j, name in enumerate(col_labels)}
    aucs = {name: _auc_from_steps(xs, cdf) for name, (xs, cdf) in steps.items()}
    Path(out_svg).parent.mkdir(parents=True, exist_ok=True)
    Path(out_svg).write_text(render_ecdf_svg(steps, aucs), encoding="utf-8")
    print(f"wrote {out_svg} ({len(steps)} curves)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predvote",
        description="Elect a prediction strategy by voting over simulated ex-ante accuracy.",
    )
    parser.add_argument("--version", action="version", version=f"predvote {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full Monte Carlo election on a data CSV")
    p_run.add_argument("--config", required=True, help="JSON run configuration")
    p_run.add_argument("--data", required=True, help="input data CSV")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the configured master seed")
    p_run.add_argument("--workers", type=int, default=None, help="override the configured worker count")
    p_run.add_argument("--tie-break", action="store_true", help="add a deterministic tie-break to the report")
    p_run.add_argument("--svg", action="store_true", help="also write ecdf.svg")

    p_vote = sub.add_parser("vote", help="re-run the four voting systems on a saved accuracy matrix")
    p_vote.add_argument("matrix", help="labeled accuracy matrix CSV")
    p_vote.add_argument("--out", required=True, help="output directory")
    p_vote.add_argument("--tie-break", action="store_true", help="add a deterministic tie-break to the report")
    p_vote.add_argument("--svg", action="store_true", help="also write ecdf.svg")

    p_plot = sub.add_parser("plot-ecdf", help="render ECDF step curves to a standalone SVG")
    p_plot.add_argument("input", help="scaled voting matrix CSV (w3) or ECDF step CSV")
    p_plot.add_argument("--out", required=True, help="output SVG file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(
                args.config, args.data, args.out,
                seed=args.seed, workers=args.workers, tie_break=args.tie_break, svg=args.svg,
            )
        if args.command == "vote":
            return cmd_vote(args.matrix, args.out, tie_break=args.tie_break, svg=args.svg)
        return cmd_plot_ecdf(args.input, args.out)
    except PredvoteError as exc:
        code = next((c for t, c in _EXIT_CODES.items() if isinstance(exc, t)), 1)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
