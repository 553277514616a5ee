"""CSV ingestion and JSON serialization.

File formats (all UTF-8 with LF line endings):

forecasts CSV   header exactly ``question_id,forecaster_id,probability``;
                one row per (question, forecaster) pair, pairs unique; an
                empty probability field means the forecaster gave no
                forecast.
outcomes CSV    header exactly ``question_id,outcome``; one row per
                question; outcome is the literal string ``+1`` or ``-1``.
model JSON      schema ``ensemble_model.v1``: method, rounds as
                [index, weight] pairs, link name and clip, imputation mode
                and seed, forecaster ids, and the random draws frozen at
                training time.
report JSON     schema ``eval_report.v1`` mirroring EvalReport.

Question order comes from the outcomes file; forecaster order is first
appearance in the forecasts file.  Probabilities are written with 17
significant digits and JSON floats use shortest-round-trip repr, so every
file round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .combiners import EnsembleModel
from .domain import ForecastTable, ImputationPolicy
from .evaluation import EvalReport, QuestionResult
from .links import LinkSpec

__all__ = [
    "DataFormatError",
    "load_table",
    "write_table",
    "load_forecast_rows",
    "save_model",
    "load_model",
    "save_eval_report",
    "load_eval_report",
]

FORECASTS_HEADER = ["question_id", "forecaster_id", "probability"]
OUTCOMES_HEADER = ["question_id", "outcome"]

MODEL_SCHEMA = "ensemble_model.v1"
REPORT_SCHEMA = "eval_report.v1"


class DataFormatError(ValueError):
    """Malformed input data; the message carries file and line context."""


def _fail(path, line, message) -> None:
    raise DataFormatError(f"{path}:{line}: {message}")


def _read_rows(path, header: list[str]):
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            first = next(reader)
        except StopIteration:
            _fail(path, 1, f"missing header; expected {','.join(header)}")
        if first != header:
            _fail(path, 1, f"bad header {','.join(first)!r}; expected {','.join(header)}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                _fail(path, line, f"expected {len(header)} fields, got {len(row)}")
            yield line, row


def load_forecast_rows(path) -> list[tuple[str, str, float | None]]:
    """Parse a forecasts CSV into (question_id, forecaster_id, probability)
    triples, probability None where the field is empty."""
    rows: list[tuple[str, str, float | None]] = []
    seen: set[tuple[str, str]] = set()
    for line, (question_id, forecaster_id, field) in _read_rows(path, FORECASTS_HEADER):
        if not question_id or not forecaster_id:
            _fail(path, line, "question_id and forecaster_id must be non-empty")
        if (question_id, forecaster_id) in seen:
            _fail(path, line, f"duplicate forecast for ({question_id}, {forecaster_id})")
        seen.add((question_id, forecaster_id))
        if field == "":
            rows.append((question_id, forecaster_id, None))
            continue
        try:
            probability = float(field)
        except ValueError:
            _fail(path, line, f"probability {field!r} is not a number")
        if not 0.0 <= probability <= 1.0:
            _fail(path, line, f"probability {field!r} outside [0, 1]")
        rows.append((question_id, forecaster_id, probability))
    return rows


def _load_outcome_rows(path) -> list[tuple[str, int]]:
    rows: list[tuple[str, int]] = []
    seen: set[str] = set()
    for line, (question_id, field) in _read_rows(path, OUTCOMES_HEADER):
        if not question_id:
            _fail(path, line, "question_id must be non-empty")
        if question_id in seen:
            _fail(path, line, f"duplicate outcome for question {question_id}")
        seen.add(question_id)
        if field == "+1":
            rows.append((question_id, 1))
        elif field == "-1":
            rows.append((question_id, -1))
        else:
            _fail(path, line, f"outcome must be '+1' or '-1', got {field!r}")
    return rows


def load_table(forecasts_path, outcomes_path) -> ForecastTable:
    """Assemble a forecast table from a forecasts CSV and an outcomes CSV.

    Questions follow outcome-file order; forecasters follow first
    appearance in the forecasts file.  Every question referenced by a
    forecast must have an outcome row.
    """
    forecast_rows = load_forecast_rows(forecasts_path)
    outcome_rows = _load_outcome_rows(outcomes_path)

    question_index = {qid: i for i, (qid, _) in enumerate(outcome_rows)}
    forecaster_index: dict[str, int] = {}
    for question_id, forecaster_id, _ in forecast_rows:
        if question_id not in question_index:
            raise DataFormatError(
                f"{forecasts_path}: question {question_id!r} has no outcome row")
        if forecaster_id not in forecaster_index:
            forecaster_index[forecaster_id] = len(forecaster_index)

    forecasts = np.full((len(forecaster_index), len(outcome_rows)), np.nan)
    for question_id, forecaster_id, probability in forecast_rows:
        if probability is not None:
            forecasts[forecaster_index[forecaster_id], question_index[question_id]] = probability

    return ForecastTable(
        question_ids=tuple(qid for qid, _ in outcome_rows),
        forecaster_ids=tuple(forecaster_index),
        forecasts=forecasts,
        outcomes=np.array([outcome for _, outcome in outcome_rows], dtype=int),
    )


def write_table(table: ForecastTable, forecasts_path, outcomes_path) -> None:
    """Write a table as the forecasts/outcomes CSV pair.

    Only present cells are written, forecaster-major so that first
    appearance preserves forecaster order; probabilities carry 17
    significant digits.
    """
    with Path(forecasts_path).open("w", newline="\n", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(FORECASTS_HEADER)
        answered = table.answered
        for i, forecaster_id in enumerate(table.forecaster_ids):
            for q, question_id in enumerate(table.question_ids):
                if answered[i, q]:
                    writer.writerow([question_id, forecaster_id,
                                     format(table.forecasts[i, q], ".17g")])
    with Path(outcomes_path).open("w", newline="\n", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(OUTCOMES_HEADER)
        for q, question_id in enumerate(table.question_ids):
            writer.writerow([question_id, "+1" if table.outcomes[q] > 0 else "-1"])


def save_model(model: EnsembleModel, path) -> None:
    """Serialize a trained model as schema ``ensemble_model.v1`` JSON."""
    record = {
        "schema": MODEL_SCHEMA,
        "method": model.method,
        "link": {"name": model.link.name, "clip": model.link.clip},
        "imputation": {"mode": model.imputation.mode, "seed": model.imputation.seed},
        "forecaster_ids": list(model.forecaster_ids),
        "rounds": [[index, weight] for index, weight in model.rounds],
        "frozen_imputations": [[index, question_id, value]
                               for index, question_id, value in model.frozen_imputations],
    }
    with Path(path).open("w", encoding="utf-8") as handle:
        json.dump(record, handle, indent=2)
        handle.write("\n")


def load_model(path) -> EnsembleModel:
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"{path}: file not found")
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON ({exc})") from exc
    if record.get("schema") != MODEL_SCHEMA:
        raise DataFormatError(f"{path}: expected schema {MODEL_SCHEMA!r}, "
                              f"got {record.get('schema')!r}")
    try:
        return EnsembleModel(
            method=record["method"],
            rounds=tuple((int(i), float(w)) for i, w in record["rounds"]),
            link=LinkSpec(record["link"]["name"], float(record["link"]["clip"])),
            imputation=ImputationPolicy(record["imputation"]["mode"],
                                        int(record["imputation"]["seed"])),
            forecaster_ids=tuple(record["forecaster_ids"]),
            frozen_imputations=tuple((int(i), str(q), float(v))
                                     for i, q, v in record["frozen_imputations"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed model record ({exc})") from exc


def save_eval_report(report: EvalReport, path) -> None:
    """Serialize an evaluation report as schema ``eval_report.v1`` JSON."""
    record = {
        "schema": REPORT_SCHEMA,
        "method": report.method,
        "questions": report.questions,
        "prediction_errors": report.prediction_errors,
        "avg_unique_forecasters": report.avg_unique_forecasters,
        "baseline": {
            "best_individual_errors": report.best_individual_errors,
            "mean_individual_errors": report.mean_individual_errors,
        },
        "per_question": [
            {"question_id": r.question_id, "predicted": r.predicted,
             "actual": r.actual, "probability": r.probability}
            for r in report.per_question
        ],
    }
    with Path(path).open("w", encoding="utf-8") as handle:
        json.dump(record, handle, indent=2)
        handle.write("\n")


def load_eval_report(path) -> EvalReport:
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"{path}: file not found")
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON ({exc})") from exc
    if record.get("schema") != REPORT_SCHEMA:
        raise DataFormatError(f"{path}: expected schema {REPORT_SCHEMA!r}, "
                              f"got {record.get('schema')!r}")
    try:
        return EvalReport(
            method=record["method"],
            questions=int(record["questions"]),
            prediction_errors=int(record["prediction_errors"]),
            avg_unique_forecasters=float(record["avg_unique_forecasters"]),
            per_question=tuple(
                QuestionResult(r["question_id"], int(r["predicted"]),
                               int(r["actual"]), float(r["probability"]))
                for r in record["per_question"]
            ),
            best_individual_errors=int(record["baseline"]["best_individual_errors"]),
            mean_individual_errors=float(record["baseline"]["mean_individual_errors"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed report record ({exc})") from exc
