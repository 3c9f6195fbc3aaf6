"""Readers and writers for every file format the command line speaks.

CSV values are printed with 9 significant digits so reruns diff cleanly;
every reader reports the offending line number on malformed input.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from typing import Optional, Sequence, TextIO, Union

import numpy as np

from .errors import DataError, ValidationError, VocabularyError
from .identification import EvaluationReport, SurveyRecord, WeightsDoc, index_records
from .inverse import ACTIONS, InferenceResult, ObservedAction
from .scenarios import (
    Concept,
    DefaultWeights,
    RESPONSE_CONCEPTS,
    RESPONSE_VOCABULARY,
    CONCEPT_NAMES,
    quantize_response,
)

PathOrFile = Union[str, TextIO]


def _open_read(source: PathOrFile):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        return open(source, newline=""), True
    return source, False


def _open_write(target: PathOrFile):
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        return open(target, "w", newline=""), True
    return target, False


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


# ---------------------------------------------------------------------------
# survey files

_TERM_COLUMNS = ("belief_term", "goal_term", "emotion_term")
_NUMERIC_COLUMNS = ("belief", "goal", "emotion")


def read_survey(source: PathOrFile) -> list[SurveyRecord]:
    """Parse survey rows; responses either as terms or numeric realisations."""
    fh, close = _open_read(source)
    try:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise DataError("survey file is empty")
        for required in ("participant_id", "scenario_id"):
            if required not in header:
                raise DataError(f"survey file missing column {required!r}")
        if all(c in header for c in _TERM_COLUMNS):
            term_mode = True
        elif all(c in header for c in _NUMERIC_COLUMNS):
            term_mode = False
        else:
            raise DataError(
                "survey file needs either term columns "
                f"{list(_TERM_COLUMNS)} or numeric columns {list(_NUMERIC_COLUMNS)}"
            )
        records = []
        for row in reader:
            line = reader.line_num
            try:
                if term_mode:
                    values = [
                        quantize_response(concept, row[col] or "")
                        for concept, col in zip(RESPONSE_CONCEPTS, _TERM_COLUMNS)
                    ]
                else:
                    values = [float(row[col]) for col in _NUMERIC_COLUMNS]
                records.append(
                    SurveyRecord(
                        participant_id=(row["participant_id"] or "").strip(),
                        scenario_id=(row["scenario_id"] or "").strip(),
                        belief=values[0],
                        goal=values[1],
                        emotion=values[2],
                    )
                )
            except (ValidationError, VocabularyError, TypeError, ValueError) as exc:
                raise DataError(f"survey file line {line}: {exc}") from exc
        if not records:
            raise DataError("survey file has no rows")
        index_records(records)  # raises on duplicate (participant, scenario)
        return records
    finally:
        if close:
            fh.close()


def write_survey(records: Sequence[SurveyRecord], target: PathOrFile, terms: bool = True) -> None:
    """Write survey rows; ``terms=True`` requires responses at scale levels."""
    reverse = {
        c: {level: term for term, level in RESPONSE_VOCABULARY[c].items()}
        for c in RESPONSE_CONCEPTS
    }
    fh, close = _open_write(target)
    try:
        writer = csv.writer(fh)
        if terms:
            writer.writerow(("participant_id", "scenario_id") + _TERM_COLUMNS)
            for rec in records:
                row = [rec.participant_id, rec.scenario_id]
                for concept, value in zip(RESPONSE_CONCEPTS, rec.response):
                    term = reverse[concept].get(value)
                    if term is None:
                        raise ValidationError(
                            f"response {value} for {CONCEPT_NAMES[concept]} is not a "
                            f"scale level; write with terms=False"
                        )
                    row.append(term)
                writer.writerow(row)
        else:
            writer.writerow(("participant_id", "scenario_id") + _NUMERIC_COLUMNS)
            for rec in records:
                writer.writerow(
                    [rec.participant_id, rec.scenario_id]
                    + [_fmt(v) for v in rec.response]
                )
    finally:
        if close:
            fh.close()


# ---------------------------------------------------------------------------
# weights documents


def write_weights_doc(doc: WeightsDoc, target: PathOrFile) -> None:
    payload = {
        "model": doc.model,
        "mode": doc.mode,
        "max_sweeps": doc.max_sweeps,
        "grid": {k: list(v) for k, v in (doc.grid or {}).items()},
        "defaults": asdict(doc.defaults),
        "batches": {
            str(number): {
                "train_sets": list(doc.batch_sets[number][0]),
                "validation_sets": list(doc.batch_sets[number][1]),
                "weights": {
                    pid: {k: float(v) for k, v in w.items()}
                    for pid, w in sorted(doc.batches[number].items())
                },
            }
            for number in sorted(doc.batches)
        },
    }
    fh, close = _open_write(target)
    try:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def read_weights_doc(source: PathOrFile) -> WeightsDoc:
    fh, close = _open_read(source)
    try:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid weights document: {exc}") from exc
    finally:
        if close:
            fh.close()
    try:
        batches = {}
        batch_sets = {}
        for key, entry in payload["batches"].items():
            number = int(key)
            batches[number] = {
                pid: {k: float(v) for k, v in w.items()}
                for pid, w in entry["weights"].items()
            }
            batch_sets[number] = (
                tuple(int(s) for s in entry.get("train_sets", ())),
                tuple(int(s) for s in entry.get("validation_sets", ())),
            )
        defaults = DefaultWeights(**payload.get("defaults", {}))
        return WeightsDoc(
            model=str(payload["model"]),
            batches=batches,
            batch_sets=batch_sets,
            mode=payload.get("mode", "cyclic"),
            grid={k: tuple(v) for k, v in payload.get("grid", {}).items()} or None,
            max_sweeps=int(payload.get("max_sweeps", 3)),
            defaults=defaults,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed weights document: {exc}") from exc


def write_truth_doc(
    truths: dict[str, dict[str, float]], model: str, seed: int, target: PathOrFile
) -> None:
    payload = {
        "model": model,
        "seed": seed,
        "participants": {
            pid: {k: float(v) for k, v in w.items()} for pid, w in sorted(truths.items())
        },
    }
    fh, close = _open_write(target)
    try:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def read_truth_doc(source: PathOrFile) -> tuple[str, dict[str, dict[str, float]]]:
    fh, close = _open_read(source)
    try:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid ground-truth document: {exc}") from exc
    finally:
        if close:
            fh.close()
    try:
        return str(payload["model"]), {
            pid: {k: float(v) for k, v in w.items()}
            for pid, w in payload["participants"].items()
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed ground-truth document: {exc}") from exc


# ---------------------------------------------------------------------------
# evaluation tables


def write_evaluation_wide(reports: Sequence[EvaluationReport], target: PathOrFile) -> None:
    fh, close = _open_write(target)
    try:
        writer = csv.writer(fh)
        writer.writerow(("model", "concept", "batch_1", "batch_2", "batch_3", "overall"))
        for report in reports:
            for concept, cells in report.summary.items():
                writer.writerow(
                    [report.model, concept]
                    + [
                        _fmt(cells[key]) if cells[key] is not None else ""
                        for key in ("batch_1", "batch_2", "batch_3", "overall")
                    ]
                )
    finally:
        if close:
            fh.close()


def write_evaluation_long(reports: Sequence[EvaluationReport], target: PathOrFile) -> None:
    fh, close = _open_write(target)
    try:
        writer = csv.writer(fh)
        writer.writerow(("model", "concept", "batch", "scenario_or_set", "mse"))
        for report in reports:
            for model, concept, batch, scope, value in report.long_rows:
                writer.writerow([model, concept, batch, scope, _fmt(value)])
    finally:
        if close:
            fh.close()


# ---------------------------------------------------------------------------
# observations, history, inference results


def read_observations(source: PathOrFile) -> list[ObservedAction]:
    fh, close = _open_read(source)
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("observation file is empty")
        for required in ("step", "action"):
            if required not in reader.fieldnames:
                raise DataError(f"observation file missing column {required!r}")
        out = []
        for row in reader:
            line = reader.line_num
            try:
                out.append(
                    ObservedAction(
                        action=(row["action"] or "").strip().lower(),
                        step=int(row["step"]),
                    )
                )
            except (ValidationError, TypeError, ValueError) as exc:
                raise DataError(f"observation file line {line}: {exc}") from exc
        if not out:
            raise DataError("observation file has no rows")
        return out
    finally:
        if close:
            fh.close()


def read_history(source: PathOrFile) -> list[tuple[float, float]]:
    """Observer belief/goal estimates: ``step,belief,goal`` starting at 0."""
    fh, close = _open_read(source)
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("history file is empty")
        for required in ("step", "belief", "goal"):
            if required not in reader.fieldnames:
                raise DataError(f"history file missing column {required!r}")
        rows = []
        for row in reader:
            line = reader.line_num
            try:
                rows.append((int(row["step"]), float(row["belief"]), float(row["goal"])))
            except (TypeError, ValueError) as exc:
                raise DataError(f"history file line {line}: {exc}") from exc
        rows.sort(key=lambda r: r[0])
        if [r[0] for r in rows] != list(range(len(rows))):
            raise DataError("history steps must run 0, 1, 2, ... without gaps")
        if len(rows) < 2:
            raise DataError("history must cover at least two steps")
        return [(b, g) for _, b, g in rows]
    finally:
        if close:
            fh.close()


def write_inference(
    result: InferenceResult, observed: ObservedAction, target: PathOrFile
) -> None:
    fh, close = _open_write(target)
    try:
        writer = csv.writer(fh)
        writer.writerow(
            ("predicted", "observed", "discrepancy", "inferred_emotion", "explained_via")
        )
        writer.writerow([
            result.predicted_action,
            observed.action,
            str(result.discrepancy).lower(),
            _fmt(result.inferred_emotion) if result.inferred_emotion is not None else "",
            result.explained_via or "",
        ])
    finally:
        if close:
            fh.close()


# ---------------------------------------------------------------------------
# trajectories


def read_trajectory_csv(source: PathOrFile) -> tuple[tuple[str, ...], np.ndarray]:
    """Parse a trajectory CSV back into (concept names, (steps+1, n) array)."""
    fh, close = _open_read(source)
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("trajectory file is empty") from None
        if not header or header[0] != "step":
            raise DataError("trajectory file must start with a 'step' column")
        names = tuple(header[1:])
        rows = []
        for row in reader:
            try:
                k = int(row[0])
                rows.append([float(v) for v in row[1:]])
            except (IndexError, TypeError, ValueError) as exc:
                raise DataError(f"trajectory file line {reader.line_num}: {exc}") from exc
            if len(rows[-1]) != len(names):
                raise DataError(
                    f"trajectory file line {reader.line_num}: expected "
                    f"{len(names)} values, got {len(rows[-1])}"
                )
            if k != len(rows) - 1:
                raise DataError(
                    f"trajectory file line {reader.line_num}: steps must be "
                    f"consecutive from 0"
                )
        if not rows:
            raise DataError("trajectory file has no rows")
        return names, np.array(rows, dtype=float)
    finally:
        if close:
            fh.close()
