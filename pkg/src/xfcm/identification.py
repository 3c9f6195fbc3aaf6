"""Fitting personalised weight vectors to survey responses.

The fit minimises the squared deviation between converged model outputs and
a participant's reported belief/goal/emotion over the training scenarios:

    J(w) = sum over scenarios, sum over the three reported concepts,
           (model output under w - participant response)^2

Model outputs are the 30-step values of a scenario run started from the
scenario's inputs with every other concept at zero; they do not depend on
the participant, so a per-candidate cache makes population sweeps cheap.

Two deterministic grid searches are provided: exhaustive enumeration (ties
broken toward the lexicographically smallest parameter vector in declaration
order) and cyclic coordinate descent (coordinates swept in declaration
order, repeated until a sweep improves J by less than ``tol`` or
``max_sweeps`` is reached).  Validation error is reported as mean squared
error per concept, averaged first over participants for one scenario and
then over the scenarios of a validation set, so values live in [0, 4].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DataError, ValidationError
from .scenarios import (
    Concept,
    CONCEPT_NAMES,
    DEFAULT_WEIGHTS,
    DefaultWeights,
    ModelVariant,
    RESPONSE_CONCEPTS,
    Scenario,
    get_variant,
    scenarios_by_set,
    snap_to_levels,
)
from .simulation import compile_network
from .validation import check_positive_int, check_unit_interval

# ---------------------------------------------------------------------------
# survey records


@dataclass(frozen=True)
class SurveyRecord:
    """One participant's reported internal state for one scenario."""

    participant_id: str
    scenario_id: str
    belief: float
    goal: float
    emotion: float

    def __post_init__(self):
        if not self.participant_id or not self.scenario_id:
            raise ValidationError("participant_id and scenario_id must be non-empty")
        for name in ("belief", "goal", "emotion"):
            object.__setattr__(
                self, name, check_unit_interval(getattr(self, name), name)
            )

    @property
    def response(self) -> tuple[float, float, float]:
        return (self.belief, self.goal, self.emotion)


def index_records(
    records: Sequence[SurveyRecord],
) -> dict[tuple[str, str], SurveyRecord]:
    """Key records by (participant, scenario), rejecting duplicates."""
    out: dict[tuple[str, str], SurveyRecord] = {}
    for rec in records:
        key = (rec.participant_id, rec.scenario_id)
        if key in out:
            raise DataError(
                f"duplicate survey row for participant {key[0]!r}, scenario {key[1]!r}"
            )
        out[key] = rec
    return out


def participants_of(records: Sequence[SurveyRecord]) -> tuple[str, ...]:
    return tuple(sorted({r.participant_id for r in records}))


def response_matrix(
    records: Sequence[SurveyRecord],
    participant_id: str,
    scenarios: Sequence[Scenario],
) -> np.ndarray:
    """(scenarios, 3) response array for one participant; raises DataError on
    missing rows."""
    idx = index_records([r for r in records if r.participant_id == participant_id])
    rows = []
    for sc in scenarios:
        rec = idx.get((participant_id, sc.scenario_id))
        if rec is None:
            raise DataError(
                f"participant {participant_id!r} has no record for scenario "
                f"{sc.scenario_id!r}"
            )
        rows.append(rec.response)
    return np.array(rows, dtype=float).reshape(len(scenarios), 3)


# ---------------------------------------------------------------------------
# model outputs


class ModelPredictor:
    """Converged belief/goal/emotion per scenario for one model variant.

    Outputs are memoised per weight vector; one predictor can serve every
    participant of a batch.
    """

    def __init__(
        self,
        variant,
        scenarios: Sequence[Scenario],
        defaults: DefaultWeights = DEFAULT_WEIGHTS,
        horizon: int = 30,
    ):
        self.variant = get_variant(variant)
        self.scenarios = tuple(scenarios)
        self.defaults = defaults
        self.horizon = check_positive_int(horizon, "horizon")
        compiled = compile_network(self.variant.build(defaults=defaults))
        init = np.zeros((len(self.scenarios), compiled.n))
        for row, sc in enumerate(self.scenarios):
            for cid, value in sc.initial_values(self.variant).items():
                init[row, compiled.index[cid]] = value
        init.setflags(write=False)
        self._init = init
        self._out_cols = [compiled.index[int(c)] for c in RESPONSE_CONCEPTS]
        self._cache: dict[tuple[float, ...], np.ndarray] = {}

    @property
    def param_order(self) -> tuple[str, ...]:
        return self.variant.identified_params

    def key_of(self, weights: Mapping[str, float]) -> tuple[float, ...]:
        try:
            return tuple(float(weights[p]) for p in self.param_order)
        except KeyError as exc:
            raise ValidationError(
                f"weight vector missing parameter {exc.args[0]!r}; "
                f"{self.variant.name} identifies {list(self.param_order)}"
            ) from None

    def outputs(self, weights: Mapping[str, float]) -> np.ndarray:
        return self.outputs_at(self.key_of(weights))

    def outputs_at(self, key: tuple[float, ...]) -> np.ndarray:
        cached = self._cache.get(key)
        if cached is None:
            net = self.variant.build(
                dict(zip(self.param_order, key)), defaults=self.defaults
            )
            final = compile_network(net).advance(self._init, self.horizon)
            cached = np.ascontiguousarray(final[:, self._out_cols])
            cached.setflags(write=False)
            self._cache[key] = cached
        return cached


def predict_responses(
    variant,
    weights: Mapping[str, float],
    scenarios: Sequence[Scenario],
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
) -> np.ndarray:
    """Converged (scenarios, 3) belief/goal/emotion under one weight vector."""
    return ModelPredictor(variant, scenarios, defaults, horizon).outputs(weights).copy()


# ---------------------------------------------------------------------------
# loss


def loss(
    model,
    weights: Mapping[str, float],
    records: Sequence[SurveyRecord],
    training_scenarios: Sequence[Scenario],
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
    predictor: Optional[ModelPredictor] = None,
) -> float:
    """Squared training deviation of one participant's records from the model."""
    if predictor is None:
        predictor = ModelPredictor(model, training_scenarios, defaults, horizon)
    if not predictor.scenarios:
        return 0.0
    pids = participants_of(records)
    if len(pids) != 1:
        raise DataError(
            f"loss expects one participant's records, got {len(pids)}: {pids}"
        )
    resp = response_matrix(records, pids[0], predictor.scenarios)
    out = predictor.outputs(weights)
    return float(((out - resp) ** 2).sum())


# ---------------------------------------------------------------------------
# grid search


@dataclass(frozen=True)
class GridSpec:
    """Per-parameter candidate values plus the search mode.

    ``exhaustive`` enumerates the full product grid; ``cyclic`` runs
    coordinate descent (declaration-order sweeps, stopping once a sweep
    improves the loss by less than ``tol`` or after ``max_sweeps``) from a
    deterministic set of restart points and keeps the best result.
    """

    values: Mapping[str, tuple[float, ...]]
    mode: str = "cyclic"
    max_sweeps: int = 3
    tol: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("cyclic", "exhaustive"):
            raise ValidationError(
                f"grid mode must be 'cyclic' or 'exhaustive', got {self.mode!r}"
            )
        check_positive_int(self.max_sweeps, "max_sweeps")
        cleaned = {}
        for name, vals in dict(self.values).items():
            vals = tuple(float(v) for v in vals)
            if not vals:
                raise ValidationError(f"grid for {name!r} is empty")
            for v in vals:
                check_unit_interval(v, f"grid value for {name!r}")
            cleaned[name] = vals
        if not cleaned:
            raise ValidationError("grid has no parameters")
        object.__setattr__(self, "values", cleaned)

    @classmethod
    def default(
        cls,
        variant,
        levels: int = 9,
        mode: str = "cyclic",
        max_sweeps: int = 3,
    ) -> "GridSpec":
        """Uniform grid over [-1, 1] (9 levels -> step 0.25) for a variant."""
        if int(levels) < 2:
            raise ValidationError(f"grid needs at least 2 levels, got {levels}")
        vals = tuple(float(v) for v in np.linspace(-1.0, 1.0, int(levels)))
        variant = get_variant(variant)
        return cls(
            values={p: vals for p in variant.identified_params},
            mode=mode,
            max_sweeps=max_sweeps,
        )


def _check_grid(grid: GridSpec, variant: ModelVariant) -> None:
    expected = set(variant.identified_params)
    got = set(grid.values)
    if got != expected:
        raise ValidationError(
            f"grid parameters {sorted(got)} do not match {variant.name}'s "
            f"identified set {sorted(expected)}"
        )


def _start_point(
    grid: GridSpec, order: Sequence[str], defaults: DefaultWeights
) -> tuple[float, ...]:
    # deterministic sweep start: grid value nearest the frozen default,
    # ties toward the smaller value
    targets = defaults.identified()
    return tuple(
        min(grid.values[p], key=lambda v: (abs(v - targets[p]), v)) for p in order
    )


def _descent_starts(
    values: Sequence[tuple[float, ...]], nearest_default: tuple[float, ...]
) -> list[tuple[float, ...]]:
    # Coordinate sweeps converge to coordinate-wise local minima, and
    # parameters feeding the same concept (the three trigger gains, say) can
    # trap a single run away from the global grid minimum.  A deterministic
    # set of restarts — the default-nearest point plus every "diagonal" point
    # taking each parameter at the same grid index — covers the landscape
    # cheaply without giving up reproducibility.
    starts = [tuple(nearest_default)]
    for i in range(max(len(v) for v in values)):
        starts.append(tuple(v[min(i, len(v) - 1)] for v in values))
    seen: set = set()
    unique = []
    for s in starts:
        if s not in seen:
            seen.add(s)
            unique.append(s)
    return unique


def _coordinate_descent(
    objective, values: Sequence[tuple[float, ...]], start, max_sweeps: int, tol: float
) -> tuple[tuple[float, ...], float]:
    current = tuple(start)
    current_j = objective(current)
    for _ in range(max_sweeps):
        sweep_start_j = current_j
        for i in range(len(values)):
            best_v, best_j = current[i], current_j
            for v in values[i]:
                cand = current[:i] + (v,) + current[i + 1:]
                j = objective(cand)
                if (j, v) < (best_j, best_v):
                    best_v, best_j = v, j
            current = current[:i] + (best_v,) + current[i + 1:]
            current_j = best_j
        if sweep_start_j - current_j < tol:
            break
    return current, current_j


def _grid_search(objective, grid: GridSpec, order: tuple[str, ...], start) -> tuple[tuple[float, ...], float]:
    values = [grid.values[p] for p in order]
    if grid.mode == "exhaustive":
        # min over (J, vector) implements the lexicographic tie-break and is
        # order-independent, so concurrent evaluation would reduce identically
        best_key = None
        for combo in itertools.product(*values):
            key = (objective(combo), combo)
            if best_key is None or key < best_key:
                best_key = key
        return best_key[1], best_key[0]

    best_key = None
    for s in _descent_starts(values, start):
        combo, j = _coordinate_descent(objective, values, s, grid.max_sweeps, grid.tol)
        key = (j, combo)
        if best_key is None or key < best_key:
            best_key = key
    return best_key[1], best_key[0]


def identify(
    model,
    records: Sequence[SurveyRecord],
    training_scenarios: Sequence[Scenario],
    grid: Optional[GridSpec] = None,
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
    predictor: Optional[ModelPredictor] = None,
) -> dict[str, float]:
    """Grid-search the identified parameters for one participant."""
    variant = get_variant(model)
    if grid is None:
        grid = GridSpec.default(variant)
    _check_grid(grid, variant)
    if predictor is None:
        predictor = ModelPredictor(variant, training_scenarios, defaults, horizon)
    order = variant.identified_params
    pids = participants_of(records)
    if len(pids) != 1:
        raise DataError(
            f"identify expects one participant's records, got {len(pids)}: {pids}"
        )
    resp = response_matrix(records, pids[0], predictor.scenarios)

    def objective(combo: tuple[float, ...]) -> float:
        return float(((predictor.outputs_at(combo) - resp) ** 2).sum())

    best, _ = _grid_search(objective, grid, order, _start_point(grid, order, defaults))
    return dict(zip(order, best))


def identify_population(
    model,
    records: Sequence[SurveyRecord],
    training_scenarios: Sequence[Scenario],
    grid: Optional[GridSpec] = None,
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
    predictor: Optional[ModelPredictor] = None,
) -> dict[str, float]:
    """One weight vector minimising the summed loss over every participant."""
    variant = get_variant(model)
    if grid is None:
        grid = GridSpec.default(variant)
    _check_grid(grid, variant)
    if predictor is None:
        predictor = ModelPredictor(variant, training_scenarios, defaults, horizon)
    pids = participants_of(records)
    if not pids:
        raise DataError("identify_population needs at least one participant")
    responses = np.stack(
        [response_matrix(records, pid, predictor.scenarios) for pid in pids]
    )
    order = variant.identified_params

    def objective(combo: tuple[float, ...]) -> float:
        return float(((predictor.outputs_at(combo)[None] - responses) ** 2).sum())

    best, _ = _grid_search(objective, grid, order, _start_point(grid, order, defaults))
    return dict(zip(order, best))


# ---------------------------------------------------------------------------
# batches


BATCH_PARTITIONS: tuple[tuple[frozenset, frozenset], ...] = (
    (frozenset({3, 4, 5, 6}), frozenset({1, 2})),
    (frozenset({1, 2, 5, 6}), frozenset({3, 4})),
    (frozenset({1, 2, 3, 4, 5}), frozenset({6})),
)


@dataclass(frozen=True)
class BatchSplit:
    """One train/validation partition of the six scenario sets."""

    number: int
    train_sets: frozenset
    validation_sets: frozenset
    training: tuple[Scenario, ...]
    validation: tuple[Scenario, ...]


def make_batches(scenarios: Sequence[Scenario]) -> list[BatchSplit]:
    """The three standard partitions: {3..6}|{1,2}, {1,2,5,6}|{3,4},
    {1..5}|{6}."""
    by_set = scenarios_by_set(scenarios)
    missing = sorted(set(range(1, 7)) - set(by_set))
    if missing:
        raise DataError(f"scenario battery is missing sets {missing}")
    out = []
    for number, (train_sets, val_sets) in enumerate(BATCH_PARTITIONS, start=1):
        training = tuple(sc for sc in scenarios if sc.set_id in train_sets)
        validation = tuple(sc for sc in scenarios if sc.set_id in val_sets)
        out.append(BatchSplit(number, train_sets, val_sets, training, validation))
    return out


# ---------------------------------------------------------------------------
# validation error


def _concept_column(concept) -> int:
    if isinstance(concept, str):
        names = [CONCEPT_NAMES[c] for c in RESPONSE_CONCEPTS]
        if concept.lower() not in names:
            raise ValidationError(
                f"concept must be one of {names}, got {concept!r}"
            )
        return names.index(concept.lower())
    return [int(c) for c in RESPONSE_CONCEPTS].index(int(Concept(concept)))


def _scenario_mses(
    variant,
    concept_col: int,
    scenarios: Sequence[Scenario],
    records: Sequence[SurveyRecord],
    weights_by_participant: Mapping[str, Mapping[str, float]],
    defaults: DefaultWeights,
    horizon: int,
    predictor: Optional[ModelPredictor] = None,
) -> np.ndarray:
    if not weights_by_participant:
        raise DataError("no fitted participants to evaluate")
    if predictor is None:
        predictor = ModelPredictor(variant, scenarios, defaults, horizon)
    idx = index_records(records)
    errors = np.empty((len(weights_by_participant), len(scenarios)))
    for p_row, (pid, weights) in enumerate(sorted(weights_by_participant.items())):
        out = predictor.outputs(weights)[:, concept_col]
        for s_col, sc in enumerate(scenarios):
            rec = idx.get((pid, sc.scenario_id))
            if rec is None:
                raise DataError(
                    f"participant {pid!r} has no record for scenario "
                    f"{sc.scenario_id!r}"
                )
            errors[p_row, s_col] = (out[s_col] - rec.response[concept_col]) ** 2
    return errors.mean(axis=0)


def mse_scenario(
    model,
    concept,
    scenario: Scenario,
    records: Sequence[SurveyRecord],
    weights_by_participant: Mapping[str, Mapping[str, float]],
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
) -> float:
    """Mean over participants of the squared deviation on one scenario."""
    variant = get_variant(model)
    values = _scenario_mses(
        variant, _concept_column(concept), [scenario], records,
        weights_by_participant, defaults, horizon,
    )
    return float(values[0])


def mse_set(
    model,
    concept,
    validation_scenarios: Sequence[Scenario],
    records: Sequence[SurveyRecord],
    weights_by_participant: Mapping[str, Mapping[str, float]],
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
    predictor: Optional[ModelPredictor] = None,
) -> float:
    """Mean of the per-scenario MSE over a validation set (range [0, 4])."""
    if not validation_scenarios:
        raise DataError("validation set is empty")
    variant = get_variant(model)
    values = _scenario_mses(
        variant, _concept_column(concept), validation_scenarios, records,
        weights_by_participant, defaults, horizon, predictor,
    )
    return float(values.mean())


# ---------------------------------------------------------------------------
# batch fitting and the evaluation table


@dataclass
class WeightsDoc:
    """Fitted weights for one model, keyed by batch then participant.

    M4 (population scope) stores a single entry under the key
    ``"population"``; evaluation expands it to every surveyed participant.
    """

    model: str
    batches: dict[int, dict[str, dict[str, float]]]
    batch_sets: dict[int, tuple[tuple[int, ...], tuple[int, ...]]]
    mode: str = "cyclic"
    grid: Optional[dict[str, tuple[float, ...]]] = None
    max_sweeps: int = 3
    defaults: DefaultWeights = DEFAULT_WEIGHTS


def fit_batches(
    model,
    records: Sequence[SurveyRecord],
    scenarios: Sequence[Scenario],
    grid: Optional[GridSpec] = None,
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
    batches: Optional[Sequence[BatchSplit]] = None,
) -> WeightsDoc:
    """Fit every participant (or the population) on each batch's training
    scenarios."""
    variant = get_variant(model)
    if grid is None:
        grid = GridSpec.default(variant)
    if batches is None:
        batches = make_batches(scenarios)
    pids = participants_of(records)
    if not pids:
        raise DataError("survey has no participants")
    fitted: dict[int, dict[str, dict[str, float]]] = {}
    batch_sets: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for split in batches:
        predictor = ModelPredictor(variant, split.training, defaults, horizon)
        if variant.personalized:
            per_batch = {}
            for pid in pids:
                p_records = [r for r in records if r.participant_id == pid]
                per_batch[pid] = identify(
                    variant, p_records, split.training, grid, defaults, horizon,
                    predictor=predictor,
                )
        else:
            per_batch = {
                "population": identify_population(
                    variant, records, split.training, grid, defaults, horizon,
                    predictor=predictor,
                )
            }
        fitted[split.number] = per_batch
        batch_sets[split.number] = (
            tuple(sorted(split.train_sets)),
            tuple(sorted(split.validation_sets)),
        )
    return WeightsDoc(
        model=variant.name,
        batches=fitted,
        batch_sets=batch_sets,
        mode=grid.mode,
        grid={p: grid.values[p] for p in variant.identified_params},
        max_sweeps=grid.max_sweeps,
        defaults=defaults,
    )


@dataclass
class EvaluationReport:
    """Validation MSEs for one model: long rows plus the wide summary."""

    model: str
    #: (model, concept, batch, scenario_id or "overall", mse)
    long_rows: list[tuple[str, str, int, str, float]]
    #: concept -> {"batch_1": .., "batch_2": .., "batch_3": .., "overall": ..}
    summary: dict[str, dict[str, Optional[float]]]


def evaluate_batches(
    doc: WeightsDoc,
    records: Sequence[SurveyRecord],
    scenarios: Sequence[Scenario],
    batch_numbers: Optional[Sequence[int]] = None,
    horizon: int = 30,
) -> EvaluationReport:
    """Validation MSE per concept and batch, plus the scenario-weighted
    aggregate over every validation scenario evaluated."""
    variant = get_variant(doc.model)
    splits = {b.number: b for b in make_batches(scenarios)}
    wanted = sorted(batch_numbers) if batch_numbers else sorted(doc.batches)
    pids = participants_of(records)
    concept_names = [CONCEPT_NAMES[c] for c in RESPONSE_CONCEPTS]
    long_rows: list[tuple[str, str, int, str, float]] = []
    summary: dict[str, dict[str, Optional[float]]] = {
        name: {"batch_1": None, "batch_2": None, "batch_3": None, "overall": None}
        for name in concept_names
    }
    weighted: dict[str, list[tuple[float, int]]] = {n: [] for n in concept_names}

    for number in wanted:
        if number not in doc.batches:
            raise DataError(f"weights document has no batch {number}")
        if number not in splits:
            raise DataError(f"scenario battery defines no batch {number}")
        split = splits[number]
        stored_sets = doc.batch_sets.get(number)
        actual_sets = (
            tuple(sorted(split.train_sets)), tuple(sorted(split.validation_sets))
        )
        if stored_sets is not None and tuple(map(tuple, stored_sets)) != actual_sets:
            raise DataError(
                f"batch {number} partition mismatch: weights document says "
                f"{stored_sets}, scenario battery gives {actual_sets}"
            )
        fitted = doc.batches[number]
        if not variant.personalized:
            population = fitted.get("population")
            if population is None:
                raise DataError(
                    f"{variant.name} weights document must store a 'population' entry"
                )
            fitted = {pid: population for pid in pids}
        predictor = ModelPredictor(variant, split.validation, doc.defaults, horizon)
        for concept, name in zip(RESPONSE_CONCEPTS, concept_names):
            col = _concept_column(name)
            per_scenario = _scenario_mses(
                variant, col, split.validation, records, fitted,
                doc.defaults, horizon, predictor,
            )
            for sc, value in zip(split.validation, per_scenario):
                long_rows.append((doc.model, name, number, sc.scenario_id, float(value)))
            batch_mse = float(per_scenario.mean())
            long_rows.append((doc.model, name, number, "overall", batch_mse))
            summary[name][f"batch_{number}"] = batch_mse
            weighted[name].append((batch_mse, len(split.validation)))

    for name, pairs in weighted.items():
        total = sum(count for _, count in pairs)
        if total:
            summary[name]["overall"] = (
                sum(value * count for value, count in pairs) / total
            )
    return EvaluationReport(model=doc.model, long_rows=long_rows, summary=summary)


# ---------------------------------------------------------------------------
# synthetic participants

#: per-parameter pools for synthetic ground truths; a compact sub-grid of the
#: default 0.25 search grid so recovery is well-posed
DEFAULT_TRUTH_POOLS: dict[str, tuple[float, ...]] = {
    "goal_w_minus": (0.5, 0.75),
    "goal_w_plus": (0.0, 0.25),
    "goal_w": (0.25, 0.5),
    "trigger2_w": (0.25, 0.5, 0.75),
    "trigger3_w_base": (0.25, 0.5, 0.75),
    "trigger1_w_base": (0.25, 0.5, 0.75),
    "emotion_bias_w": (0.0, 0.25, 0.5),
    "goal_bias_w": (0.0, 0.25),
}


def synthesize_participant(
    ground_truth: Mapping[str, float],
    scenarios: Sequence[Scenario],
    model="M1",
    participant_id: str = "p01",
    quantize: bool = True,
    noise_sd: float = 0.0,
    seed: Optional[int] = None,
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
) -> list[SurveyRecord]:
    """Responses a participant governed by ``ground_truth`` would give.

    Deterministic given ``seed``; the seed only feeds the optional response
    noise (off by default).
    """
    variant = get_variant(model)
    outputs = predict_responses(variant, ground_truth, scenarios, defaults, horizon)
    if noise_sd:
        rng = np.random.default_rng(seed)
        outputs = np.clip(outputs + rng.normal(0.0, noise_sd, outputs.shape), -1.0, 1.0)
    records = []
    for sc, row in zip(scenarios, outputs):
        values = [snap_to_levels(v) if quantize else float(v) for v in row]
        records.append(SurveyRecord(participant_id, sc.scenario_id, *values))
    return records


def synthesize_population(
    count: int,
    scenarios: Sequence[Scenario],
    seed: int = 0,
    pools: Optional[Mapping[str, Sequence[float]]] = None,
    model="M1",
    quantize: bool = True,
    noise_sd: float = 0.0,
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
    horizon: int = 30,
) -> tuple[list[SurveyRecord], dict[str, dict[str, float]]]:
    """Draw ``count`` ground-truth vectors and synthesize their surveys.

    Returns (records, truths) with participants p01, p02, ...; each
    parameter is drawn independently from its pool.
    """
    count = check_positive_int(count, "count")
    variant = get_variant(model)
    pools = dict(pools) if pools is not None else dict(DEFAULT_TRUTH_POOLS)
    missing = [p for p in variant.identified_params if p not in pools]
    if missing:
        raise ValidationError(f"truth pools missing parameters: {missing}")
    rng = np.random.default_rng(seed)
    records: list[SurveyRecord] = []
    truths: dict[str, dict[str, float]] = {}
    for i in range(1, count + 1):
        pid = f"p{i:02d}"
        truth = {
            p: float(rng.choice(np.asarray(pools[p], dtype=float)))
            for p in variant.identified_params
        }
        truths[pid] = truth
        records.extend(
            synthesize_participant(
                truth, scenarios, variant, pid, quantize, noise_sd,
                seed=None if not noise_sd else seed + i,
                defaults=defaults, horizon=horizon,
            )
        )
    return records, truths
