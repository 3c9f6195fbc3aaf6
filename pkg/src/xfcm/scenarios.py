"""The weather-activity theory-of-mind networks and their vocabularies.

Two network layouts model an observed person deciding on an outdoor
activity.  Scenario 1 wires rain-prediction knowledge (rpk) and an internal
bias into belief, belief into goal and two emotion triggers, and emotion back
into goal and bias.  Scenario 2 adds weather-forecaster goodness (gwk)
modulating how strongly rpk drives belief, and an activity preference (gp)
that both drives goal directly and gates a third trigger.

Each layout exists in a *functional* form (sign-dependent belief->goal
weight, intermediate-gated triggers) and a *constant* form in which every
linkage weight is a plain constant.

The linguistic scales map survey terms onto numeric realisations: inputs use
per-concept vocabularies (rpk five terms, gwk three, gp seven) and the three
reported concepts (belief/goal/emotion) share the five-level response scale
{-1, -0.5, 0, 0.5, 1}.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass, field, fields, replace
from enum import IntEnum
from importlib import resources
from typing import Mapping, Optional, Sequence

from .errors import DataError, ValidationError, VocabularyError
from .network import ConceptKind, ConceptSpec, Linkage, Network, WeightFunction
from .validation import check_unit_interval


class Concept(IntEnum):
    """Canonical concept ids shared by every scenario network."""

    BELIEF = 1
    GOAL = 2
    EMOTION = 3
    TRIGGER2 = 4
    TRIGGER3 = 5
    BIAS = 6
    RPK = 7
    GWK = 8
    GP = 9
    TRIGGER1 = 10


CONCEPT_NAMES: dict[Concept, str] = {
    Concept.BELIEF: "belief",
    Concept.GOAL: "goal",
    Concept.EMOTION: "emotion",
    Concept.TRIGGER2: "trigger2",
    Concept.TRIGGER3: "trigger3",
    Concept.BIAS: "bias",
    Concept.RPK: "rpk",
    Concept.GWK: "gwk",
    Concept.GP: "gp",
    Concept.TRIGGER1: "trigger1",
}

_KINDS: dict[Concept, ConceptKind] = {
    Concept.BELIEF: ConceptKind.STATE,
    Concept.GOAL: ConceptKind.STATE,
    Concept.EMOTION: ConceptKind.STATE,
    Concept.TRIGGER2: ConceptKind.AUXILIARY,
    Concept.TRIGGER3: ConceptKind.AUXILIARY,
    Concept.BIAS: ConceptKind.AUXILIARY,
    Concept.TRIGGER1: ConceptKind.AUXILIARY,
    Concept.RPK: ConceptKind.INPUT,
    Concept.GWK: ConceptKind.INPUT,
    Concept.GP: ConceptKind.INPUT,
}

#: reported (survey) concepts, in response-column order
RESPONSE_CONCEPTS = (Concept.BELIEF, Concept.GOAL, Concept.EMOTION)


def concept_spec(c: Concept) -> ConceptSpec:
    return ConceptSpec(id=int(c), name=CONCEPT_NAMES[c], kind=_KINDS[c])


# ---------------------------------------------------------------------------
# linguistic scales

INPUT_VOCABULARY: dict[Concept, dict[str, float]] = {
    Concept.RPK: {
        "Heavy rain": -1.0,
        "Light rain": -0.5,
        "Unknown": 0.0,
        "Cloudy": 0.5,
        "Sunny": 1.0,
    },
    Concept.GWK: {
        "Inaccurate": -0.4,
        "Accurate": 0.2,
        "Very accurate": 0.8,
    },
    Concept.GP: {
        "Dislike a great deal": -1.0,
        "Dislike a moderate amount": -0.66,
        "Dislike a little": -0.33,
        "No preference": 0.0,
        "Like a little": 0.33,
        "Like a moderate amount": 0.66,
        "Like a great deal": 1.0,
    },
}

RESPONSE_LEVELS = (-1.0, -0.5, 0.0, 0.5, 1.0)

RESPONSE_VOCABULARY: dict[Concept, dict[str, float]] = {
    Concept.BELIEF: {
        "Heavy rain": -1.0,
        "Light rain": -0.5,
        "I do not know": 0.0,
        "Partially sunny": 0.5,
        "Sunny": 1.0,
    },
    Concept.GOAL: {
        "I do not want it at all": -1.0,
        "I do not want to do it": -0.5,
        "I have no preference": 0.0,
        "I want to do it": 0.5,
        "I want it a lot": 1.0,
    },
    Concept.EMOTION: {
        "Very unhappy": -1.0,
        "Unhappy": -0.5,
        "Nothing": 0.0,
        "Happy": 0.5,
        "Very happy": 1.0,
    },
}


def _as_concept(concept, table: Mapping[Concept, dict]) -> Concept:
    if isinstance(concept, str):
        for c in table:
            if CONCEPT_NAMES[c] == concept.lower():
                return c
        raise VocabularyError(
            f"no vocabulary for concept {concept!r}; "
            f"expected one of {[CONCEPT_NAMES[c] for c in table]}"
        )
    c = Concept(concept)
    if c not in table:
        raise VocabularyError(f"no vocabulary for concept {CONCEPT_NAMES[c]!r}")
    return c


def _lookup_term(vocab: dict[str, float], term: str, what: str) -> float:
    for known, value in vocab.items():
        if known.lower() == str(term).strip().lower():
            return value
    raise VocabularyError(
        f"unknown {what} term {term!r}; valid terms: {list(vocab)}"
    )


def quantize_input(concept, term: str) -> float:
    """Numeric realisation of an input term (rpk/gwk/gp scales)."""
    c = _as_concept(concept, INPUT_VOCABULARY)
    return _lookup_term(INPUT_VOCABULARY[c], term, CONCEPT_NAMES[c])


def quantize_response(concept, term: str) -> float:
    """Numeric realisation of a survey response term (belief/goal/emotion)."""
    c = _as_concept(concept, RESPONSE_VOCABULARY)
    return _lookup_term(RESPONSE_VOCABULARY[c], term, CONCEPT_NAMES[c])


def snap_to_levels(value: float, levels: Sequence[float] = RESPONSE_LEVELS) -> float:
    """Nearest level; ties break toward the level closer to zero."""
    v = check_unit_interval(value, "value")
    return min(levels, key=lambda L: (abs(v - L), abs(L)))


def dequantize_response(concept, value: float) -> str:
    """Term of the response level nearest ``value`` (ties toward zero)."""
    c = _as_concept(concept, RESPONSE_VOCABULARY)
    vocab = RESPONSE_VOCABULARY[c]
    level = snap_to_levels(value, tuple(vocab.values()))
    for term, lv in vocab.items():
        if lv == level:
            return term
    raise AssertionError("unreachable")


def dequantize_input(concept, value: float) -> str:
    """Term of the input-vocabulary value nearest ``value`` (ties toward zero)."""
    c = _as_concept(concept, INPUT_VOCABULARY)
    vocab = INPUT_VOCABULARY[c]
    level = snap_to_levels(value, tuple(vocab.values()))
    for term, lv in vocab.items():
        if lv == level:
            return term
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# default weights

#: identified-parameter names, shared with the identification module
GOAL_W_MINUS = "goal_w_minus"
GOAL_W_PLUS = "goal_w_plus"
GOAL_W = "goal_w"  # constant-variant replacement for the piecewise pair
TRIGGER2_W = "trigger2_w"
TRIGGER3_W_BASE = "trigger3_w_base"
TRIGGER1_W_BASE = "trigger1_w_base"
EMOTION_BIAS_W = "emotion_bias_w"
GOAL_BIAS_W = "goal_bias_w"


@dataclass(frozen=True)
class DefaultWeights:
    """Calibration-level constants: everything identification does not touch.

    Calibrated once against the qualitative anchors (asymmetric
    goal response to rain knowledge, preference-driven emotion contrast, the
    negative-alignment run ending with mildly positive emotion and a goal
    near -0.5) and then frozen.
    """

    rpk_belief_w: float = 0.8
    bias_belief_w: float = 0.3
    gp_goal_w: float = 0.1
    emotion_goal_w: float = 0.4
    trigger_emotion_w: float = 0.4
    alpha_state: float = 0.2
    alpha_auxiliary: float = 0.0
    # grid-searchable parameters also need defaults for plain simulation runs
    goal_w_minus: float = 0.5
    goal_w_plus: float = 0.1
    goal_w: float = 0.3
    trigger2_w: float = 0.6
    trigger3_w_base: float = 0.8
    trigger1_w_base: float = 0.8
    emotion_bias_w: float = 0.4
    goal_bias_w: float = 0.2

    def identified(self) -> dict[str, float]:
        return {
            GOAL_W_MINUS: self.goal_w_minus,
            GOAL_W_PLUS: self.goal_w_plus,
            GOAL_W: self.goal_w,
            TRIGGER2_W: self.trigger2_w,
            TRIGGER3_W_BASE: self.trigger3_w_base,
            TRIGGER1_W_BASE: self.trigger1_w_base,
            EMOTION_BIAS_W: self.emotion_bias_w,
            GOAL_BIAS_W: self.goal_bias_w,
        }

    def alpha_map(self, concepts: Sequence[Concept]) -> dict[int, float]:
        out = {}
        for c in concepts:
            if _KINDS[c] is ConceptKind.STATE:
                out[int(c)] = self.alpha_state
            elif _KINDS[c] is ConceptKind.AUXILIARY:
                out[int(c)] = self.alpha_auxiliary
        return out


DEFAULT_WEIGHTS = DefaultWeights()


# ---------------------------------------------------------------------------
# network builders

_SCENARIO1_CONCEPTS = (
    Concept.BELIEF, Concept.GOAL, Concept.EMOTION,
    Concept.TRIGGER2, Concept.TRIGGER3, Concept.BIAS, Concept.RPK,
)
_SCENARIO2_CONCEPTS = _SCENARIO1_CONCEPTS + (Concept.GWK, Concept.GP, Concept.TRIGGER1)

_SCENARIO1_PARAM_NAMES = (
    GOAL_W_MINUS, GOAL_W_PLUS, GOAL_W, TRIGGER2_W, TRIGGER3_W_BASE,
    EMOTION_BIAS_W, GOAL_BIAS_W,
)
_SCENARIO2_PARAM_NAMES = _SCENARIO1_PARAM_NAMES + (TRIGGER1_W_BASE,)


def _merge_params(
    provided: Optional[Mapping[str, float]],
    allowed: Sequence[str],
    defaults: DefaultWeights,
) -> dict[str, float]:
    merged = {k: v for k, v in defaults.identified().items() if k in allowed}
    for name, value in (provided or {}).items():
        if name not in allowed:
            raise ValidationError(
                f"unknown weight parameter {name!r}; expected a subset of {list(allowed)}"
            )
        merged[name] = check_unit_interval(value, name)
    missing = [n for n in allowed if n not in merged]
    if missing:
        raise ValidationError(f"missing weight parameters: {missing}")
    return merged


def _shared_linkages(p: Mapping[str, float], functional: bool, d: DefaultWeights):
    """Linkages common to both scenario layouts (all but the rpk drive)."""
    goal_weight = (
        WeightFunction.piecewise_sign(p[GOAL_W_MINUS], p[GOAL_W_PLUS])
        if functional
        else WeightFunction.constant(p[GOAL_W])
    )
    trigger3 = (
        Linkage(Concept.BELIEF, Concept.TRIGGER3,
                WeightFunction.scaled_by_intermediate(p[TRIGGER3_W_BASE]),
                intermediate=Concept.GOAL)
        if functional
        else Linkage(Concept.BELIEF, Concept.TRIGGER3,
                     WeightFunction.constant(p[TRIGGER3_W_BASE]))
    )
    return [
        Linkage(Concept.BIAS, Concept.BELIEF, WeightFunction.constant(d.bias_belief_w)),
        Linkage(Concept.BELIEF, Concept.GOAL, goal_weight),
        Linkage(Concept.BELIEF, Concept.TRIGGER2, WeightFunction.constant(p[TRIGGER2_W])),
        trigger3,
        Linkage(Concept.TRIGGER2, Concept.EMOTION, WeightFunction.constant(d.trigger_emotion_w)),
        Linkage(Concept.TRIGGER3, Concept.EMOTION, WeightFunction.constant(d.trigger_emotion_w)),
        Linkage(Concept.EMOTION, Concept.GOAL, WeightFunction.constant(d.emotion_goal_w)),
        Linkage(Concept.EMOTION, Concept.BIAS, WeightFunction.constant(p[EMOTION_BIAS_W])),
        Linkage(Concept.GOAL, Concept.BIAS, WeightFunction.constant(p[GOAL_BIAS_W])),
    ]


def build_scenario1(
    params: Optional[Mapping[str, float]] = None,
    functional: bool = True,
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
) -> Network:
    """Rain-knowledge scenario: 7 concepts, 10 linkages (1 complex when
    functional)."""
    p = _merge_params(params, _SCENARIO1_PARAM_NAMES, defaults)
    linkages = [
        Linkage(Concept.RPK, Concept.BELIEF, WeightFunction.constant(defaults.rpk_belief_w)),
        *_shared_linkages(p, functional, defaults),
    ]
    return Network(
        concepts=tuple(concept_spec(c) for c in _SCENARIO1_CONCEPTS),
        linkages=tuple(linkages),
        alpha=defaults.alpha_map(_SCENARIO1_CONCEPTS),
    )


def build_scenario2(
    params: Optional[Mapping[str, float]] = None,
    functional: bool = True,
    defaults: DefaultWeights = DEFAULT_WEIGHTS,
) -> Network:
    """Forecaster-and-preference scenario: 10 concepts, 13 linkages
    (3 complex when functional).

    When functional, the rpk->belief weight is affine in gwk with
    w0 = w1 = rpk_belief_w / 2, so it spans [0, rpk_belief_w] as forecaster
    goodness moves across [-1, 1].
    """
    p = _merge_params(params, _SCENARIO2_PARAM_NAMES, defaults)
    half = defaults.rpk_belief_w / 2.0
    rpk_drive = (
        Linkage(Concept.RPK, Concept.BELIEF,
                WeightFunction.affine_in_intermediate(half, half),
                intermediate=Concept.GWK)
        if functional
        else Linkage(Concept.RPK, Concept.BELIEF, WeightFunction.constant(defaults.rpk_belief_w))
    )
    trigger1 = (
        Linkage(Concept.BELIEF, Concept.TRIGGER1,
                WeightFunction.scaled_by_intermediate(p[TRIGGER1_W_BASE]),
                intermediate=Concept.GP)
        if functional
        else Linkage(Concept.BELIEF, Concept.TRIGGER1,
                     WeightFunction.constant(p[TRIGGER1_W_BASE]))
    )
    linkages = [
        rpk_drive,
        *_shared_linkages(p, functional, defaults),
        Linkage(Concept.GP, Concept.GOAL, WeightFunction.constant(defaults.gp_goal_w)),
        trigger1,
        Linkage(Concept.TRIGGER1, Concept.EMOTION, WeightFunction.constant(defaults.trigger_emotion_w)),
    ]
    return Network(
        concepts=tuple(concept_spec(c) for c in _SCENARIO2_CONCEPTS),
        linkages=tuple(linkages),
        alpha=defaults.alpha_map(_SCENARIO2_CONCEPTS),
    )


# ---------------------------------------------------------------------------
# model variants


@dataclass(frozen=True)
class ModelVariant:
    """A (layout, weight-form, fitting-scope) combination.

    M1: scenario 2, functional weights, personalised fit
    M2: scenario 1, functional weights, personalised fit
    M3: scenario 2, constant weights, personalised fit
    M4: scenario 2, functional weights, one population-level fit
    """

    name: str
    scenario: int
    functional: bool
    personalized: bool

    @property
    def identified_params(self) -> tuple[str, ...]:
        if self.functional:
            goal_part: tuple[str, ...] = (GOAL_W_MINUS, GOAL_W_PLUS)
        else:
            goal_part = (GOAL_W,)
        triggers: tuple[str, ...] = (TRIGGER2_W, TRIGGER3_W_BASE)
        if self.scenario == 2:
            triggers = triggers + (TRIGGER1_W_BASE,)
        return goal_part + triggers + (EMOTION_BIAS_W, GOAL_BIAS_W)

    @property
    def input_concepts(self) -> tuple[Concept, ...]:
        if self.scenario == 2:
            return (Concept.RPK, Concept.GWK, Concept.GP)
        return (Concept.RPK,)

    def build(
        self,
        params: Optional[Mapping[str, float]] = None,
        defaults: DefaultWeights = DEFAULT_WEIGHTS,
    ) -> Network:
        builder = build_scenario2 if self.scenario == 2 else build_scenario1
        return builder(params, functional=self.functional, defaults=defaults)


VARIANTS: dict[str, ModelVariant] = {
    "M1": ModelVariant("M1", 2, True, True),
    "M2": ModelVariant("M2", 1, True, True),
    "M3": ModelVariant("M3", 2, False, True),
    "M4": ModelVariant("M4", 2, True, False),
}


def get_variant(name) -> ModelVariant:
    if isinstance(name, ModelVariant):
        return name
    try:
        return VARIANTS[str(name).upper()]
    except KeyError:
        raise ValidationError(
            f"unknown model variant {name!r}; expected one of {sorted(VARIANTS)}"
        ) from None


# ---------------------------------------------------------------------------
# scenario descriptions


@dataclass(frozen=True)
class Scenario:
    """One situation shown to participants: an activity plus input terms."""

    scenario_id: str
    set_id: int
    activity: str
    inputs: Mapping[str, float] = field(default_factory=dict)
    terms: Optional[Mapping[str, str]] = None

    def __post_init__(self):
        if not self.scenario_id:
            raise ValidationError("scenario_id must be non-empty")
        if int(self.set_id) not in range(1, 7):
            raise ValidationError(f"set_id must be 1..6, got {self.set_id}")
        object.__setattr__(self, "set_id", int(self.set_id))
        inputs = {}
        for key, value in dict(self.inputs).items():
            if key not in ("rpk", "gwk", "gp"):
                raise ValidationError(f"unknown scenario input {key!r}")
            inputs[key] = check_unit_interval(value, f"{self.scenario_id}.{key}")
        object.__setattr__(self, "inputs", inputs)
        if self.terms is not None:
            object.__setattr__(self, "terms", dict(self.terms))

    def initial_values(self, variant: ModelVariant) -> dict[int, float]:
        """Input realisations for a model variant, keyed by concept id."""
        return {
            int(c): self.inputs.get(CONCEPT_NAMES[c], 0.0)
            for c in variant.input_concepts
        }

    @classmethod
    def from_terms(
        cls,
        scenario_id: str,
        set_id: int,
        activity: str,
        rpk_term: str = "",
        gwk_term: str = "",
        gp_term: str = "",
    ) -> "Scenario":
        inputs, terms = {}, {}
        for concept, term in (
            (Concept.RPK, rpk_term), (Concept.GWK, gwk_term), (Concept.GP, gp_term)
        ):
            term = (term or "").strip()
            if term:
                inputs[CONCEPT_NAMES[concept]] = quantize_input(concept, term)
                terms[CONCEPT_NAMES[concept]] = term
        return cls(scenario_id, set_id, activity, inputs, terms)


SCENARIO_CSV_HEADER = ("scenario_id", "set_id", "activity", "rpk_term", "gwk_term", "gp_term")


def read_scenarios(source) -> list[Scenario]:
    """Parse a scenario CSV; raises DataError naming the offending line."""
    close = False
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        fh = open(source, newline="")
        close = True
    else:
        fh = source
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("scenario file is empty")
        missing = [c for c in SCENARIO_CSV_HEADER[:3] if c not in reader.fieldnames]
        if missing:
            raise DataError(f"scenario file missing columns: {missing}")
        out = []
        seen = set()
        for row in reader:
            line = reader.line_num
            try:
                sc = Scenario.from_terms(
                    scenario_id=(row.get("scenario_id") or "").strip(),
                    set_id=int(row.get("set_id") or 0),
                    activity=(row.get("activity") or "").strip(),
                    rpk_term=row.get("rpk_term") or "",
                    gwk_term=row.get("gwk_term") or "",
                    gp_term=row.get("gp_term") or "",
                )
            except (ValidationError, VocabularyError, ValueError) as exc:
                raise DataError(f"scenario file line {line}: {exc}") from exc
            if sc.scenario_id in seen:
                raise DataError(f"scenario file line {line}: duplicate id {sc.scenario_id!r}")
            seen.add(sc.scenario_id)
            out.append(sc)
        if not out:
            raise DataError("scenario file has no rows")
        return out
    finally:
        if close:
            fh.close()


def write_scenarios(scenarios: Sequence[Scenario], target) -> None:
    close = False
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        fh = open(target, "w", newline="")
        close = True
    else:
        fh = target
    try:
        writer = csv.writer(fh)
        writer.writerow(SCENARIO_CSV_HEADER)
        for sc in scenarios:
            terms = sc.terms or {}
            writer.writerow([
                sc.scenario_id, sc.set_id, sc.activity,
                terms.get("rpk", ""), terms.get("gwk", ""), terms.get("gp", ""),
            ])
    finally:
        if close:
            fh.close()


def default_scenarios() -> list[Scenario]:
    """The bundled 26-scenario battery (6 sets; one varying input per set)."""
    text = resources.files("xfcm.data").joinpath("scenarios26.csv").read_text()
    return read_scenarios(_io.StringIO(text))


def scenarios_by_set(scenarios: Sequence[Scenario]) -> dict[int, list[Scenario]]:
    out: dict[int, list[Scenario]] = {}
    for sc in scenarios:
        out.setdefault(sc.set_id, []).append(sc)
    return out
