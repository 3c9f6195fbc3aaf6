"""Explaining unexpected actions with a hidden emotional state.

An observer predicts the observed person's action with a simplified network
(emotion paths removed).  When the actual action contradicts the prediction,
candidate initial emotions are injected into the full network and
re-simulated from the first recorded step; candidates whose converged goal
reproduces the observed action are ranked by how closely their re-simulated
belief/goal trajectories match the recorded history, and the best match is
reported.  If no candidate reproduces the action, the candidate whose
converged goal lands nearest the side of the decision threshold implied by
the observation is returned, flagged ``unexplained``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DataError, ValidationError
from .network import Network
from .scenarios import Concept
from .simulation import compile_network
from .validation import check_positive_int, check_unit_interval

#: concepts stripped from the observer's simplified forward model
EMOTION_PATH_CONCEPTS = (
    Concept.EMOTION,
    Concept.TRIGGER2,
    Concept.TRIGGER3,
    Concept.BIAS,
    Concept.TRIGGER1,
)

ACTIONS = ("do", "abstain")


@dataclass(frozen=True)
class ObservedAction:
    """What the observed person actually did, and at which step."""

    action: str
    step: int = 1

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ValidationError(f"action must be one of {ACTIONS}, got {self.action!r}")
        object.__setattr__(self, "step", check_positive_int(self.step, "step"))


@dataclass(frozen=True)
class InferenceResult:
    """Outcome of an inverse-inference pass.

    ``inferred_emotion`` is set only when the observation contradicted the
    prediction.  ``explained_via`` names which recorded trajectories the
    inferred emotion visibly moved ("goal", "belief", or "both");
    ``unexplained`` marks a fallback result in which no candidate emotion
    reproduced the observed action.
    """

    predicted_action: str
    discrepancy: bool
    inferred_emotion: Optional[float] = None
    explained_via: Optional[str] = None
    unexplained: bool = False


def rational_action_selection(goal: float, theta: float = 0.0) -> str:
    """Do the activity iff the converged goal clears the threshold."""
    goal = check_unit_interval(goal, "goal")
    theta = float(theta)
    if not -1.0 < theta < 1.0:
        raise ValidationError(f"theta must lie strictly inside (-1, 1), got {theta}")
    return "do" if goal > theta else "abstain"


def simplified_network(net: Network) -> Network:
    """Drop the emotion-path concepts and every linkage touching them."""
    dropped = {int(c) for c in EMOTION_PATH_CONCEPTS}
    concepts = tuple(c for c in net.concepts if c.id not in dropped)
    if not any(c.id == int(Concept.GOAL) for c in concepts):
        raise ValidationError("network has no goal concept to predict from")
    linkages = tuple(
        l for l in net.linkages
        if l.cause not in dropped
        and l.effect not in dropped
        and (l.intermediate is None or l.intermediate not in dropped)
    )
    alpha = {cid: a for cid, a in net.alpha.items() if cid not in dropped}
    return Network(concepts, linkages, alpha, net.threshold)


def predict_action(
    net: Network,
    initial: Optional[Mapping] = None,
    theta: float = 0.0,
    horizon: int = 30,
) -> str:
    """Forward prediction from a simplified network's converged goal."""
    present = {c.id for c in net.concepts}
    leftover = sorted(present & {int(c) for c in EMOTION_PATH_CONCEPTS})
    if leftover:
        raise ValidationError(
            f"prediction needs the simplified network; emotion-path concepts "
            f"{leftover} are still present"
        )
    compiled = compile_network(net)
    state = compiled.initial_state(initial)
    final = compiled.advance(state, check_positive_int(horizon, "horizon"))
    goal = float(final[compiled.index[int(Concept.GOAL)]])
    return rational_action_selection(goal, theta)


def _candidate_emotions(side: int, step: float) -> list[float]:
    """Grid over one sign side of [-1, 1], ordered by |e| so that the
    smallest magnitude wins loss ties."""
    count = int(round(1.0 / step))
    magnitudes = [round(k * step, 10) for k in range(count + 1)]
    return [side * m if m else 0.0 for m in magnitudes]


def infer_emotion(
    net: Network,
    predicted_action: str,
    observed: ObservedAction,
    history: Sequence[Sequence[float]],
    inputs: Optional[Mapping] = None,
    theta: float = 0.0,
    horizon: int = 30,
    candidate_step: float = 0.1,
) -> InferenceResult:
    """Infer the initial emotion that best explains a contradicted prediction.

    ``history`` holds the observer's per-step (belief, goal) estimates,
    index 0 being the state the observation episode started from; at least
    two steps are required.  ``inputs`` carries the scenario inputs (and any
    other known initial values) by concept id or name.
    """
    if predicted_action not in ACTIONS:
        raise ValidationError(
            f"predicted action must be one of {ACTIONS}, got {predicted_action!r}"
        )
    if observed.action == predicted_action:
        return InferenceResult(predicted_action=predicted_action, discrepancy=False)

    history = [(float(b), float(g)) for b, g in history]
    if len(history) < 2:
        raise DataError(
            f"history must cover at least two steps, got {len(history)}"
        )
    horizon = check_positive_int(horizon, "horizon")
    compiled = compile_network(net)
    try:
        b_col = compiled.index[int(Concept.BELIEF)]
        g_col = compiled.index[int(Concept.GOAL)]
        e_col = compiled.index[int(Concept.EMOTION)]
    except KeyError as exc:
        raise ValidationError(
            "inference needs the full network with belief, goal and emotion"
        ) from exc

    base = dict(inputs or {})
    base[int(Concept.BELIEF)] = history[0][0]
    base[int(Concept.GOAL)] = history[0][1]
    base.pop("belief", None)
    base.pop("goal", None)
    base.pop("emotion", None)

    # an inhibiting emotion explains do->abstain, an exciting one the reverse
    side = -1 if predicted_action == "do" else 1
    lo, hi = compiled.lo[e_col], compiled.hi[e_col]
    steps = max(horizon, len(history) - 1)

    runs: dict[float, np.ndarray] = {}

    def run(e: float) -> np.ndarray:
        if e not in runs:
            values = dict(base)
            values[int(Concept.EMOTION)] = e
            runs[e] = compiled.record(compiled.initial_state(values), steps)
        return runs[e]

    explaining: list[tuple[float, float]] = []  # (history error, e)
    fallback: list[tuple[float, float]] = []  # (goal distance, e)
    implied_goal = theta + 0.1 if observed.action == "do" else theta - 0.1
    for e in _candidate_emotions(side, candidate_step):
        if not lo <= e <= hi:
            continue
        rec = run(e)
        final_goal = float(rec[horizon, g_col])
        action = rational_action_selection(max(-1.0, min(1.0, final_goal)), theta)
        err = float(
            sum(
                (rec[t, b_col] - history[t][0]) ** 2
                + (rec[t, g_col] - history[t][1]) ** 2
                for t in range(1, len(history))
            )
        )
        if action == observed.action:
            explaining.append((err, e))
        fallback.append((abs(final_goal - implied_goal), e))

    if explaining:
        # candidates are visited smallest |e| first, so a strict < keeps the
        # minimal-magnitude explanation on ties
        best_err, best_e = explaining[0]
        for err, e in explaining[1:]:
            if err < best_err:
                best_err, best_e = err, e
        unexplained = False
    else:
        best_err, best_e = fallback[0]
        for err, e in fallback[1:]:
            if err < best_err:
                best_err, best_e = err, e
        unexplained = True

    neutral = run(0.0)
    chosen = run(best_e)
    belief_moved = bool(np.max(np.abs(chosen[:, b_col] - neutral[:, b_col])) > 1e-3)
    goal_moved = bool(np.max(np.abs(chosen[:, g_col] - neutral[:, g_col])) > 1e-3)
    if belief_moved and goal_moved:
        via: Optional[str] = "both"
    elif belief_moved:
        via = "belief"
    elif goal_moved:
        via = "goal"
    else:
        via = None

    return InferenceResult(
        predicted_action=predicted_action,
        discrepancy=True,
        inferred_emotion=float(best_e),
        explained_via=via,
        unexplained=unexplained,
    )
