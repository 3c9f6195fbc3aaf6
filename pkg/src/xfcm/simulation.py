"""Synchronous simulation of cognitive maps.

Every state/auxiliary concept j moves at once (Jacobi update) to

    h( sum over inbound linkages of weight(...) * A_cause(k)  +  alpha_j * A_j(k) )

where weights are evaluated against the step-k vector and h clamps to the
concept's admissible interval.  Input and parameter concepts pass through
unchanged.  Networks are compiled once into flat index arrays so a step is a
handful of numpy gathers and one matmul; repeated runs are bit-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, NamedTuple, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import ValidationError
from .network import (
    AFFINE_IN_INTERMEDIATE,
    CONSTANT,
    Network,
    PIECEWISE_SIGN,
    SCALED_BY_INTERMEDIATE,
    network_to_dict,
)
from .validation import check_positive, check_positive_int

_FAMILY_RANK = {CONSTANT: 0, PIECEWISE_SIGN: 1, SCALED_BY_INTERMEDIATE: 2, AFFINE_IN_INTERMEDIATE: 3}


class CompiledNetwork:
    """Flat-array form of a network, specialised for vectorized stepping.

    States are float64 arrays over the concepts in ascending-id order.  All
    arrays are read-only after construction; stepping allocates fresh output,
    so one compiled network can serve concurrent simulations.
    """

    def __init__(self, net: Network):
        self.network = net
        concepts = net.concepts
        self.n = len(concepts)
        self.ids = tuple(c.id for c in concepts)
        self.names = tuple(c.name for c in concepts)
        self.index = {c.id: i for i, c in enumerate(concepts)}
        self.lo = np.array([c.interval[0] for c in concepts])
        self.hi = np.array([c.interval[1] for c in concepts])
        self.updatable = np.array([c.kind.updatable for c in concepts])
        self.alpha = np.array(
            [net.alpha.get(c.id, 0.0) if c.kind.updatable else 0.0 for c in concepts]
        )

        links = sorted(
            net.linkages,
            key=lambda l: (_FAMILY_RANK[l.weight.family], l.effect, l.cause),
        )
        m = len(links)
        self.cause_idx = np.array([self.index[l.cause] for l in links], dtype=np.intp)
        inter = np.array(
            [self.index[l.intermediate] if l.complex else 0 for l in links],
            dtype=np.intp,
        )
        # one-hot effect matrix turns per-linkage contributions into per-concept sums
        self.effect_matrix = np.zeros((m, self.n))
        for row, l in enumerate(links):
            self.effect_matrix[row, self.index[l.effect]] = 1.0

        def segment(family: str) -> slice:
            rows = [i for i, l in enumerate(links) if l.weight.family == family]
            if not rows:
                return slice(0, 0)
            first, last = rows[0], rows[-1]
            assert rows == list(range(first, last + 1))
            return slice(first, last + 1)

        self.seg_const = segment(CONSTANT)
        self.seg_pw = segment(PIECEWISE_SIGN)
        self.seg_scaled = segment(SCALED_BY_INTERMEDIATE)
        self.seg_affine = segment(AFFINE_IN_INTERMEDIATE)

        self.w_const = np.array([l.weight.params[0] for l in links[self.seg_const]])
        pw = links[self.seg_pw]
        self.w_minus = np.array([l.weight.params[0] for l in pw])
        self.w_plus = np.array([l.weight.params[1] for l in pw])
        self.inter_scaled = inter[self.seg_scaled]
        self.w_base = np.array([l.weight.params[0] for l in links[self.seg_scaled]])
        self.inter_affine = inter[self.seg_affine]
        self.w0 = np.array([l.weight.params[0] for l in links[self.seg_affine]])
        self.w1 = np.array([l.weight.params[1] for l in links[self.seg_affine]])

        for arr in (
            self.lo, self.hi, self.updatable, self.alpha, self.cause_idx,
            self.effect_matrix, self.w_const, self.w_minus, self.w_plus,
            self.inter_scaled, self.w_base, self.inter_affine, self.w0, self.w1,
        ):
            arr.setflags(write=False)

    # -- stepping ------------------------------------------------------------

    def step_batch(self, states: np.ndarray) -> np.ndarray:
        """Advance a (runs, n) batch of states by one synchronous step."""
        sc = states[:, self.cause_idx]
        w = np.empty_like(sc)
        w[:, self.seg_const] = self.w_const
        cv = sc[:, self.seg_pw]
        w[:, self.seg_pw] = np.where(
            cv < 0, self.w_minus, np.where(cv > 0, self.w_plus, 0.0)
        )
        w[:, self.seg_scaled] = self.w_base * states[:, self.inter_scaled]
        w[:, self.seg_affine] = self.w0 + self.w1 * states[:, self.inter_affine]
        acc = (w * sc) @ self.effect_matrix
        acc += self.alpha * states
        np.clip(acc, self.lo, self.hi, out=acc)
        return np.where(self.updatable, acc, states)

    def advance(self, states: np.ndarray, steps: int) -> np.ndarray:
        """Run ``steps`` synchronous updates without recording or early stop."""
        out = np.array(states, dtype=float)
        single = out.ndim == 1
        if single:
            out = out[None, :]
        for _ in range(steps):
            out = self.step_batch(out)
        return out[0] if single else out

    def record(self, state: np.ndarray, steps: int) -> np.ndarray:
        """Run exactly ``steps`` updates, returning the (steps+1, n) history."""
        out = np.empty((steps + 1, self.n))
        out[0] = state
        for k in range(steps):
            out[k + 1] = self.step_batch(out[k][None, :])[0]
        return out

    # -- state construction ---------------------------------------------------

    def initial_state(self, values: Optional[Mapping] = None) -> np.ndarray:
        """Build a full state vector: 0 everywhere (projected into each
        concept's interval), overridden by ``values`` keyed by id or name."""
        state = np.clip(np.zeros(self.n), self.lo, self.hi)
        name_index = {n: i for i, n in enumerate(self.names)}
        for key, value in (values or {}).items():
            if key in self.index:
                i = self.index[key]
            elif key in name_index:
                i = name_index[key]
            else:
                raise KeyError(f"unknown concept id {key!r}")
            state[i] = float(value)
        self.check_state(state)
        return state

    def check_state(self, state: np.ndarray) -> np.ndarray:
        state = np.asarray(state, dtype=float)
        if state.shape != (self.n,):
            raise ValidationError(
                f"state must have shape ({self.n},), got {state.shape}"
            )
        if not np.all((state >= self.lo) & (state <= self.hi)):
            bad = int(np.argmax(~((state >= self.lo) & (state <= self.hi))))
            raise ValidationError(
                f"state entry for concept {self.ids[bad]} ({state[bad]}) outside "
                f"its admissible interval [{self.lo[bad]}, {self.hi[bad]}]"
            )
        return state


@lru_cache(maxsize=512)
def compile_network(net: Network) -> CompiledNetwork:
    return CompiledNetwork(net)


def step(net: Network, state) -> np.ndarray:
    """One synchronous update of a full state vector (ascending-id order)."""
    compiled = compile_network(net)
    vec = compiled.check_state(np.asarray(state, dtype=float))
    return compiled.step_batch(vec[None, :])[0]


def advance(net: Network, states, steps: int) -> np.ndarray:
    """Fixed-horizon run with no convergence test; accepts (n,) or (runs, n)."""
    return compile_network(net).advance(np.asarray(states, dtype=float), steps)


# ---------------------------------------------------------------------------
# recorded runs


@dataclass(frozen=True)
class Trajectory:
    """A recorded run: one row per step, one column per concept.

    ``converged_at`` is the first step whose update moved no updatable
    concept by ``epsilon`` or more (None if the run hit max_steps first).
    """

    concept_ids: tuple[int, ...]
    concept_names: tuple[str, ...]
    steps: np.ndarray
    converged_at: Optional[int]
    epsilon: float
    network_digest: str

    def __post_init__(self):
        self.steps.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return self.steps.shape[0] - 1

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    def _column(self, concept_id: int) -> int:
        try:
            return self.concept_ids.index(concept_id)
        except ValueError:
            raise KeyError(f"unknown concept id {concept_id}") from None

    def series(self, concept_id: int) -> np.ndarray:
        return self.steps[:, self._column(concept_id)].copy()

    def value(self, concept_id: int, step: int = -1) -> float:
        return float(self.steps[step, self._column(concept_id)])

    def final_values(self) -> dict[str, float]:
        return dict(zip(self.concept_names, (float(v) for v in self.steps[-1])))

    def to_csv(self, target: Union[str, TextIO]) -> None:
        """Write ``step,<name>,...`` rows, values at 9 significant digits."""
        close = False
        if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
            fh = open(target, "w", newline="")
            close = True
        else:
            fh = target
        try:
            fh.write("step," + ",".join(self.concept_names) + "\n")
            for k, row in enumerate(self.steps):
                fh.write(str(k) + "," + ",".join(format(v, ".9g") for v in row) + "\n")
        finally:
            if close:
                fh.close()


class ConvergedValue(NamedTuple):
    value: float
    converged: bool


def converged_value(traj: Trajectory, concept_id: int) -> ConvergedValue:
    """Last recorded value of a concept, flagged with convergence status."""
    return ConvergedValue(traj.value(concept_id, -1), traj.converged)


def _digest(net: Network, initial: np.ndarray) -> str:
    payload = json.dumps(network_to_dict(net), sort_keys=True, separators=(",", ":"))
    h = hashlib.sha256(payload.encode())
    h.update(initial.tobytes())
    return h.hexdigest()


def simulate(
    net: Network,
    initial: Union[Mapping, Sequence[float], np.ndarray, None] = None,
    max_steps: int = 30,
    epsilon: float = 1e-4,
) -> Trajectory:
    """Record a synchronous run from ``initial``.

    ``initial`` may be a mapping (concept id or name -> value; missing
    concepts start at 0 projected into their interval) or a full vector in
    ascending-id order.  The run stops early at the first step k whose
    largest updatable-concept change is below ``epsilon``; that k is reported
    as ``converged_at``.
    """
    max_steps = check_positive_int(max_steps, "max_steps")
    epsilon = check_positive(epsilon, "epsilon")
    compiled = compile_network(net)
    if initial is None or isinstance(initial, Mapping):
        state = compiled.initial_state(initial)
    else:
        state = compiled.check_state(np.asarray(initial, dtype=float))

    rows = np.empty((max_steps + 1, compiled.n))
    rows[0] = state
    converged_at = None
    upd = compiled.updatable
    k = 0
    for k in range(1, max_steps + 1):
        rows[k] = compiled.step_batch(rows[k - 1][None, :])[0]
        if upd.any():
            delta = float(np.max(np.abs(rows[k, upd] - rows[k - 1, upd])))
        else:
            delta = 0.0
        if delta < epsilon:
            converged_at = k
            break

    return Trajectory(
        concept_ids=compiled.ids,
        concept_names=compiled.names,
        steps=rows[: k + 1].copy(),
        converged_at=converged_at,
        epsilon=epsilon,
        network_digest=_digest(net, state),
    )
