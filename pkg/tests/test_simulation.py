import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xfcm import (
    Concept,
    ConceptKind,
    ConceptSpec,
    Linkage,
    Network,
    ValidationError,
    WeightFunction,
    build_scenario1,
    build_scenario2,
    compile_network,
    converged_value,
    read_trajectory_csv,
    simulate,
    step,
)


def _drive_level(weight=0.5, alpha=0.5):
    concepts = (
        ConceptSpec(1, "drive", ConceptKind.INPUT),
        ConceptSpec(2, "level", ConceptKind.STATE),
    )
    links = (Linkage(1, 2, WeightFunction.constant(weight)),)
    return Network(concepts, links, {2: alpha})


# ---------------------------------------------------------------------------
# update law oracles


def test_geometric_relaxation_matches_the_closed_form_exactly():
    # level(k+1) = 0.5*drive + 0.5*level(k) with drive=1 gives 1 - 0.5^k,
    # which stays exact in binary floating point
    net = _drive_level()
    traj = simulate(net, {1: 1.0}, max_steps=30, epsilon=1e-300)
    for k in (1, 5, 30):
        assert traj.value(2, k) == 1.0 - 0.5 ** k
    assert traj.value(2) == 1.0 - 2.0 ** -30


def test_two_hand_checked_steps_of_the_second_scenario():
    # rpk=-1, gwk=1, gp=1, everything else 0:
    #   belief(1) = (0.4 + 0.4*1)*(-1)                        = -0.8
    #   goal(1)   = 0.1*1                                     =  0.1
    #   belief(2) = clamp(0.3*0 - 0.8 + 0.2*(-0.8))           = -0.96
    #   goal(2)   = 0.5*(-0.8) + 0.4*0 + 0.1*1 + 0.2*0.1      = -0.28
    #   trigger2(2) = 0.6*(-0.8) = -0.48
    #   trigger3(2) = 0.8*goal(1)*belief(1) = 0.8*0.1*(-0.8)  = -0.064
    #   trigger1(2) = 0.8*gp*belief(1)                        = -0.64
    #   bias(2)     = 0.2*goal(1) + 0.4*emotion(1)            =  0.02
    net = build_scenario2()
    traj = simulate(
        net,
        {Concept.RPK: -1.0, Concept.GWK: 1.0, Concept.GP: 1.0},
        max_steps=2,
        epsilon=1e-300,
    )
    assert traj.value(Concept.BELIEF, 1) == pytest.approx(-0.8)
    assert traj.value(Concept.GOAL, 1) == pytest.approx(0.1)
    assert traj.value(Concept.BELIEF, 2) == pytest.approx(-0.96)
    assert traj.value(Concept.GOAL, 2) == pytest.approx(-0.28)
    assert traj.value(Concept.TRIGGER2, 2) == pytest.approx(-0.48)
    assert traj.value(Concept.TRIGGER3, 2) == pytest.approx(-0.064)
    assert traj.value(Concept.TRIGGER1, 2) == pytest.approx(-0.64)
    assert traj.value(Concept.BIAS, 2) == pytest.approx(0.02)


def test_inputs_never_move():
    traj = simulate(build_scenario2(), {Concept.RPK: -0.5, Concept.GWK: 0.8}, max_steps=10)
    assert np.all(traj.series(Concept.RPK) == -0.5)
    assert np.all(traj.series(Concept.GWK) == 0.8)
    assert np.all(traj.series(Concept.GP) == 0.0)


def test_single_step_equals_first_recorded_row():
    net = build_scenario1()
    compiled = compile_network(net)
    state = compiled.initial_state({Concept.RPK: 1.0})
    assert np.array_equal(step(net, state), compiled.record(state, 1)[1])


def test_batched_stepping_matches_one_at_a_time():
    net = build_scenario2()
    compiled = compile_network(net)
    rng = np.random.default_rng(3)
    batch = np.clip(rng.uniform(-1, 1, size=(8, compiled.n)), compiled.lo, compiled.hi)
    stacked = compiled.step_batch(batch)
    for row in range(8):
        single = compiled.step_batch(batch[row : row + 1])
        # the BLAS kernel may reorder sums between batch shapes, so equality
        # here is numerical, not bitwise
        assert np.allclose(stacked[row], single[0], rtol=0, atol=1e-14)


# ---------------------------------------------------------------------------
# convergence bookkeeping


def test_without_linkages_a_pure_memory_concept_converges_immediately():
    concepts = (
        ConceptSpec(1, "drive", ConceptKind.INPUT),
        ConceptSpec(2, "level", ConceptKind.STATE),
    )
    net = Network(concepts, (), {2: 1.0})
    traj = simulate(net, {1: 0.3, 2: -0.7})
    assert traj.converged_at == 1
    assert traj.steps.shape == (2, 2)
    assert converged_value(traj, 2) == (-0.7, True)


def test_max_steps_bounds_the_recording():
    traj = simulate(_drive_level(), {1: 1.0}, max_steps=1, epsilon=1e-300)
    assert traj.steps.shape[0] == 2
    assert traj.n_steps == 1
    assert not traj.converged


def test_simulate_rejects_bad_arguments():
    net = _drive_level()
    with pytest.raises(ValidationError):
        simulate(net, max_steps=0)
    with pytest.raises(ValidationError):
        simulate(net, epsilon=0.0)
    with pytest.raises(KeyError):
        simulate(net, {"nonexistent": 0.1})
    with pytest.raises(ValidationError):
        simulate(net, {1: 1.5})


def test_trajectory_is_read_only():
    traj = simulate(_drive_level(), {1: 1.0}, max_steps=3)
    with pytest.raises(ValueError):
        traj.steps[0, 0] = 9.0


def test_trajectory_csv_round_trip():
    traj = simulate(build_scenario1(), {Concept.RPK: 1.0}, max_steps=5, epsilon=1e-300)
    buffer = io.StringIO()
    traj.to_csv(buffer)
    names, values = read_trajectory_csv(io.StringIO(buffer.getvalue()))
    assert names == traj.concept_names
    assert values.shape == traj.steps.shape
    # 9 significant digits keep these doubles identical through the text form
    assert np.allclose(values, traj.steps, rtol=1e-8, atol=1e-12)


# ---------------------------------------------------------------------------
# boundedness/determinism properties

_contractive = st.integers(min_value=0, max_value=10 ** 6)


@settings(max_examples=60, deadline=None)
@given(seed=_contractive)
def test_random_networks_stay_bounded_and_deterministic(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    kinds = [ConceptKind.STATE] + [
        (ConceptKind.STATE, ConceptKind.AUXILIARY, ConceptKind.INPUT)[int(rng.integers(3))]
        for _ in range(n - 1)
    ]
    concepts = tuple(ConceptSpec(i + 1, f"c{i + 1}", k) for i, k in enumerate(kinds))
    updatable = [c.id for c in concepts if c.kind.updatable]
    ids = [c.id for c in concepts]
    linkages = []
    seen = set()
    for _ in range(int(rng.integers(0, 12))):
        effect = int(rng.choice(updatable))
        cause = int(rng.choice([i for i in ids if i != effect]))
        if (cause, effect) in seen:
            continue
        seen.add((cause, effect))
        linkages.append(Linkage(cause, effect, WeightFunction.constant(float(rng.uniform(-1, 1)))))
    net = Network(concepts, tuple(linkages), {i: float(rng.uniform(0, 1)) for i in updatable})
    init = {cid: float(rng.uniform(-1, 1)) for cid in ids}
    first = simulate(net, init, max_steps=40, epsilon=1e-300)
    second = simulate(net, init, max_steps=40, epsilon=1e-300)
    assert np.all(first.steps >= -1.0) and np.all(first.steps <= 1.0)
    assert np.array_equal(first.steps, second.steps)


@settings(max_examples=30, deadline=None)
@given(
    drive=st.floats(-1, 1, allow_nan=False),
    weight=st.floats(-0.9, 0.9, allow_nan=False),
    alpha=st.floats(0, 0.9, allow_nan=False),
)
def test_contractive_single_loop_reaches_its_fixed_point(drive, weight, alpha):
    # with |weight| + alpha < 1 the unclamped map is a contraction whose fixed
    # point weight*drive/(1-alpha) already lies inside [-1, 1]
    if abs(weight) + alpha >= 1.0:
        weight *= (1.0 - alpha) / (abs(weight) + alpha + 1e-9)
    net = _drive_level(weight=weight, alpha=alpha)
    traj = simulate(net, {1: drive}, max_steps=200, epsilon=1e-12)
    expected = weight * drive / (1.0 - alpha)
    assert traj.value(2) == pytest.approx(expected, abs=1e-10)


def test_scenario_networks_stay_bounded_for_extreme_inputs():
    for net in (build_scenario1(), build_scenario2()):
        names = {c.name for c in net.concepts}
        for sign in (-1.0, 1.0):
            init = {n: sign for n in names & {"rpk", "gwk", "gp"}}
            init["goal"] = sign
            traj = simulate(net, init, max_steps=60, epsilon=1e-300)
            assert np.all(traj.steps >= -1.0) and np.all(traj.steps <= 1.0)


def test_compiled_networks_are_cached_per_structure():
    assert compile_network(build_scenario1()) is compile_network(build_scenario1())
    assert compile_network(build_scenario1()) is not compile_network(build_scenario2())
