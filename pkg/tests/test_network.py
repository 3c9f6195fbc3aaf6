import math

import pytest
from hypothesis import given, strategies as st

from xfcm import (
    ConceptKind,
    ConceptSpec,
    Linkage,
    Network,
    Realisation,
    ValidationError,
    WeightFunction,
    build_scenario1,
    build_scenario2,
    evaluate_weight,
    network_from_json,
    network_to_dict,
    network_to_json,
)


def _pair():
    return (
        ConceptSpec(1, "drive", ConceptKind.INPUT),
        ConceptSpec(2, "level", ConceptKind.STATE),
    )


# ---------------------------------------------------------------------------
# realisations and concepts


def test_realisation_accepts_the_closed_interval():
    assert Realisation(-1.0) == -1.0
    assert Realisation(1.0) == 1.0
    assert Realisation(0.25) == 0.25


@pytest.mark.parametrize("bad", [1.0000001, -1.5, float("nan"), float("inf")])
def test_realisation_rejects_out_of_range(bad):
    with pytest.raises(ValidationError):
        Realisation(bad)


def test_concept_kind_updatability():
    assert ConceptKind.STATE.updatable
    assert ConceptKind.AUXILIARY.updatable
    assert not ConceptKind.INPUT.updatable
    assert not ConceptKind.PARAMETER.updatable


def test_concept_interval_must_be_ordered_and_bounded():
    ConceptSpec(1, "x", ConceptKind.STATE, interval=(-0.5, 0.5))
    with pytest.raises(ValidationError):
        ConceptSpec(1, "x", ConceptKind.STATE, interval=(0.5, -0.5))
    with pytest.raises(ValidationError):
        ConceptSpec(1, "x", ConceptKind.STATE, interval=(-2.0, 1.0))


# ---------------------------------------------------------------------------
# weight families


def test_piecewise_weight_selects_branch_by_cause_sign():
    fn = WeightFunction.piecewise_sign(0.5, 0.1)
    assert fn(-0.6, 0.0) == 0.5
    assert fn(0.0, 0.0) == 0.0
    assert fn(0.6, 0.0) == 0.1


def test_intermediate_families_scale_with_the_side_concept():
    assert WeightFunction.scaled_by_intermediate(0.8)(-1.0, 0.0, a_intermediate=0.5) == 0.4
    affine = WeightFunction.affine_in_intermediate(0.3, 0.2)
    assert affine(0.0, 0.0, a_intermediate=0.5) == pytest.approx(0.4)
    assert affine(0.0, 0.0, a_intermediate=-1.0) == pytest.approx(0.1)


def test_intermediate_argument_contract():
    with pytest.raises(ValidationError):
        WeightFunction.scaled_by_intermediate(0.8)(0.1, 0.0)
    with pytest.raises(ValidationError):
        WeightFunction.constant(0.5)(0.1, 0.0, a_intermediate=0.2)


def test_affine_coefficients_must_keep_weights_bounded():
    WeightFunction.affine_in_intermediate(0.5, 0.5)
    with pytest.raises(ValidationError):
        WeightFunction.affine_in_intermediate(0.7, 0.5)


@given(
    st.sampled_from(["constant", "piecewise_sign", "scaled_by_intermediate",
                     "affine_in_intermediate"]),
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1),
)
def test_every_family_emits_weights_inside_the_unit_interval(family, a, b, inter):
    if family == "constant":
        fn = WeightFunction.constant(0.7)
    elif family == "piecewise_sign":
        fn = WeightFunction.piecewise_sign(0.5, 0.1)
    elif family == "scaled_by_intermediate":
        fn = WeightFunction.scaled_by_intermediate(0.9)
    else:
        fn = WeightFunction.affine_in_intermediate(0.4, 0.6)
    w = evaluate_weight(fn, a, b, inter if fn.needs_intermediate else None)
    assert -1.0 <= w <= 1.0 and math.isfinite(w)


# ---------------------------------------------------------------------------
# linkages and networks


def test_self_linkage_is_rejected():
    with pytest.raises(ValidationError):
        Linkage(2, 2, WeightFunction.constant(0.5))


def test_complex_flag_tracks_the_intermediate():
    simple = Linkage(1, 2, WeightFunction.constant(0.5))
    assert not simple.complex
    complex_l = Linkage(1, 2, WeightFunction.scaled_by_intermediate(0.5), intermediate=3)
    assert complex_l.complex


def test_network_requires_alpha_for_every_effect():
    drive, level = _pair()
    link = Linkage(1, 2, WeightFunction.constant(0.5))
    with pytest.raises(ValidationError):
        Network((drive, level), (link,), {})
    Network((drive, level), (link,), {2: 0.2})


def test_network_rejects_alpha_on_non_updatable_concepts():
    drive, level = _pair()
    link = Linkage(1, 2, WeightFunction.constant(0.5))
    with pytest.raises(ValidationError):
        Network((drive, level), (link,), {1: 0.5, 2: 0.2})


def test_network_rejects_duplicate_ids_and_unknown_endpoints():
    drive, level = _pair()
    with pytest.raises(ValidationError):
        Network((drive, ConceptSpec(1, "copy", ConceptKind.STATE)))
    with pytest.raises(ValidationError):
        Network((drive, level), (Linkage(1, 9, WeightFunction.constant(0.5)),), {})


def test_network_rejects_effects_on_input_concepts():
    drive, level = _pair()
    with pytest.raises(ValidationError):
        Network((drive, level), (Linkage(2, 1, WeightFunction.constant(0.5)),), {})


def test_at_most_one_linkage_per_direction():
    drive, level = _pair()
    links = (
        Linkage(1, 2, WeightFunction.constant(0.5)),
        Linkage(1, 2, WeightFunction.constant(0.1)),
    )
    with pytest.raises(ValidationError):
        Network((drive, level), links, {2: 0.2})


def test_concepts_are_sorted_by_id_and_alpha_defaults_to_zero():
    drive, level = _pair()
    net = Network((level, drive), (Linkage(1, 2, WeightFunction.constant(0.5)),), {2: 0.2})
    assert [c.id for c in net.concepts] == [1, 2]
    assert net.alpha_of(1) == 0.0
    assert net.alpha_of(2) == 0.2
    with pytest.raises(KeyError):
        net.concept(99)


def test_structural_equality_and_json_round_trip():
    for build in (build_scenario1, build_scenario2):
        net = build()
        again = network_from_json(network_to_json(net))
        assert again == net
        assert hash(again) == hash(net)
        assert network_to_dict(again) == network_to_dict(net)


def test_serialization_preserves_weight_families():
    net = network_from_json(network_to_json(build_scenario2()))
    families = sorted({l.weight.family for l in net.linkages})
    assert families == [
        "affine_in_intermediate",
        "constant",
        "piecewise_sign",
        "scaled_by_intermediate",
    ]
