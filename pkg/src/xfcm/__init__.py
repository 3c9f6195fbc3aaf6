"""Fuzzy cognitive maps with state-dependent weights.

Simulation of belief/goal/emotion dynamics, personalised identification of
linkage weights from survey responses, and inverse inference of hidden
emotions from observed actions.
"""

from .errors import CognitiveMapError, DataError, ValidationError, VocabularyError
from .network import (
    ConceptKind,
    ConceptSpec,
    Linkage,
    Network,
    Realisation,
    WeightFunction,
    evaluate_weight,
    network_from_dict,
    network_from_json,
    network_to_dict,
    network_to_json,
)
from .simulation import (
    CompiledNetwork,
    ConvergedValue,
    Trajectory,
    advance,
    compile_network,
    converged_value,
    simulate,
    step,
)
from .scenarios import (
    Concept,
    CONCEPT_NAMES,
    DEFAULT_WEIGHTS,
    DefaultWeights,
    INPUT_VOCABULARY,
    ModelVariant,
    RESPONSE_LEVELS,
    RESPONSE_VOCABULARY,
    Scenario,
    VARIANTS,
    build_scenario1,
    build_scenario2,
    default_scenarios,
    dequantize_input,
    dequantize_response,
    get_variant,
    quantize_input,
    quantize_response,
    read_scenarios,
    snap_to_levels,
    write_scenarios,
)
from .identification import (
    BATCH_PARTITIONS,
    BatchSplit,
    DEFAULT_TRUTH_POOLS,
    EvaluationReport,
    GridSpec,
    ModelPredictor,
    SurveyRecord,
    WeightsDoc,
    evaluate_batches,
    fit_batches,
    identify,
    identify_population,
    index_records,
    loss,
    make_batches,
    mse_scenario,
    mse_set,
    predict_responses,
    synthesize_participant,
    synthesize_population,
)
from .inverse import (
    EMOTION_PATH_CONCEPTS,
    InferenceResult,
    ObservedAction,
    infer_emotion,
    predict_action,
    rational_action_selection,
    simplified_network,
)
from .io import (
    read_history,
    read_observations,
    read_survey,
    read_trajectory_csv,
    read_truth_doc,
    read_weights_doc,
    write_evaluation_long,
    write_evaluation_wide,
    write_inference,
    write_survey,
    write_truth_doc,
    write_weights_doc,
)
from .estimator import CognitiveMapEstimator

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
