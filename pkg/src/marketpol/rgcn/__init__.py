from .checkpoint import load_model, save_model
from .hitl import (
    CLASS_NAMES_2,
    CLASS_NAMES_3,
    STRATA,
    HitlReport,
    Verdict,
    candidate_strata,
    hitl_iterate,
    score_products,
    training_labels,
)
from .lifestyle import lifestyle_score, lifestyle_to_logit, lifestyle_to_probability
from .model import RgcnConfig, RgcnModel, forward_pass, init_params, predict
from .scores import ScoreSet, accept_labels, threshold_curve
from .search import SearchResult, SearchSpace, TrialResult, hyperparameter_search
from .train import Splits, clip_gradients, loss_and_grads, make_splits, train
from .view import RELATIONS, RelGraphView, build_view

__all__ = [
    "load_model",
    "save_model",
    "CLASS_NAMES_2",
    "CLASS_NAMES_3",
    "STRATA",
    "HitlReport",
    "Verdict",
    "candidate_strata",
    "hitl_iterate",
    "score_products",
    "training_labels",
    "lifestyle_score",
    "lifestyle_to_logit",
    "lifestyle_to_probability",
    "RgcnConfig",
    "RgcnModel",
    "forward_pass",
    "init_params",
    "predict",
    "ScoreSet",
    "accept_labels",
    "threshold_curve",
    "SearchResult",
    "SearchSpace",
    "TrialResult",
    "hyperparameter_search",
    "Splits",
    "clip_gradients",
    "loss_and_grads",
    "make_splits",
    "train",
    "RELATIONS",
    "RelGraphView",
    "build_view",
]
