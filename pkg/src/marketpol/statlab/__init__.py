from .betareg import (
    BetaFit,
    beta_fit,
    beta_hessian,
    beta_loglik,
    beta_score,
    beta_score_obs,
)
from .features import (
    DEFAULT_FORMULA,
    MIN_REVIEWS_PER_AUTHOR,
    FeatureTable,
    build_feature_table,
    product_politics,
)
from .report import CoefficientRow, coefficient_report, report_text, save_report_csv
from .transforms import (
    GOLDEN_TOL,
    LAMBDA_BRACKET,
    MomentDiagnostics,
    standardize,
    yeo_johnson,
    yeo_johnson_transform,
)

__all__ = [
    "BetaFit",
    "beta_fit",
    "beta_hessian",
    "beta_loglik",
    "beta_score",
    "beta_score_obs",
    "DEFAULT_FORMULA",
    "MIN_REVIEWS_PER_AUTHOR",
    "FeatureTable",
    "build_feature_table",
    "product_politics",
    "CoefficientRow",
    "coefficient_report",
    "report_text",
    "save_report_csv",
    "GOLDEN_TOL",
    "LAMBDA_BRACKET",
    "MomentDiagnostics",
    "standardize",
    "yeo_johnson",
    "yeo_johnson_transform",
]
