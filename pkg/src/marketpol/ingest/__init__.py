from .categories import CategoryMap, load_category_map, regroup_categories
from .corpus import ParseReport, parse_corpus, parse_meta, parse_reviews
from .fuzzy import levenshtein, partial_ratio
from .moral import MoralReport, load_moral_scores
from .records import MORAL_COMPONENTS, ProductMeta, ReviewRecord, SeedLabel, moral_vector
from .seeds import MatchReport, SeedMatch, load_seeds_csv, match_seeds
from .textclean import (
    MAX_TOKENS,
    REVIEW_MIN_TOKENS,
    TWEET_MIN_TOKENS,
    CleanConfig,
    bundled_stopwords,
    clean_text,
)

__all__ = [
    "CategoryMap",
    "load_category_map",
    "regroup_categories",
    "ParseReport",
    "parse_corpus",
    "parse_meta",
    "parse_reviews",
    "levenshtein",
    "partial_ratio",
    "MoralReport",
    "load_moral_scores",
    "MORAL_COMPONENTS",
    "ProductMeta",
    "ReviewRecord",
    "SeedLabel",
    "moral_vector",
    "MatchReport",
    "SeedMatch",
    "load_seeds_csv",
    "match_seeds",
    "MAX_TOKENS",
    "REVIEW_MIN_TOKENS",
    "TWEET_MIN_TOKENS",
    "CleanConfig",
    "bundled_stopwords",
    "clean_text",
]
