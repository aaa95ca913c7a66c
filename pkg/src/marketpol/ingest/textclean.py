"""Review/tweet text normalization.

The cleaning rules run in a fixed order: URLs, RT markers, @-mentions,
hashtag prefixes, emoji, ampersand entities, punctuation/digits/newlines,
whitespace collapse, lowercasing, stopword removal, then truncation.
Texts that end up shorter than the minimum token count are dropped
(returned as None).
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

REVIEW_MIN_TOKENS = 30
TWEET_MIN_TOKENS = 5
MAX_TOKENS = 512

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_RT_RE = re.compile(r"\bRT\b")  # case-sensitive retweet marker
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(\w+)")
_HASHTAG_DROP_RE = re.compile(r"#\w+")
_WS_RE = re.compile(r"\s+")

# removed codepoint ranges: pictographs, emoticons, transport, dingbats,
# misc symbols, flags/regional indicators, variation selectors, ZWJ
_EMOJI_RANGES = (
    (0x1F1E6, 0x1F1FF),
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F700, 0x1F77F),
    (0x1F780, 0x1F7FF),
    (0x1F800, 0x1F8FF),
    (0x1F900, 0x1F9FF),
    (0x1FA00, 0x1FAFF),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
    (0xFE00, 0xFE0F),
    (0x200D, 0x200D),
    (0x20E3, 0x20E3),
)


def _is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


@lru_cache(maxsize=None)
def bundled_stopwords() -> frozenset[str]:
    text = resources.files("marketpol.ingest.data").joinpath("stopwords_en.txt").read_text()
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class CleanConfig:
    #: keep "maga" from "#maga" instead of dropping the whole token
    keep_hashtag_body: bool = True
    stopwords: frozenset[str] = field(default_factory=bundled_stopwords)


def clean_text(
    raw: str,
    min_tokens: int = REVIEW_MIN_TOKENS,
    max_tokens: int = MAX_TOKENS,
    config: CleanConfig | None = None,
) -> list[str] | None:
    if min_tokens < 0 or max_tokens < min_tokens:
        raise ValueError("need 0 <= min_tokens <= max_tokens")
    cfg = config if config is not None else CleanConfig()
    text = _URL_RE.sub(" ", raw)
    text = _RT_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    if cfg.keep_hashtag_body:
        text = _HASHTAG_RE.sub(r"\1", text)
    else:
        text = _HASHTAG_DROP_RE.sub(" ", text)
    text = "".join(" " if _is_emoji(ch) else ch for ch in text)
    # entities decode first so "&amp;" etc. fall to the punctuation pass
    text = html.unescape(text)
    text = "".join(ch if ch.isalpha() or ch.isspace() else " " for ch in text)
    tokens = [t for t in _WS_RE.split(text.lower()) if t and t not in cfg.stopwords]
    tokens = tokens[:max_tokens]
    if len(tokens) < min_tokens or not tokens:
        return None
    return tokens
