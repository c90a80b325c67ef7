"""Competing LaTeX macro conventions: extraction, changeovers and author fights."""

from ._macroconv import (
    ChangeoverParams,
    ChangeoverRecord,
    Corpus,
    FightRecord,
    GapBucket,
    GapTable,
    InputError,
    MacroDefinition,
    betweenness,
    binomial_test,
    extract_definitions,
    logistic_fit,
    normalize_author,
    run,
    synth,
    win_rate_by_gap,
)

__all__ = [
    "ChangeoverParams",
    "ChangeoverRecord",
    "Corpus",
    "FightRecord",
    "GapBucket",
    "GapTable",
    "InputError",
    "MacroDefinition",
    "betweenness",
    "binomial_test",
    "extract_definitions",
    "logistic_fit",
    "normalize_author",
    "run",
    "synth",
    "win_rate_by_gap",
]
