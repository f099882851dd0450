"""Temporal ontologies, data instances, canonical models, and query languages."""

from .syntax import (
    AboxWord,
    Axiom,
    Concept,
    OmqSpec,
    Ontology,
    atom,
    conj,
    parse_abox,
    parse_omq_file,
    parse_ontology,
    parse_query,
)
from .transforms import normalize_horn, remove_bot, specific_to_boolean
from .chase import CanonicalWindow, certain_answer, chase_canonical
from .types import QType, enumerate_types, omq_language_dfa, type_nfa

__all__ = [
    "AboxWord",
    "Axiom",
    "CanonicalWindow",
    "Concept",
    "OmqSpec",
    "Ontology",
    "QType",
    "atom",
    "certain_answer",
    "chase_canonical",
    "conj",
    "enumerate_types",
    "normalize_horn",
    "omq_language_dfa",
    "parse_abox",
    "parse_omq_file",
    "parse_ontology",
    "parse_query",
    "remove_bot",
    "specific_to_boolean",
    "type_nfa",
]
