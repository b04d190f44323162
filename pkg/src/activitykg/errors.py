"""Shared exception types for the pipeline and stores."""

from __future__ import annotations


class ActivityKGError(Exception):
    """Base class for all package errors."""


class ParseError(ActivityKGError):
    """Malformed input text (ontology file, graph export, payloads)."""


class SchemaError(ActivityKGError):
    """Ontology violates its own structural rules."""


class EmptyContent(ActivityKGError):
    """Activity record carries no usable text at all."""


class EmptyInput(ActivityKGError):
    """Embedding requested for blank text."""


class ProviderTimeout(ActivityKGError):
    """Provider unreachable after the configured retries."""


class ProviderRejected(ActivityKGError):
    """Provider answered with a non-success, non-retryable status."""


class ExtractionFormatError(ActivityKGError):
    """Provider output did not parse as the expected line format."""


class DimensionMismatch(ActivityKGError):
    """Vector dimension differs from the index dimension."""


class UnknownEntity(ActivityKGError):
    """Entity id not present in the graph store."""


class IntegrityError(ActivityKGError):
    """Graph import or replay references a missing endpoint."""


class DanglingEndpoint(ActivityKGError):
    """Relation endpoint without a resolution outcome (pipeline bug)."""


class NoConceptsFound(ActivityKGError):
    """Expertise query matched no concept node in the graph."""


class TranslationError(ActivityKGError):
    """Natural-language analytics query could not be parsed."""


class UnsupportedQuery(ActivityKGError):
    """Analytics query asks for a metric outside count/ratio/mean."""


class ConfigError(ActivityKGError):
    """Run configuration is invalid or references missing paths."""
