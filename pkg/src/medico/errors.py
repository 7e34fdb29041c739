"""Exception hierarchy for the medico pipeline.

Every error raised by the package derives from MedicoError so callers can
catch pipeline failures with a single except clause while still matching
specific conditions.
"""

from __future__ import annotations


class MedicoError(Exception):
    """Base class for all medico errors."""


# -- retrieval ---------------------------------------------------------------


class BackendUnavailable(MedicoError):
    """A remote backend (search API, LLM endpoint) could not be reached."""


class IndexMissing(MedicoError):
    """A KB/KG index was requested before being built or loaded."""


class DuplicatePageId(MedicoError):
    """The KB corpus contains two pages with the same id."""


class UnsupportedFormat(MedicoError):
    """An uploaded file is not one of TXT, DOCX, PDF, MARKDOWN."""


class ExtractionFailure(MedicoError):
    """A file of a supported format could not be parsed (corrupt input)."""


# -- scoring / fusion --------------------------------------------------------


class ScorerUnavailable(MedicoError):
    """The configured relevance scorer backend is down."""


class EmptyEvidence(MedicoError):
    """fuse() was called on an empty evidence set."""


# -- gateway -----------------------------------------------------------------


class OutputEmpty(MedicoError):
    """A chat backend produced an empty completion."""


class ScoringUnsupported(MedicoError):
    """The backend cannot produce label log-probabilities."""


# -- detection ---------------------------------------------------------------


class LabelParse(MedicoError):
    """Neither 'True' nor 'False' could be extracted from a detector reply."""


class DegenerateDataset(MedicoError):
    """A training set contains only one class."""


class Untrained(MedicoError):
    """classify() was called on an untrained classifier."""


# -- correction --------------------------------------------------------------


class EmptyOriginal(MedicoError):
    """Preservation is undefined for an empty original text."""


class NoSpans(MedicoError):
    """Span identification yielded zero locatable spans."""


# -- evaluation --------------------------------------------------------------


class ParseError(MedicoError):
    """A dataset line could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class LengthMismatch(MedicoError):
    """Prediction and gold label lists differ in length."""
