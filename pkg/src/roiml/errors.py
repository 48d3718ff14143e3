"""Exception types shared across the toolkit.

Every error raised on purpose derives from RoimlError so callers (and the
CLI) can tell expected failures apart from bugs.
"""

from __future__ import annotations


class RoimlError(Exception):
    """Base class for all errors this package raises deliberately."""


class ParseError(RoimlError):
    """Input bytes could not be parsed (malformed CSV, bad row shape)."""


class SchemaError(RoimlError):
    """Parsed input is missing required columns or headers."""


class CorpusError(RoimlError):
    """Corpus integrity violated (duplicate ids, empty pair sets, ...)."""


class ImbalanceError(CorpusError):
    """Not enough negatives to balance the positive pairs."""


class CapacityError(CorpusError):
    """Requested more sampled pairs than the population can supply."""


class SizeError(RoimlError):
    """A data set is too small for the requested operation."""


class RangeError(RoimlError):
    """A requested fraction or count falls outside the feasible range."""


class ParameterError(RoimlError):
    """A numeric parameter is out of its documented domain."""


class UndefinedRoiError(ParameterError):
    """ROI requested for a non-positive cost; the ratio has no meaning."""


class DegenerateDataError(RoimlError):
    """Training data lacks the class diversity a learner needs."""


class PredictionError(RoimlError):
    """A prediction set is malformed or inconsistent."""


class ComparabilityError(RoimlError):
    """Two curves cannot be compared (different fraction grids)."""


class HarnessError(RoimlError):
    """A curve run or decision computation could not proceed."""


class ReportError(RoimlError):
    """Report emission or parsing failed."""


class ChartError(ReportError):
    """A chart specification cannot be rendered."""


class ConfigError(RoimlError):
    """A run configuration failed validation.

    Carries the individual problem messages so the CLI can report them
    all at once instead of one per invocation.
    """

    def __init__(self, problems: list[str] | str):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
