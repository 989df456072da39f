"""Exception types shared across the library.

The CLI maps these onto process exit codes: configuration/usage problems
exit 2, data-format and version problems exit 3, anything else exits 4.
"""


class GridcraftError(Exception):
    """Base class for all library errors."""


class ConfigurationError(GridcraftError):
    """A config value is out of range or a request is unsatisfiable."""


class EpisodeOver(GridcraftError):
    """An action was submitted to an episode that already finished."""


class BudgetExhausted(GridcraftError):
    """The sample budget was spent; no further env interaction allowed."""


class CorruptLog(GridcraftError):
    """A binary file failed magic/bounds/payload validation."""


class IncompatibleVersion(GridcraftError):
    """A file's format version or spec digest does not match this build."""


class IntegrityError(GridcraftError):
    """Stored data conflicts with data being written under the same id."""


class ComparisonError(GridcraftError):
    """Score reports from different evaluation setups cannot be ranked."""


class NoScheduleError(GridcraftError):
    """The task has no milestone schedule, so the query is undefined."""
