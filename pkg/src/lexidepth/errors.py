"""Exception and warning types shared across lexidepth modules.

Every error carries an ``exit_code`` used by the command-line front end:
1 for usage problems, 2 for bad input data, 3 for numerical failures.
"""


class LexidepthError(ValueError):
    exit_code = 2


class UsageError(LexidepthError):
    exit_code = 1


class DataError(LexidepthError):
    exit_code = 2


class NumericError(LexidepthError):
    exit_code = 3


# corpus
class DuplicateLanguage(DataError):
    pass


class DuplicateMeaning(DataError):
    pass


class MalformedRow(DataError):
    def __init__(self, line, message="ragged row"):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownLanguage(DataError):
    pass


class UnknownMeaning(DataError):
    pass


class LanguageCollision(DataError):
    pass


# distance / hclust
class InsufficientSupport(DataError):
    def __init__(self, pair, support, required):
        self.pair = pair
        self.support = support
        self.required = required
        super().__init__(
            f"pair {pair[0]!r}/{pair[1]!r} shares {support} meaning(s), "
            f"{required} required"
        )


class IncompleteMatrix(DataError):
    pass


class UnknownLabel(DataError):
    pass


class LabelMismatch(DataError):
    pass


class InvalidK(UsageError):
    pass


# embedding / depth
class DimensionTooLarge(UsageError):
    pass


class DimensionUnsupported(UsageError):
    pass


class DimensionMismatch(UsageError):
    pass


class EmptyReference(DataError):
    pass


class InvalidLevel(UsageError):
    pass


# partition / classify
class InfeasibleClustering(UsageError):
    pass


class MissingClassLabel(DataError):
    pass


class DegenerateClasses(DataError):
    pass


class SplitTooSmall(DataError):
    pass


class SynonymWarning(UserWarning):
    """A cell listed several comma-separated forms; only the first was kept."""


class NonEuclideanWarning(UserWarning):
    """Classical scaling met a negative eigenvalue among the retained axes."""


class DegenerateRanksWarning(UserWarning):
    """All dissimilarities are equal, so a rank-based fit has nothing to fit."""
