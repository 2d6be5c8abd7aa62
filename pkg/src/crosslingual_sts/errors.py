'''
Exceptions raised across the cross-lingual STS toolkit. The command line maps
each family onto its own exit code.
'''


class CrossLingualStsError(Exception):
    '''
    Parent exception for all exceptions raised in this package.
    '''


class InputFormatError(CrossLingualStsError):
    '''
    Exception raised when an input stream does not follow its declared format.
    Carries the (1-based) line number of the offending line when known.
    '''

    def __init__(self, message: str, line_number: int | None=None):
        '''
        Prefix the message with the offending line number, when known.
        '''
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class PreconditionError(CrossLingualStsError):
    '''
    Exception raised when the inputs of an operation violate its preconditions.
    '''


class DimensionMismatchError(PreconditionError):
    '''
    Exception raised when two spaces, vectors, or matrices disagree on the
    embedding dimension.
    '''


class EmptyDictionaryError(PreconditionError):
    '''
    Exception raised when no dictionary pair survives resolution against the
    two semantic spaces.
    '''


class AlreadyPreprocessedError(PreconditionError):
    '''
    Exception raised when centering and normalization are requested a second
    time on the same space.
    '''


class EmptySentenceError(PreconditionError):
    '''
    Exception raised when a sentence contains no tokens after tokenization.
    '''


class ZeroVarianceError(PreconditionError):
    '''
    Exception raised when a statistic is undefined because a sample has zero
    variance.
    '''


class NumericalError(CrossLingualStsError):
    '''
    Parent exception for numerical failures during fitting.
    '''


class RankDeficientError(NumericalError):
    '''
    Exception raised when a covariance matrix is singular and no ridge term was
    allowed.
    '''


class DivergenceError(NumericalError):
    '''
    Exception raised when stochastic gradient descent produces a non-finite
    loss or matrix.
    '''
