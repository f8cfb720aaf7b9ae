class ClusteringError(Exception):
    """ Base class for every error raised by this package """


class BadConfig(ClusteringError, ValueError):
    """ A ClusterConfig field is out of range or inconsistent """


class BadLabel(ClusteringError, ValueError):
    """ A cluster label lies outside [0, k) """


class EmptyCluster(ClusteringError, ValueError):
    """ Some cluster id in [0, k) has no member """


class WouldEmptyCluster(ClusteringError, ValueError):
    """ Moving the sample would leave its source cluster empty """


class SameCluster(ClusteringError, ValueError):
    """ Source and target cluster of a move are identical """


class StaleGain(ClusteringError):
    """ A MoveGain was computed against an older revision of the state """


class TooSmall(ClusteringError, ValueError):
    """ Fewer than two members handed to a bisection """


class InsufficientData(ClusteringError):
    """ Only singleton clusters are left before k clusters exist """


class MissingLabels(ClusteringError):
    """ Class labels were required but the dataset carries none """


class BadSubdiv(ClusteringError, ValueError):
    """ Dimension not divisible by the number of sub-quantizers """


class FormatError(ClusteringError):
    """ Base class for malformed input files """


class DimMismatch(FormatError):
    """ Records disagree on dimension, or the dimension is invalid """


class Truncated(FormatError):
    """ The file ends inside a record """


class EmptyFile(FormatError):
    """ The file holds no record at all """


class ParseError(FormatError):
    """ A CSV cell could not be parsed """
    def __init__(self, message, line):
        super().__init__('line %d: %s' % (line, message))
        self.line = line
