class FactreeError(Exception):
    """Base class for all errors."""

class UsageError(FactreeError):
    """Raised for invalid command-line usage."""

## shared

class TooShort(FactreeError):
    """Raised when a series or matrix has too few observations."""

## ingest

class IngestError(FactreeError):
    """Base class for parsing and alignment errors."""

class LineError(IngestError):
    """Adds the offending line number (1-based, header included)."""
    def __init__(self, line, msg):
        super(LineError, self).__init__('line {}: {}'.format(line, msg))
        self.line = line

class MissingColumn(IngestError):
    """Raised when a required column is absent from the header."""
    def __init__(self, column, columns=None):
        msg = 'missing column: {!r}'.format(column)
        if columns is not None:
            msg += ' (found: {})'.format(', '.join(map(str, columns)))
        super(MissingColumn, self).__init__(msg)
        self.column = column

class BadDate(LineError):
    """Raised for a date that does not parse."""

class BadPrice(LineError):
    """Raised for a price that does not parse."""

class NonPositivePrice(BadPrice):
    """Raised for a price <= 0."""

class DuplicateDate(IngestError):
    def __init__(self, date):
        super(DuplicateDate, self).__init__('duplicate date: {}'.format(date))
        self.date = date

class HeaderNotFound(IngestError):
    """Raised when no header row (or no data under it) is found."""

class BadRow(LineError):
    """Raised for a malformed or incomplete data row."""

class LengthMismatch(IngestError):
    """Raised when series that must be aligned differ in length."""

class EmptyIntersection(IngestError):
    """Raised when aligned sources share no dates."""

## fetch

class FetchError(FactreeError):
    """Base class for factor download errors."""

class NetworkError(FetchError):
    """Raised for connection and HTTP errors."""

class Timeout(NetworkError):
    """Raised when the server does not answer in time."""

class NotAnArchive(FetchError):
    """Raised when a download is neither a zip archive nor CSV text."""

class MultipleEntries(FetchError):
    """Raised when a zip archive holds more than one file."""

class UnexpectedContent(FetchError):
    """Raised when a download does not look like the expected file kind."""

## stats

class StatsError(FactreeError):
    """Base class for descriptive statistics errors."""

class EmptySeries(StatsError):
    pass

class ZeroVariance(StatsError):
    pass

## tree

class TreeError(FactreeError):
    """Base class for tree fitting errors."""

class InvalidConfig(TreeError):
    pass

class EmptyNode(TreeError):
    pass

class DegenerateSplit(TreeError):
    """Raised when a split leaves a child empty or below min_samples_leaf."""

## linear

class LinearError(FactreeError):
    """Base class for regression errors."""

class RankDeficient(LinearError):
    pass

## report

class ReportError(FactreeError):
    """Base class for report errors."""

class NotASplit(ReportError):
    """Raised when a tree's root is a leaf."""

class ZeroDrop(ReportError):
    """Raised when a split achieves no error reduction."""

class UnknownTicker(IngestError, ReportError):
    def __init__(self, ticker, known=()):
        msg = 'unknown ticker: {!r}'.format(ticker)
        if known:
            msg += ' (available: {})'.format(', '.join(known))
        super(UnknownTicker, self).__init__(msg)
        self.ticker = ticker

## serialization

class EncodeError(FactreeError):
    """Adds context for errors raised when encoding."""

class DecodeError(FactreeError):
    """Adds context for errors raised when decoding."""

## registry

class RegistryError(FactreeError):
    pass
