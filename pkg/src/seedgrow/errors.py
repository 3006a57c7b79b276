"""Exception hierarchy shared by all seedgrow modules."""


class SeedgrowError(Exception):
    """Base class for every error raised by this package."""


class EncodingError(SeedgrowError):
    """Tensor cannot be encoded (non-finite entries, unsupported rank)."""


class IoError(SeedgrowError):
    """Destination or source could not be written / read."""


class FormatError(SeedgrowError):
    """Byte stream is not a valid tensor file."""


class DumpError(SeedgrowError):
    """Attention dump is missing data or violates its manifest."""


class DegenerateMapError(SeedgrowError):
    """Attention map carries no signal (all entries zero)."""


class InputError(SeedgrowError):
    """Arguments violate an operation's contract."""
