class IsvError(Exception):
    """Root of every error raised by isom_codec."""


class InvalidConfig(IsvError, ValueError):
    pass


class UnsupportedFormat(IsvError):
    pass


class CorruptFile(IsvError):
    pass


class OutOfBounds(IsvError):
    pass


class InvalidLevels(IsvError):
    pass


class ShapeMismatch(IsvError):
    pass


class UnknownFamily(IsvError):
    pass


class EmptyInput(IsvError):
    pass


class DimensionMismatch(IsvError):
    pass


class IndexOutOfRange(IsvError):
    pass


class EmptyAlphabet(IsvError):
    pass


class UnknownSymbol(IsvError):
    pass


class CorruptStream(IsvError):
    pass


class CorruptTable(CorruptStream):
    pass


class BadMagic(CorruptStream):
    pass


class VersionMismatch(IsvError):
    pass


class ZeroOriginalSize(IsvError):
    pass


class BenchCellError(IsvError):
    def __init__(self, image: str, filter_name: str, reason: str) -> None:
        super().__init__(f"bench cell ({image}, {filter_name}) failed: {reason}")
        self.image = image
        self.filter_name = filter_name


class InvalidImage(IsvError, ValueError):
    pass
