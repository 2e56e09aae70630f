"""Exception hierarchy shared by all ksrigidity modules."""


class KSError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(KSError, ValueError):
    pass


class ZeroVectorError(KSError, ValueError):
    pass


class DegenerateSpanError(KSError, ValueError):
    """The given rays do not span a hyperplane, so their complement is not a single ray."""


class ParseError(KSError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class EvalError(KSError, ArithmeticError):
    pass


class CatalogIOError(KSError, OSError):
    pass


class FormatError(KSError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class DuplicateRayError(FormatError):
    pass


class LabelError(KSError, ValueError):
    pass


class CliqueNotBasisError(KSError):
    """A dim-clique whose projectors do not sum to the identity (a transcription error)."""


class InputError(KSError, ValueError):
    pass


class ContinuationStallError(KSError, RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual
