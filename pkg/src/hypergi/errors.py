"""Exception hierarchy shared by every stage of the pipeline."""


class HyperGIError(Exception):
    pass


class ParseError(HyperGIError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class PolicyError(ParseError):
    pass


class EditError(HyperGIError):
    """An edit could not be resolved against the program; the mutant is invalid."""


class EmptyDistribution(HyperGIError):
    pass


class EmptySuite(HyperGIError):
    pass


class Unsplittable(HyperGIError):
    pass


class DomainTooSmall(HyperGIError):
    pass


class NoLeak(HyperGIError):
    """Raised when there is no leakage to localize or repair."""


class UnknownSubject(HyperGIError):
    pass
