"""Exception types shared across the package."""

from __future__ import annotations


class TreeTheoryError(Exception):
    """Base class for every error raised by this package."""


# -- signatures -------------------------------------------------------------

class SignatureError(TreeTheoryError):
    pass


class SingularSort(SignatureError):
    def __init__(self, sort: str):
        super().__init__(f"sort {sort!r} has exactly one generator; at least two are required")
        self.sort = sort


class EmptySort(SignatureError):
    def __init__(self, sort: str):
        super().__init__(f"sort {sort!r} has no generators")
        self.sort = sort


class UnknownSort(SignatureError):
    def __init__(self, name: str):
        super().__init__(f"unknown sort {name!r}")
        self.name = name


class DuplicateName(SignatureError):
    def __init__(self, name: str):
        super().__init__(f"name {name!r} declared twice")
        self.name = name


class InfiniteDomain(TreeTheoryError):
    def __init__(self, sort: str):
        super().__init__(f"sort {sort!r} does not have a finite domain")
        self.sort = sort


# -- formulae ---------------------------------------------------------------

class SortError(TreeTheoryError):
    pass


class ArityError(SortError):
    pass


class DepthError(TreeTheoryError):
    pass


class NotSimplified(TreeTheoryError):
    pass


class Timeout(TreeTheoryError):
    def __init__(self, budget: int | None = None, reason: str = "step budget exhausted"):
        super().__init__(reason if budget is None else f"{reason} ({budget} steps)")
        self.budget = budget


# -- datatype frontend ------------------------------------------------------

class MixedDeclaration(SignatureError):
    pass


class NonWellFounded(SignatureError):
    def __init__(self, sort: str):
        super().__init__(f"datatype {sort!r} has no finite values (not well-founded)")
        self.sort = sort


class MissingDefault(TreeTheoryError):
    def __init__(self, constructor: str, selector: str):
        super().__init__(f"no default value for selector {selector!r} of {constructor!r}")
        self.constructor = constructor
        self.selector = selector


class QuantifiedInput(TreeTheoryError):
    def __init__(self):
        super().__init__(
            "standard selector semantics only supports quantifier-free input; "
            "use --semantics defaults for quantified formulae"
        )


# -- front end --------------------------------------------------------------

class ParseError(TreeTheoryError):
    def __init__(self, line: int, col: int, expected: str):
        super().__init__(f"{line}:{col}: expected {expected}")
        self.line = line
        self.col = col
        self.expected = expected
