"""Exception types shared across the package.

The split matters for the CLI: invalid inputs (DomainError and friends) exit
with code 2, while numerical failures (series that did not converge, noise
floors reached) exit with code 3.
"""


class BGStatesError(Exception):
    """Base class for everything raised deliberately by this package."""


class DomainError(BGStatesError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """Evaluation requested at (or indistinguishably near) a pole."""


class ShapeError(BGStatesError, ValueError):
    """Mismatched truncation sizes or Bargmann indices between operands."""


class SeriesConvergenceError(BGStatesError, ArithmeticError):
    """An infinite series or product failed its stopping criterion."""

    def __init__(self, what: str, detail: str = ""):
        self.what = what
        super().__init__(f"series failed to converge: {what}" + (f" ({detail})" if detail else ""))


class TruncationError(BGStatesError):
    """The requested basis cutoff cannot hold the state to tolerance."""
