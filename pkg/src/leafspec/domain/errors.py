"""Exception hierarchy for leafspec.

入力エラーは ValueError、数値的な不整合は RuntimeError を併せて継承します。
CLI はこの区別で終了コード (1 / 2) を決定します。
"""


class LeafspecError(Exception):
    """Base class for all leafspec errors."""


class NegativeCurvatureError(LeafspecError, ValueError):
    """Ambient curvature is negative (no non-trivial foliations exist there)."""


class InvalidWeightError(LeafspecError, ValueError):
    """Leaf-volume weight violates its profile invariants."""


class DimensionMismatchError(LeafspecError, ValueError):
    """Declared leaf dimensions disagree with the weight's vanishing orders."""


class OutOfDomainError(LeafspecError, ValueError):
    """Position lies outside the quotient interval."""


class SingularEndpointError(LeafspecError, ValueError):
    """Mean curvature requested where the leaf volume vanishes."""


class NotASphereError(LeafspecError, ValueError):
    """Cone extension requested for a presentation that is not a round-sphere model."""


class InconsistentCoverError(LeafspecError, ValueError):
    """Covering datum lengths, fold points or weights do not match."""


class GridTooCoarseError(LeafspecError, ValueError):
    """Grid size below the supported minimum."""


class UnknownFamilyError(LeafspecError, ValueError):
    """Unknown presentation or reference-spectrum family."""


class OutOfRangeError(LeafspecError, ValueError):
    """Conjugate time outside the range where a shape eigenvalue exists."""


class DimensionOrderError(LeafspecError, ValueError):
    """Singular leaf dimension exceeds the regular leaf dimension."""


class UnsupportedProfileError(LeafspecError, ValueError):
    """Operation is only defined for closed-form product profiles."""


class UnknownPresentationError(LeafspecError, ValueError):
    """Scenario references an undeclared presentation."""


class ScenarioParseError(LeafspecError, ValueError):
    """Scenario document could not be parsed or validated.

    Attributes:
        line: 1-based line number in the scenario file, if known.
        field: Dotted path of the offending field, if known.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None) -> None:
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field


class ConvergenceSuspectError(LeafspecError, RuntimeError):
    """Observed Richardson ratios deviate from the second-order prediction.

    Attributes:
        ratios: Observed ratios per eigenvalue index (None where undefined).
    """

    def __init__(self, message: str, ratios: tuple[float | None, ...]) -> None:
        super().__init__(message)
        self.ratios = ratios


class InconsistentTheoremError(LeafspecError, RuntimeError):
    """Theorem hypotheses hold but the computed spectra differ.

    This always signals a numerical or modelling defect.

    Attributes:
        verdict: The offending verdict (typed loosely to avoid an import cycle).
    """

    def __init__(self, message: str, verdict: object) -> None:
        super().__init__(message)
        self.verdict = verdict
