"""Exception hierarchy shared by every labelqm module."""


class LabelQMError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(LabelQMError, ValueError):
    pass


class NotNormalized(LabelQMError, ValueError):
    def __init__(self, norm: float, what: str = "state"):
        self.norm = norm
        super().__init__(f"{what} is not normalized (norm = {norm:.17g}); pass normalize=True to rescale")


class NonHermitian(LabelQMError, ValueError):
    def __init__(self, max_asymmetry: float):
        self.max_asymmetry = max_asymmetry
        super().__init__(f"matrix is not Hermitian (max |H - H^dagger| = {max_asymmetry:.3e})")


class DegenerateSpectrum(LabelQMError, ValueError):
    def __init__(self, gap: float, index: int):
        self.gap = gap
        self.index = index
        super().__init__(f"eigenvalues {index} and {index + 1} differ by {gap:.3e} < 1e-8; degenerate spectra are not supported")


# correlated-pairs name for the same condition
DegenerateEigenvalues = DegenerateSpectrum


class NotOrthonormal(LabelQMError, ValueError):
    pass


class ZeroProbabilityOutcome(LabelQMError, ValueError):
    pass


class EmptyLabelSpace(LabelQMError, ValueError):
    pass


class SolverDidNotConverge(LabelQMError, RuntimeError):
    """Raised only on request; carries the best table found."""

    def __init__(self, residual: float, table=None):
        self.residual = residual
        self.table = table
        super().__init__(f"phase solver stopped with residual {residual:.3e}")


class GridTooSmall(LabelQMError, ValueError):
    pass


class ZeroReferenceAmplitude(LabelQMError, ValueError):
    pass


class TooManyDirections(LabelQMError, ValueError):
    pass


class DegenerateGeometry(LabelQMError, ValueError):
    pass


class AllZeroAmplitudes(LabelQMError, ValueError):
    pass


class ConfigError(LabelQMError):
    pass


class ConfigSyntaxError(ConfigError):
    def __init__(self, msg: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {msg}")


class ConfigValidationError(ConfigError):
    """All problems found in a config, each as (field_path, message)."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = list(problems)
        lines = [f"{path}: {msg}" for path, msg in self.problems]
        super().__init__("invalid config:\n  " + "\n  ".join(lines))


class ExperimentError(LabelQMError):
    """A module error raised while running an experiment, tagged with its name."""

    def __init__(self, experiment: str, cause: Exception):
        self.experiment = experiment
        self.cause = cause
        super().__init__(f"{experiment}: {type(cause).__name__}: {cause}")
