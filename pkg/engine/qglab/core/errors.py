"""Exception hierarchy. Every error names the assumption or precondition it guards."""


class QGLabError(Exception):
    assumption = "qglab"

    def __init__(self, message: str, *, assumption: str | None = None):
        super().__init__(message)
        if assumption is not None:
            self.assumption = assumption


class ConfigError(QGLabError, ValueError):
    assumption = "config"


class ParameterError(QGLabError, ValueError):
    assumption = "parameter-schedule"


class ModeFamilyError(QGLabError, ValueError):
    assumption = "mode-family"


class OutOfBallError(QGLabError, ValueError):
    assumption = "positive-coefficients"


class GridMismatchError(QGLabError, ValueError):
    assumption = "shared-grid"


class SliceMeanError(QGLabError, ValueError):
    assumption = "slice-mean-zero"


class BandOverflowError(QGLabError):
    assumption = "grid-band"


class LatticeError(QGLabError, ValueError):
    assumption = "lattice-frequency"


class NotAGradientError(QGLabError, ValueError):
    assumption = "horizontal-gradient"


class RealityError(QGLabError, ValueError):
    assumption = "hermitian-amplitudes"


class EmptyPlateauError(QGLabError, ValueError):
    assumption = "cutoff-plateau"


class MarginError(QGLabError):
    assumption = "mollifier-margin"


class TimeWindowError(QGLabError, ValueError):
    assumption = "flow-window"


class EpsilonBallError(QGLabError):
    """Transported stress left the coefficient ball; a smaller eta is needed."""

    assumption = "epsilon-ball"


class InductiveAssumptionError(QGLabError):
    assumption = "inductive-assumption"


class DecompositionError(QGLabError):
    assumption = "stress-reconstruction"


class PlanarityError(QGLabError, ValueError):
    assumption = "planar-input"


class SnapshotFormatError(QGLabError, ValueError):
    assumption = "snapshot-format"
