from enum import Enum, IntEnum


class SignalKind(str, Enum):
    CHIRP = "chirp"
    AM = "am"
    FM = "fm"
    GAUSSIAN = "gaussian"


class DistributionKind(str, Enum):
    PLAIN = "plain"
    PSEUDO = "pseudo"
    DIFFERENCE = "difference"


class TomogramSource(str, Enum):
    DIRECT = "direct"
    RADON_PLAIN = "radon-plain"
    RADON_PSEUDO = "radon-pseudo"
    DIFFERENCE = "difference"


class ModulationFamily(str, Enum):
    AM = "AM"
    FM = "FM"


class OutputKind(str, Enum):
    WVD = "wvd"
    PWVD = "pwvd"
    TOMOGRAM_DIRECT = "tomogram-direct"
    TOMOGRAM_RADON = "tomogram-radon"
    DIFF = "diff"
    ENTROPY = "entropy"
    SURFACE = "surface"


class ExitCode(IntEnum):
    OK = 0
    CONFIG_ERROR = 2
    INVARIANT_VIOLATION = 3
    IO_ERROR = 4


class ErrorType(str, Enum):
    CONFIGURATION_ERROR = "config_error"
    INVARIANT_VIOLATION = "invariant_violation"
    IO_ERROR = "io_error"
