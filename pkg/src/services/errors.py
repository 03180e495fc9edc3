class HankelIndetError(Exception):
    """
    Base error of the library. Carries the process exit status the CLI reports.

    :param detail: Human readable description of the failure.
    :type detail: str
    :param exit_code: Exit status for the command line.
    :type exit_code: int
    """

    exit_code = 1

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class VerificationFailed(HankelIndetError):
    exit_code = 1


class ConfigError(HankelIndetError):
    exit_code = 2


class MomentFileError(ConfigError):
    pass


class QSeriesError(HankelIndetError, ValueError):
    exit_code = 2


class PrecisionExhausted(HankelIndetError):
    """
    Raised when the working precision cannot deliver the requested result.

    :param detail: Description of the failure.
    :type detail: str
    :param required_bits: Estimate of the precision that would be needed, if known.
    :type required_bits: int | None
    """

    exit_code = 3

    def __init__(self, detail: str, required_bits: int | None = None):
        super().__init__(detail)
        self.required_bits = required_bits


class ConvergenceError(PrecisionExhausted):
    pass


class NotPositiveDefinite(HankelIndetError):
    exit_code = 4

    def __init__(self, detail: str, pivot: int | None = None):
        super().__init__(detail)
        self.pivot = pivot


class MomentSourceError(HankelIndetError):
    exit_code = 4
