"""
Exception hierarchy for the solver.
Configuration problems and numerical failures are kept apart so the CLI
can map them onto distinct exit codes.
"""


class FracBemError(Exception):
    """Base class for all solver errors"""


class ConfigurationError(FracBemError, ValueError):
    """Invalid parameters or run configuration"""


class NumericalError(FracBemError):
    """Base class for failures raised while computing"""


class DomainError(NumericalError, ValueError):
    """Argument outside the domain of a function"""


class SingularityError(NumericalError):
    """Evaluation requested at a kernel singularity"""


class DataError(NumericalError):
    """Non-finite input data (boundary data, volume data, sampled functions)"""


class AssemblyError(NumericalError):
    """Galerkin assembly failed"""

    def __init__(self, message: str, pair: tuple = None):
        super().__init__(message)
        self.pair = pair


class SolverError(NumericalError):
    """Linear system could not be solved"""


class EvaluationError(NumericalError):
    """Potential evaluation requested on the boundary"""

    def __init__(self, message: str, points=None):
        super().__init__(message)
        self.points = points


class OracleError(NumericalError):
    """Verification quadrature did not converge"""
