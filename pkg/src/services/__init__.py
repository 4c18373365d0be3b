"""Services package"""

from .solve import SolveService
from .verification import VerificationService
from .convergence import ConvergenceService
from .symbol_check import SymbolCheckService
from .results_writer import ResultsWriter

__all__ = ['SolveService', 'VerificationService', 'ConvergenceService', 'SymbolCheckService', 'ResultsWriter']
