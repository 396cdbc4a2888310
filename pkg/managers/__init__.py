from .logging_manager import LoggingManager
from .result_writer import ResultWriter
from .verify_suite import CheckResult, CheckStatus, VerifySuite
from .command_manager import CommandManager, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK

__all__ = [
    'LoggingManager',
    'ResultWriter',
    'CheckResult',
    'CheckStatus',
    'VerifySuite',
    'CommandManager',
    'EXIT_OK',
    'EXIT_CONFIG',
    'EXIT_FAILURE',
    ]
