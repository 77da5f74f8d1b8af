"""Exception hierarchy shared across the package"""


class PKGNetError(ValueError):
    """Base class for all package errors"""


class DimensionError(PKGNetError):
    """Raised when tensor shapes disagree"""


class ContractError(PKGNetError):
    """Raised when a precondition of an operation is violated"""


class EncodingError(PKGNetError):
    """Raised when a grid symbol has no encoding"""


class ConfigurationError(PKGNetError):
    """Raised for invalid environment or experiment configuration"""


class EditError(PKGNetError):
    """Raised when a knowledge-graph edit references a missing vertex or edge"""


class CheckpointError(PKGNetError):
    """Raised when a checkpoint file cannot be read"""
