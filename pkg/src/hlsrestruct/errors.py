"""Exception types shared across the package."""


class HLSRestructError(Exception):
    """Base class for all package errors."""

    code = "error"


class InvalidInputError(HLSRestructError, ValueError):
    code = "invalid-input"


class AccumulatorOverflowError(HLSRestructError, OverflowError):
    code = "overflow"


class StructuralError(HLSRestructError, ValueError):
    code = "structural"


class ProtocolError(HLSRestructError, RuntimeError):
    code = "protocol"


class ConfigurationError(HLSRestructError, ValueError):
    code = "configuration"


class TemplateParamError(HLSRestructError, ValueError):
    """Raised with every violated template parameter constraint."""

    code = "template-params"

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{e.param}: {e.message}" for e in self.errors))


class GraphValidationError(HLSRestructError, ValueError):
    code = "graph"

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"[{i.code}] {i.message}" for i in self.issues))


class DeadlockError(HLSRestructError, RuntimeError):
    """Simulation stalled with tokens still in flight."""

    code = "deadlock"

    def __init__(self, message, blocked=()):
        self.blocked = list(blocked)
        super().__init__(message)


class SearchSpaceError(HLSRestructError, ValueError):
    code = "search-space"
