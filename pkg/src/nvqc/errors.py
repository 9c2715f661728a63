"""Exception hierarchy shared by the compiler, assembler and simulator."""


class NVQCError(Exception):
    pass


class CompileError(NVQCError):
    """Input cannot be compiled; ``index`` names the offending source instruction if known."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"instruction {index}: {message}")
        self.index = index


class UnroutableError(CompileError):
    pass


class PipelineError(NVQCError):
    """A pass received input that an earlier pass should have ruled out."""


class DiagnosticsError(CompileError):
    pass


class AssemblyError(NVQCError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SimulationError(NVQCError):
    pass
