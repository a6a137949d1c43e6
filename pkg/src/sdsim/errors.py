"""Exception hierarchy shared by the compiler, engine and runners."""

from __future__ import annotations


class SDSimError(Exception):
    """Base class for every error raised by sdsim."""


class ParseError(SDSimError):
    """Raised when a model source produces error diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = [str(d) for d in self.diagnostics]
        super().__init__("\n".join(lines) if lines else "parse failed")


class UnitParseError(SDSimError):
    pass


class CompileError(SDSimError):
    pass


class UnresolvedReference(CompileError):
    def __init__(self, name: str, where: str | None = None):
        self.name = name
        self.where = where
        msg = f"unresolved reference {name!r}"
        if where:
            msg += f" in {where!r}"
        super().__init__(msg)


class CyclicDependency(CompileError):
    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__("cyclic dependency: " + " -> ".join(self.cycle + self.cycle[:1]))


class MalformedIntegral(CompileError):
    def __init__(self, name: str, reason: str = "INTEG may only appear at the root of a stock equation"):
        self.name = name
        super().__init__(f"{name}: {reason}")


class InvalidControl(CompileError):
    pass


class SimulationError(SDSimError):
    """Evaluation failure annotated with the variable and simulation time."""

    def __init__(self, variable: str, t: float, reason: str):
        self.variable = variable
        self.t = t
        self.reason = reason
        super().__init__(f"{reason} in {variable!r} at t={t!r}")


class DivisionByZero(SimulationError):
    def __init__(self, variable: str, t: float):
        super().__init__(variable, t, "division by zero")


class NonFiniteResult(SimulationError):
    def __init__(self, variable: str, t: float):
        super().__init__(variable, t, "non-finite result")


class InvalidBounds(SDSimError):
    def __init__(self, lo: float | None, hi: float | None, variable: str | None = None, t: float | None = None):
        self.lo, self.hi = lo, hi
        self.variable, self.t = variable, t
        msg = "RANDOM NORMAL bounds require min < max"
        if lo is not None:
            msg += f", got [{lo!r}, {hi!r}]"
        if variable is not None:
            msg += f" in {variable!r} at t={t!r}"
        super().__init__(msg)


class UnknownOverride(SDSimError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown override {name!r}: not a constant or stock of the model")


class UnknownPreset(SDSimError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown preset {name!r}")


class InvalidParameter(SDSimError, ValueError):
    pass


class InsufficientData(SDSimError, ValueError):
    pass


class ZeroVariance(SDSimError, ValueError):
    pass


class MissingVariable(SDSimError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"variable {self.name!r} missing from run result"


class EmptySeries(SDSimError, ValueError):
    pass
