"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid configuration. ``errors`` lists ``(key_path, message)`` pairs."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [("", errors)]
        self.errors = list(errors)
        lines = [f"{path}: {msg}" if path else msg for path, msg in self.errors]
        super().__init__("; ".join(lines))


class InvalidPlanError(ValueError):
    pass


class ModelError(ValueError):
    """A stochastic model was asked to do something unphysical."""


class InputError(ValueError):
    """Analysis input has the wrong shape or length."""


class DegenerateFitError(ArithmeticError):
    """The normal matrix of a least-squares problem is singular."""


class ScenarioRuntimeError(RuntimeError):
    def __init__(self, message, seed):
        super().__init__(f"{message} (seed={seed})")
        self.seed = seed
