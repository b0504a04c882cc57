class ConfigurationError(ValueError):
    """Problem setup that the solver cannot run (bad mesh, source, CFL...)."""


class UnsupportedConfiguration(ConfigurationError):
    pass


class AssemblyError(ArithmeticError):
    """A non-finite value appeared while assembling a sweep right-hand side."""


class NumericalDivergence(ArithmeticError):
    """The discrete solution stopped being finite (or blew past its guard)."""
