"""Spectra and regularized traces of a fourth-order operator pencil with
eigenparameter-dependent boundary conditions, mode by mode."""

__version__ = "0.1.0"

from .errors import ConfigError, NumericalError, QuarttraceError  # noqa: E402
from .model import (FAMILIES, Family, GammaLaw, ModeSpec, PotentialSpec, Profile,  # noqa: E402
                    SolverConfig, build_modes, load_config, parse_config)

__all__ = ["ConfigError", "NumericalError", "QuarttraceError", "FAMILIES", "Family", "GammaLaw",
           "ModeSpec", "PotentialSpec", "Profile", "SolverConfig", "build_modes", "load_config",
           "parse_config", "__version__"]
