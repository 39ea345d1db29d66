"""Double-double EIT in a four-level tripod atom: dynamics, susceptibility and Doppler analysis."""

from .model import (DerivedRates, InvalidParams, ModelError, Spectrum, SystemParams,
                    derive_rates, standard_params, validate)

__all__ = ["DerivedRates", "InvalidParams", "ModelError", "Spectrum", "SystemParams",
           "derive_rates", "standard_params", "validate"]
__version__ = "0.1.0"
