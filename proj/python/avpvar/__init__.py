from ._core import (
    AvpFit,
    ConfigError,
    DataError,
    __version__,
    config_hash,
    fit_avp,
    fit_ols_var,
    model_names,
    pinball_loss,
    run,
    run_study,
    simulate_dgp,
)

__all__ = [
    "AvpFit",
    "ConfigError",
    "DataError",
    "__version__",
    "config_hash",
    "fit_avp",
    "fit_ols_var",
    "model_names",
    "pinball_loss",
    "run",
    "run_study",
    "simulate_dgp",
]
