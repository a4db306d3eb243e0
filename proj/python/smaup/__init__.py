"""Python bindings for the smaup toolkit."""

import json as _json

from ._core import (  # noqa: F401
    InputError,
    NumericalError,
    SpatialWeights,
    StallError,
    __version__,
    aggregate_mean,
    critical_value,
    critical_values_csv,
    estimate_rho,
    eta_of_theta,
    generate_null,
    generate_sar,
    l_of_theta,
    m_statistic,
    min_safe_k,
    permute_to_rho,
    random_regions,
    run_cli,
    tau_of_theta,
)
from . import _core


def smaup_test(w, y, k, alpha=0.05, null=None, rho=None, bilinear=False):
    """Run the test for k regions. Returns the result as a dict."""
    return _json.loads(_core._smaup_test(w, list(y), k, alpha, None if null is None else list(null), rho, bilinear))


def power(n_list, rho_list, instances, alpha=0.05, seed=0, workers=1):
    return _json.loads(_core._power_size("power", list(n_list), list(rho_list), instances, alpha, seed, workers))


def size(n_list, rho_list, instances, alpha=0.05, seed=0, workers=1):
    return _json.loads(_core._power_size("size", list(n_list), list(rho_list), instances, alpha, seed, workers))
