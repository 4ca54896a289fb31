# Copyright The msfrac Authors
# SPDX-License-Identifier: Apache-2.0

"""Multiscale flow in fractured porous media."""

from ._core import (
    Error,
    ScenarioConfig,
    check_bounds,
    count_networks,
    load_config,
    offline_eigenvalues,
    parse_config,
    preset,
    preset_names,
    run,
    rve_transfer,
)

__all__ = [
    "Error",
    "ScenarioConfig",
    "check_bounds",
    "count_networks",
    "load_config",
    "offline_eigenvalues",
    "parse_config",
    "preset",
    "preset_names",
    "run",
    "rve_transfer",
]
