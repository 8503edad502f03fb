"""Named parameter presets for the standard experiments.

Each preset is a complete run configuration (model + run sections) in the
same key = value format the CLI reads from --config.  Desk-scale presets use
N=256; pass --grid 1024 for the full-resolution versions.
"""

from __future__ import annotations

import configparser

_PRESETS: dict[str, dict[str, dict[str, str]]] = {
    # single gaussian bump contracting to a spot
    "fig2a": {
        "model": {"mu": "3.4", "theta": "5.6", "b": "0.4",
                  "kernel_variant": "oscillatory_radial2d", "G0": "0.0",
                  "N": "256", "L": "60.0", "dim": "2"},
        "run": {"command": "simulate", "seed_family": "gaussian-bump",
                "seed_A": "6.0", "seed_Lc": "5.77", "dt": "0.1", "T": "15.0"},
    },
    # 1D snaking branch
    "fig5": {
        "model": {"mu": "3.0", "theta": "3.5", "b": "0.4",
                  "kernel_variant": "oscillatory1d", "G0": "1e-4",
                  "alpha": "1.0", "beta": "1.0", "sigma": "3.1622776601683795",
                  "N": "1024", "L": "30.0", "dim": "1"},
        "run": {"command": "continue", "seed_family": "gaussian-bump",
                "seed_A": "6.0", "seed_Lc": "5.77", "settle_T": "100.0",
                "settle_dt": "0.5", "ds": "0.05", "max_steps": "400",
                "mu_min": "1.5", "mu_max": "4.5", "stability_every": "5"},
    },
    # localized state pinned by a strongly anisotropic input
    "fig6": {
        "model": {"mu": "2.5", "theta": "5.6", "b": "0.4",
                  "kernel_variant": "oscillatory_radial2d", "G0": "4.0",
                  "alpha": "1.0", "beta": "4.0", "sigma": "12.0",
                  "N": "256", "L": "60.0", "dim": "2"},
        "run": {"command": "simulate", "seed_family": "sinusoid-perturbation",
                "seed_A": "0.8", "dt": "0.1", "T": "100.0"},
    },
    # 2D spot branch continuation
    "fig7": {
        "model": {"mu": "3.0", "theta": "5.6", "b": "0.4",
                  "kernel_variant": "oscillatory_radial2d", "G0": "1e-4",
                  "alpha": "1.0", "beta": "1.0", "sigma": "3.1622776601683795",
                  "N": "256", "L": "60.0", "dim": "2"},
        "run": {"command": "continue", "seed_family": "gaussian-bump",
                "seed_A": "6.0", "seed_Lc": "5.77", "settle_T": "100.0",
                "settle_dt": "0.5", "ds": "0.05", "max_steps": "200",
                "mu_min": "2.0", "mu_max": "4.0", "stability_every": "5"},
    },
    # input-driven spot selection; override sigma for the sibling panels
    "fig12b": {
        "model": {"mu": "2.4", "theta": "5.6", "b": "0.4",
                  "kernel_variant": "oscillatory_radial2d", "G0": "1.5",
                  "alpha": "1.0", "beta": "1.0", "sigma": "9.0",
                  "N": "256", "L": "60.0", "dim": "2"},
        "run": {"command": "input-experiment", "seed_family": "random-perturbation",
                "seed_A": "0.01", "rng_seed": "0", "dt": "0.1", "T": "150.0"},
    },
    # metastable square-lattice transient
    "fig13": {
        "model": {"mu": "3.2", "theta": "5.6", "b": "0.4",
                  "kernel_variant": "oscillatory_radial2d", "G0": "0.0",
                  "N": "256", "L": "60.0", "dim": "2"},
        "run": {"command": "simulate", "seed_family": "square-lattice",
                "seed_A": "2.0", "seed_Lc": "65.0", "dt": "0.1", "T": "300.0"},
    },
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_config(name: str) -> configparser.ConfigParser:
    """Return a fresh ConfigParser for a named preset."""
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    cp = configparser.ConfigParser()
    cp.read_dict(_PRESETS[name])
    return cp
