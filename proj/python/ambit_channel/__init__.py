"""Time-varying wideband channel simulation with direct and ambit-field engines."""

import json as _json

import numpy as _np

from ._ambit_channel import (  # noqa: F401
    AmbitError,
    ConfigError,
    ContractError,
    DelayOverflowError,
    HorizonError,
    ParameterError,
    __version__,
    conv2d_fold,
    derive_geometry,
    doppler_psd,
    euclidean_distance,
    mu_position,
    temporal_acf,
)
from . import _ambit_channel as _core


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def validate(config):
    """Return the canonical SI form of a configuration; raises ConfigError."""
    return _json.loads(_core._validate(_text(config)))


def grid_info(config):
    return _core._grid_info(_text(config))


def realization(config, seed, engine="ambit", power_delay_profile=False):
    """Impulse response of one realization as a (steps, bins) complex array."""
    return _np.asarray(_core._realization(_text(config), seed, engine, power_delay_profile))


def narrowband_gain(h):
    return _np.asarray(h).sum(axis=1)


def compare(config, seeds, repetitions=1):
    return _core._compare(_text(config), list(seeds), repetitions)


def simulate(config, out_dir, workers=1):
    """Run the configured engines and return the manifest as a dict."""
    return _json.loads(_core._simulate(_text(config), str(out_dir), workers))


def stats(manifest_path, config, out_dir):
    anchors, warnings = _core._stats(str(manifest_path), _text(config), str(out_dir))
    return {"anchors": anchors, "warnings": warnings}
