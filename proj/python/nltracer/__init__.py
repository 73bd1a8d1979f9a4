"""Python front end for the nltracer core.

Configs may be given as dicts, JSON strings or paths to JSON files. Reports
come back as dicts.
"""

import json
import os

from . import _core
from ._core import (
    Error,
    Kernel,
    LemmaConstants,
    check_energy_inequality,
    check_monotone,
    check_nakao_hypothesis,
    condition_report as _condition_report,
    fit_decay,
    l1_norms,
    lemma_constants,
    max_delta_c5_prime,
    staffans_check,
)

__all__ = [
    "Error",
    "Kernel",
    "LemmaConstants",
    "alpha0",
    "check",
    "check_energy_inequality",
    "check_monotone",
    "check_nakao_hypothesis",
    "condition_report",
    "fit_decay",
    "l1_norms",
    "lemma",
    "lemma_constants",
    "load_config",
    "max_delta_c5_prime",
    "run",
    "simulate",
    "staffans_check",
    "sweep",
]


def _config_text(config):
    """Returns (json_text, base_dir) for a dict, JSON string or file path."""
    if isinstance(config, dict):
        return json.dumps(config), ""
    if isinstance(config, os.PathLike) or (isinstance(config, str) and not config.lstrip().startswith("{")):
        path = os.fspath(config)
        with open(path, encoding="utf-8") as f:
            return f.read(), os.path.dirname(os.path.abspath(path))
    return config, ""


def load_config(config):
    """Parsed config with every default filled in."""
    text, base = _config_text(config)
    return json.loads(_core.normalize_config(text, base))


def condition_report(kernel, delta, t_end=12.0, n=4000):
    return json.loads(_condition_report(kernel, delta, t_end, n))


def alpha0(config):
    text, _ = _config_text(config)
    return json.loads(_core.alpha0(text))


def simulate(config, backend="direct"):
    """Runs one backend in memory; returns the trace, the final field and x."""
    text, base = _config_text(config)
    return _core.simulate(text, backend, base)


def _command(fn, config, out=None, write=False, jobs=None, force=False):
    text, base = _config_text(config)
    code, report = fn(text, base, None if out is None else os.fspath(out), write, jobs, force)
    return code, json.loads(report)


def check(config):
    """(exit_code, report) of the static checks."""
    return _command(_core.cmd_check, config)


def run(config, out=None, write=None, force=False):
    """(exit_code, report); artifacts are written only when `out` is given."""
    return _command(_core.cmd_run, config, out, out is not None if write is None else write, force=force)


def lemma(config, out=None):
    return _command(_core.cmd_lemma, config, out, out is not None)


def sweep(config, out, jobs=None, force=False):
    return _command(_core.cmd_sweep, config, out, True, jobs, force)
