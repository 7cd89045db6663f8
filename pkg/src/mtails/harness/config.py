"""INI-style suite files for ``mtails verify``.

Each section is one configuration::

    [rademacher4]
    ensemble = rademacher
    d = 4
    kind = bernstein
    n = 100
    t = 4, 8
    trials = 100000
    seed = 0          ; optional, else the run-wide seed
    alpha = 0.001     ; optional

Ensemble keys:

``rademacher``  ``d``
``diag``        ``sigma2`` (comma list of variances)
``gaussian``    ``sigma2`` (diagonal of Sigma) or ``sigma`` (matrix CSV path)
``rmm``         ``a`` and ``b`` (matrix CSV paths) or ``identity`` (size)

Relative paths are resolved against the directory of the suite file.
"""

from __future__ import annotations

import configparser
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..errors import MtailsError
from ..io import read_matrix
from .ensembles import DiagSubgaussian, Ensemble, GaussianVectors, RademacherOuter, RmmSampler
from .montecarlo import DEFAULT_ALPHA


class ConfigError(ValueError):
    """Malformed suite file (an input problem, not a failed precondition)."""


class Suite(NamedTuple):
    name: str
    ensemble: Ensemble
    kind: str
    n: int
    ts: tuple[float, ...]
    trials: int
    seed: int | None
    alpha: float
    eps: float | None


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]


def _ensemble(sec: configparser.SectionProxy, base: Path) -> Ensemble:
    name = sec.get("ensemble", "").strip().lower()
    if name == "rademacher":
        return RademacherOuter(sec.getint("d"))
    if name == "diag":
        return DiagSubgaussian(tuple(_floats(sec["sigma2"])))
    if name == "gaussian":
        if "sigma" in sec:
            return GaussianVectors(read_matrix(base / sec["sigma"]))
        return GaussianVectors(np.diag(_floats(sec["sigma2"])))
    if name == "rmm":
        if "identity" in sec:
            eye = np.eye(sec.getint("identity"))
            return RmmSampler(eye, eye)
        return RmmSampler(read_matrix(base / sec["a"]), read_matrix(base / sec["b"]))
    raise ConfigError(f"[{sec.name}] unknown ensemble {name!r}")


def load_suites(path) -> list[Suite]:
    """Parse every section of a suite file; raises ``OSError`` or ``ConfigError``."""
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with path.open() as fh:
        try:
            cp.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
    suites = []
    for name in cp.sections():
        sec = cp[name]
        try:
            suites.append(Suite(
                name=name,
                ensemble=_ensemble(sec, path.parent),
                kind=sec["kind"].strip(),
                n=sec.getint("n"),
                ts=tuple(_floats(sec["t"])),
                trials=sec.getint("trials"),
                seed=sec.getint("seed") if "seed" in sec else None,
                alpha=sec.getfloat("alpha", DEFAULT_ALPHA),
                eps=sec.getfloat("eps") if "eps" in sec else None,
            ))
        except KeyError as exc:
            raise ConfigError(f"[{name}] missing key {exc}") from None
        except MtailsError:
            raise  # a bad parameter value, reported like any other precondition failure
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{name}] {exc}") from None
    if not suites:
        raise ConfigError(f"{path}: no suites defined")
    return suites
