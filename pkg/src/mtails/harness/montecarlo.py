"""Seeded Monte Carlo validation of tail certificates.

Trial ``j`` of a run with seed ``s`` draws from its own Philox stream keyed by
``(s, j)``. Trials are reduced in fixed-size chunks and the chunks are put
back together in trial order, so the thread count never changes a report.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ..errors import DomainError
from ..rmm import make_rng
from .ensembles import Ensemble

DEFAULT_ALPHA = 1e-3
DEFAULT_CHUNK = 1024


class CertSpec(NamedTuple):
    """Which certificate to test: kind (see ``Ensemble.kinds``), sample count, ``t``."""

    kind: str
    n: int
    t: float
    eps: float | None = None


@dataclass(frozen=True)
class TrialReport:
    ensemble_id: str
    kind: str
    n: int
    t: float
    deviation: float
    trials: int
    violations: int
    empirical: float
    bound: float
    bound_raw: float
    slack: float
    passed: bool
    seed: int
    alpha: float
    ratio: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


FIELDS = ("ensemble_id", "kind", "n", "t", "deviation", "trials", "violations",
          "empirical", "bound", "bound_raw", "slack", "pass", "seed", "alpha", "ratio")


def hoeffding_slack(trials: int, alpha: float = DEFAULT_ALPHA) -> float:
    """One-sided margin ``sqrt(log(1/alpha) / (2 trials))``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return math.sqrt(math.log(1.0 / alpha) / (2.0 * trials))


def _check_trials(trials) -> int:
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    return int(trials)


def trial_statistics(ensemble: Ensemble, kind: str, n: int, trials: int, seed: int,
                     threads: int = 1, chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """The bounded statistic for each of ``trials`` independent replications."""
    trials = _check_trials(trials)
    ensemble._check_kind(kind)
    make_rng(seed)  # validates the seed before any work is scheduled

    def run(lo: int) -> np.ndarray:
        hi = min(trials, lo + chunk)
        draws = np.stack([ensemble.draw(make_rng(seed, j), n) for j in range(lo, hi)])
        return ensemble.statistics(draws, kind)

    starts = range(0, trials, chunk)
    if threads <= 1:
        parts = [run(lo) for lo in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    return np.concatenate(parts)


def _report(ensemble, spec: CertSpec, stats: np.ndarray, seed: int, alpha: float) -> TrialReport:
    target = ensemble.target(spec.kind, spec.n, spec.t, spec.eps)
    trials = stats.size
    violations = int(np.count_nonzero(stats > target.deviation))
    empirical = violations / trials
    slack = hoeffding_slack(trials, alpha)
    bound = target.probability.value
    return TrialReport(
        ensemble_id=ensemble.ensemble_id,
        kind=spec.kind,
        n=spec.n,
        t=float(spec.t),
        deviation=float(target.deviation),
        trials=trials,
        violations=violations,
        empirical=empirical,
        bound=bound,
        bound_raw=target.probability.raw,
        slack=slack,
        passed=empirical <= bound + slack,
        seed=int(seed),
        alpha=alpha,
        ratio=bound / empirical if violations else None,
    )


def mc_validate(ensemble: Ensemble, spec: CertSpec, trials: int, alpha: float = DEFAULT_ALPHA,
                seed: int = 0, threads: int = 1) -> TrialReport:
    """Empirical violation frequency of one certificate against its stated probability.

    ``ratio`` is bound / empirical (``None`` when nothing was violated); it is
    informational and not part of the pass decision.
    """
    hoeffding_slack(1, alpha)
    stats = trial_statistics(ensemble, spec.kind, spec.n, trials, seed, threads)
    return _report(ensemble, spec, stats, seed, alpha)


def mc_validate_many(ensemble: Ensemble, kind: str, n: int, ts: Sequence[float], trials: int,
                     alpha: float = DEFAULT_ALPHA, seed: int = 0, threads: int = 1,
                     eps: float | None = None) -> list[TrialReport]:
    """Same draws, several ``t``: one report per ``t`` in the order given."""
    hoeffding_slack(1, alpha)
    specs = [CertSpec(kind, n, t, eps) for t in ts]
    for s in specs:
        ensemble.target(s.kind, s.n, s.t, s.eps)  # fail fast on bad preconditions
    stats = trial_statistics(ensemble, kind, n, trials, seed, threads)
    return [_report(ensemble, s, stats, seed, alpha) for s in specs]


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def reports_to_csv(reports: Iterable[TrialReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in reports:
        d = r.to_dict()
        w.writerow([_cell(d[f]) for f in FIELDS])
    return buf.getvalue()


def reports_to_json(reports: Iterable[TrialReport]) -> str:
    from ..io import dumps

    return dumps([r.to_dict() for r in reports])
