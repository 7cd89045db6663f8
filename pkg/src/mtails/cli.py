"""``mtails`` command line.

Every subcommand writes JSON (or CSV for matrices and trial tables) to
``--out`` or stdout, and a one-line summary to stderr. Exit status is 0 on
success, 1 when a library precondition fails, 2 on I/O or config problems
(argparse usage errors also exit 2).

The default ``--seed`` is 0 unless the ``MTAILS_SEED`` environment variable
is set.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import applications, bounds, rmm, specmat, tailfn
from .errors import DomainError, MtailsError
from .harness.config import ConfigError, load_suites
from .harness.montecarlo import mc_validate_many, reports_to_csv, reports_to_json
from .io import dumps, format_matrix, read_matrix, write_matrix


class InputError(Exception):
    """Unreadable or malformed input file."""


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _matrix(path) -> np.ndarray:
    try:
        return read_matrix(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except MtailsError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _default_seed() -> int:
    env = os.environ.get("MTAILS_SEED")
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise DomainError(f"MTAILS_SEED must be an integer, got {env!r}") from None


def _emit(args, payload: dict, summary: str, text: str | None = None) -> None:
    out = dumps(payload) if text is None else text
    if getattr(args, "out", None):
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    print(summary, file=sys.stderr)


def _inputs(args, *names) -> dict:
    return {n: getattr(args, n) for n in names}


def _cert_payload(command: str, inputs: dict, cert) -> dict:
    return {"command": command, "inputs": inputs, **cert.to_dict()}


def _summary(cert) -> str:
    return f"deviation {cert.deviation:.6g} with probability <= {cert.probability.value:.6g} (t = {cert.t:.6g})"


# -- calculators ----------------------------------------------------------------------


def cmd_bound(args) -> int:
    if (args.t is None) == (args.delta is None):
        raise DomainError("give exactly one of --t and --delta")
    if args.kind == "generic":
        if args.trace is None or args.t is None:
            raise DomainError("generic needs --trace and --t")
        p = bounds.generic_rhs(args.trace, args.t)
        payload = {"command": "bound", "inputs": _inputs(args, "kind", "trace", "t"),
                   "probability": p.value, "probability_raw": p.raw, "t": args.t,
                   "source": "generic"}
        _emit(args, payload, f"probability <= {p.value:.6g} at t = {args.t:.6g}")
        return 0
    if args.n is None or args.sigma2 is None:
        raise DomainError(f"{args.kind} needs --n and --sigma2")
    k = 1.0 if args.k is None else args.k
    if args.kind == "subgaussian":
        p = bounds.SubgaussianParams(n=args.n, sigma2_bar=args.sigma2, k_bar=k)
        cert = (bounds.subgaussian_tail(p, args.t) if args.t is not None
                else bounds.subgaussian_deviation_at_confidence(p, args.delta))
        names = ("kind", "n", "sigma2", "k", "t", "delta")
    else:
        if args.b is None:
            raise DomainError("bernstein needs --b")
        p = bounds.BernsteinParams(n=args.n, b_bar=args.b, sigma2_bar=args.sigma2, k_bar=k)
        cert = (bounds.bernstein_tail(p, args.t) if args.t is not None
                else bounds.bernstein_deviation_at_confidence(p, args.delta))
        names = ("kind", "n", "b", "sigma2", "k", "t", "delta")
    _emit(args, _cert_payload("bound", _inputs(args, *names), cert), _summary(cert))
    return 0


def cmd_invert(args) -> int:
    t = tailfn.invert_phi(args.p)
    payload = {"command": "invert", "inputs": _inputs(args, "p"), "t": t,
               "phi_t": float(tailfn.phi(t))}
    _emit(args, payload, f"phi({t:.10g}) = {payload['phi_t']:.6g}")
    return 0


def cmd_sup(args) -> int:
    cert = applications.sup_process_bound(applications.ProcessSpec(tuple(args.sigma2)),
                                          args.tau, strict=args.strict)
    _emit(args, _cert_payload("sup", _inputs(args, "sigma2", "tau", "strict"), cert),
          _summary(cert))
    return 0


def _weights(args, m: int) -> np.ndarray:
    if args.weights is None:
        return np.full(m, 1.0 / m)
    return _matrix(args.weights).reshape(-1)


def cmd_cov(args) -> int:
    if args.points is not None:
        x = _matrix(args.points)
        stats = applications.CovarianceStats.from_distribution(x, _weights(args, x.shape[0]), args.n)
    else:
        need = ("lam_K", "tr_K", "ell2", "lam_min", "lam_max")
        if any(getattr(args, k) is None for k in need):
            raise DomainError("give --points or all of --lam-K --tr-K --ell2 --lam-min --lam-max")
        stats = applications.CovarianceStats(args.lam_K, args.tr_K, args.ell2,
                                             args.lam_min, args.lam_max, args.n)
    cert = applications.covariance_certificate(stats, args.t, args.sides)
    inputs = _inputs(args, "points", "weights", "lam_K", "tr_K", "ell2", "lam_min",
                     "lam_max", "n", "t", "sides")
    _emit(args, _cert_payload("cov", inputs, cert), _summary(cert))
    return 0


def cmd_split(args) -> int:
    x = _matrix(args.points)
    s = applications.SplitStats.from_distribution(x, _weights(args, x.shape[0]), args.d, args.gamma)
    cert = applications.split_covariance_certificate(s, args.n, args.t)
    inputs = _inputs(args, "points", "weights", "d", "gamma", "n", "t")
    _emit(args, _cert_payload("split", inputs, cert), _summary(cert))
    return 0


def cmd_gauss(args) -> int:
    if args.sigma is not None:
        cert = applications.gaussian_covariance_bound_from(_matrix(args.sigma), args.n, args.t)
    else:
        if args.lam_max is None or args.tr is None:
            raise DomainError("give --sigma or both --lam-max and --tr")
        cert = applications.gaussian_covariance_bound(args.lam_max, args.tr, args.n, args.t)
    inputs = _inputs(args, "sigma", "lam_max", "tr", "n", "t")
    _emit(args, _cert_payload("gauss", inputs, cert), _summary(cert))
    return 0


def cmd_rayleigh(args) -> int:
    r = applications.rayleigh_tail(args.gamma, args.n, args.delta)
    payload = {"command": "rayleigh", "inputs": _inputs(args, "gamma", "n", "delta"),
               "upper": r.upper, "lower": r.lower, "probability": args.delta}
    _emit(args, payload, f"quotient in [{r.lower:.6g}, {r.upper:.6g}] each side w.p. >= {1 - args.delta:.6g}")
    return 0


def cmd_eigbound(args) -> int:
    e = applications.empirical_covariance_eigen_bound(args.gamma, args.d, args.n, args.eps0, args.delta)
    payload = {"command": "eigbound", "inputs": _inputs(args, "gamma", "d", "n", "eps0", "delta"),
               "epsilon": e.epsilon, "upper": e.upper, "lower": e.lower,
               "probability": args.delta,
               "net_size": applications.covering_number(args.d, args.eps0)}
    _emit(args, payload, f"eigenvalues in [{e.lower:.6g}, {e.upper:.6g}] w.p. >= {1 - args.delta:.6g}")
    return 0


# -- sampled products -----------------------------------------------------------------


def cmd_rmm_plan(args) -> int:
    plan = rmm.build_plan(_matrix(args.a), _matrix(args.b))
    payload = {"command": "rmm-plan", "inputs": _inputs(args, "a", "b"), **plan.to_dict()}
    _emit(args, payload, f"Z = {plan.Z:.6g}, {plan.active.size}/{plan.m} active columns, "
                         f"stable ranks {plan.stable_rank_a:.4g}, {plan.stable_rank_b:.4g}")
    return 0


def cmd_rmm_mul(args) -> int:
    a, b = _matrix(args.a), _matrix(args.b)
    plan = rmm.build_plan(a, b)
    if args.variant == "precise":
        cert = rmm.certificate_precise(a, b, args.n, args.t)
    else:
        cert = rmm.certificate_simplified_for(a, b, args.n, args.t)
    est = rmm.approx_product(a, b, plan, args.n, args.seed)
    text = format_matrix(est)
    if args.out:
        write_matrix(args.out, est)
    else:
        sys.stdout.write(text)
    if args.cert:
        payload = _cert_payload("rmm-mul", _inputs(args, "a", "b", "n", "t", "seed", "variant"), cert)
        Path(args.cert).write_text(dumps(payload))
    print(f"{args.n} sampled columns; error <= {cert.absolute_deviation:.6g} "
          f"with probability <= {cert.probability.value:.6g}", file=sys.stderr)
    return 0


def cmd_rmm_size(args) -> int:
    n = rmm.sample_size(args.ra, args.rb, args.eps, args.delta)
    payload = {"command": "rmm-size", "inputs": _inputs(args, "ra", "rb", "eps", "delta"), "n": n}
    _emit(args, payload, f"n = {n}")
    return 0


# -- verification ---------------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        suites = load_suites(args.config)
    except OSError as exc:
        raise InputError(f"cannot read {args.config}: {exc.strerror or exc}") from None
    except ConfigError as exc:
        raise InputError(str(exc)) from None
    reports = []
    for s in suites:
        seed = args.seed if s.seed is None else s.seed
        reports += mc_validate_many(s.ensemble, s.kind, s.n, s.ts, s.trials, s.alpha, seed,
                                    threads=args.threads, eps=s.eps)
    if args.json:
        Path(args.json).write_text(reports_to_json(reports))
    passed = sum(r.passed for r in reports)
    _emit(args, {}, f"{passed}/{len(reports)} configurations within bound + slack",
          text=reports_to_csv(reports))
    return 1 if args.fail_on_violation and passed < len(reports) else 0


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mtails", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="write output here instead of stdout")
        return sp

    sp = add("bound", cmd_bound, "subgaussian, Bernstein or generic tail certificate")
    sp.add_argument("--kind", choices=("subgaussian", "bernstein", "generic"), required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--b", type=float, help="almost-sure bound on lambda_max(X_i)")
    sp.add_argument("--sigma2", type=float)
    sp.add_argument("--k", type=float, help="intrinsic dimension (default 1)")
    sp.add_argument("--t", type=float)
    sp.add_argument("--delta", type=float, help="target failure probability instead of --t")
    sp.add_argument("--trace", type=float, help="trace quantity (generic only)")

    sp = add("invert", cmd_invert, "solve phi(t) = p for t")
    sp.add_argument("--p", type=float, required=True)

    sp = add("sup", cmd_sup, "bound on the maximum of subgaussian variables")
    sp.add_argument("--sigma2", type=_floats, required=True, help="comma-separated variances")
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--strict", action="store_true", help="require log k >= 1.3")

    sp = add("cov", cmd_cov, "spectral-error certificate for an empirical covariance")
    sp.add_argument("--points", help="CSV of support points (rows)")
    sp.add_argument("--weights", help="CSV of point probabilities (default uniform)")
    sp.add_argument("--lam-K", dest="lam_K", type=float)
    sp.add_argument("--tr-K", dest="tr_K", type=float)
    sp.add_argument("--ell2", type=float)
    sp.add_argument("--lam-min", dest="lam_min", type=float)
    sp.add_argument("--lam-max", dest="lam_max", type=float)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--sides", choices=applications.SIDES, default="two")

    sp = add("split", cmd_split, "split covariance bound (top eigenspace plus complement)")
    sp.add_argument("--points", required=True)
    sp.add_argument("--weights")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)

    sp = add("gauss", cmd_gauss, "norm bound for a Gaussian empirical covariance")
    sp.add_argument("--sigma", help="CSV covariance matrix")
    sp.add_argument("--lam-max", dest="lam_max", type=float)
    sp.add_argument("--tr", type=float)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)

    sp = add("rayleigh", cmd_rayleigh, "Rayleigh quotient bounds for one direction")
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)

    sp = add("eigbound", cmd_eigbound, "extreme-eigenvalue bounds via a covering net")
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eps0", type=float, default=0.25)
    sp.add_argument("--delta", type=float, default=0.05)

    sp = add("rmm-plan", cmd_rmm_plan, "column sampling distribution for A B^T")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)

    sp = add("rmm-mul", cmd_rmm_mul, "sampled estimate of A B^T (CSV) and its certificate")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, default=math.log(20.0))
    sp.add_argument("--variant", choices=("precise", "simplified"), default="precise")
    sp.add_argument("--cert", help="write the certificate JSON here")
    sp.add_argument("--seed", type=int, default=None)

    sp = add("rmm-size", cmd_rmm_size, "number of columns for a relative error target")
    sp.add_argument("--ra", type=float, required=True)
    sp.add_argument("--rb", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)

    sp = add("verify", cmd_verify, "Monte Carlo validation suites from an INI file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--json", help="also write the reports as JSON")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    sp.add_argument("--fail-on-violation", action="store_true",
                    help="exit 1 if any configuration exceeds bound + slack")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if hasattr(args, "seed"):
            rmm.make_rng(args.seed)
        return args.func(args)
    except MtailsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
