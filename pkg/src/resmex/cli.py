"""Command-line entry point.

Exit codes: 0 success (or every suite trial passed), 1 a suite trial failed,
2 usage or validation error, 3 computation error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import divergence as dv
from . import extension as ex
from .entangle import BipartiteCut, schmidt_decompose, schmidt_number_ppt
from .errors import IndeterminateValue, ResmexError
from .formats import load_state
from .suites import SUITES, SuiteConfig, run_suite

OK, SUITE_FAILED, USAGE, COMPUTE = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _num(v):
    """Round to 12 significant digits; infinities become strings."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return float(f"{v:.12g}")
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def _emit(record: dict, out: str | None) -> None:
    text = json.dumps(_num(record))
    if out:
        Path(out).write_text(text + "\n")
    print(text)


def _default_seed() -> int:
    raw = os.environ.get("RESMEX_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _Usage(f"RESMEX_SEED must be an integer, got {raw!r}") from None


def _alpha(text):
    if text is None:
        return None
    if text.strip().lower() in ("inf", "infinity", "+inf"):
        return math.inf
    return float(text)


def _classical_spec(args):
    return (args.classical, _alpha(args.alpha))


# -- commands ---------------------------------------------------------------

def cmd_compute(args) -> int:
    name = args.divergence
    if name not in dv.REGISTRY:
        raise _Usage(f"unknown divergence {name!r}; choose from {', '.join(sorted(dv.REGISTRY))}")
    spec = dv.REGISTRY[name]
    alpha = _alpha(args.alpha)
    if spec.needs_alpha and alpha is None:
        raise _Usage(f"--alpha is required for {name}")
    if spec.needs_epsilon and args.epsilon is None:
        raise _Usage(f"--epsilon is required for {name}")
    rho, sigma = load_state(args.rho), load_state(args.sigma)
    value = dv.compute(name, rho, sigma, alpha=alpha, epsilon=args.epsilon)
    diagnostics = {
        "dim": rho.dim,
        "support_contained": dv.support_contained(rho, sigma),
        "support_overlap": dv.support_overlap(rho, sigma),
    }
    _emit({"divergence": name, "alpha": alpha, "epsilon": args.epsilon, "value": value,
           "diagnostics": diagnostics}, args.out)
    return OK


def cmd_extend(args) -> int:
    rho, sigma = load_state(args.rho), load_state(args.sigma)
    if args.kind == "subnorm":
        if args.form in ex.CLOSED_FORMS:
            value = ex.CLOSED_FORMS[args.form](rho, sigma)
        elif args.form in dv.REGISTRY:
            value = ex.extend_subnormalized(args.form, rho, sigma, _alpha(args.alpha), args.epsilon)
        else:
            choices = sorted(ex.CLOSED_FORMS) + sorted(dv.REGISTRY)
            raise _Usage(f"unknown --form {args.form!r}; choose from {', '.join(choices)}")
        record = {"kind": "subnorm", "form": args.form, "value": value, "direction": ex.EXACT}
    elif args.kind == "maximal-classical":
        spec = _classical_spec(args)
        if args.method == "ansatz":
            bound = ex.maximal_classical_extension_ansatz(spec, rho, sigma)
        elif args.method == "pure":
            w, v = np.linalg.eigh(rho.matrix)
            if w[-2:-1].size and w[-2] > 1e-9:
                raise _Usage("--method pure needs a rank-one --rho")
            bound = ex.maximal_classical_extension_pure(spec, v[:, -1], sigma)
        else:
            bound = ex.maximal_classical_extension_search(spec, rho, sigma, args.trials, _seed(args))
        record = {"kind": args.kind, "method": args.method, **ex.describe(bound)}
    else:
        strategy = _strategy(args)
        bound = ex.minimal_classical_extension_lower(_classical_spec(args), rho, sigma, strategy)
        record = {"kind": args.kind, "strategy": args.strategy, **ex.describe(bound)}
    _emit(record, args.out)
    return OK


def _seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _strategy(args):
    s = args.strategy
    if s in ("pencil", dv.PENCIL):
        return dv.PENCIL
    if s.startswith("random:"):
        try:
            k = int(s.split(":", 1)[1])
        except ValueError:
            raise _Usage(f"bad strategy {s!r}; use random:K") from None
        return dv.RandomProjective(k, _seed(args))
    raise _Usage(f"unknown strategy {s!r}; use pencil or random:K")


def _dims(text: str):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise _Usage(f"--dims must be a comma-separated list of integers, got {text!r}") from None


def _write_report(report, out: str, fmt: str | None) -> None:
    fmt = fmt or ("csv" if out.lower().endswith(".csv") else "json")
    Path(out).write_text(report.to_csv() if fmt == "csv" else report.to_json())


def cmd_suite(args) -> int:
    if args.name not in SUITES:
        raise _Usage(f"unknown suite {args.name!r}; available: {', '.join(sorted(SUITES))}")
    extra = {}
    if args.extra:
        try:
            extra = json.loads(args.extra)
        except json.JSONDecodeError as exc:
            raise _Usage(f"--extra is not valid JSON: {exc.msg}") from None
    config = SuiteConfig(args.name, args.trials, _dims(args.dims), _seed(args), args.slack, extra, args.workers)
    report = run_suite(config)
    if args.out:
        _write_report(report, args.out, args.format)
    print(report.summary())
    return OK if report.all_passed else SUITE_FAILED


def _floats(text: str):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise _Usage(f"expected comma-separated numbers, got {text!r}") from None


def cmd_aep(args) -> int:
    p, q = _floats(args.p), _floats(args.q)
    if args.rho or args.sigma:
        if not (args.rho and args.sigma):
            raise _Usage("--rho and --sigma must be given together")
        rho, sigma = load_state(args.rho).matrix, load_state(args.sigma).matrix
    else:
        if len(p) != len(q):
            raise _Usage("--p and --q must have the same length")
        rho, sigma = np.diag(p).astype(complex), np.diag(q).astype(complex)
    truth = dv.umegaki(rho, sigma)
    ds = ex.regularized_rate("ds", rho, sigma, args.n_max, epsilon=args.epsilon)
    dm = ex.regularized_rate("dmax", rho, sigma, args.n_max)
    lines = ["n,rate,gap,dmax_rate"]
    for (n, rate), (_, mrate) in zip(ds.pairs(), dm.pairs()):
        lines.append(f"{n},{rate:.12g},{abs(rate - truth):.12g},{mrate:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(f"# umegaki {truth:.12g}\n" + text)
    return OK


def cmd_schmidt(args) -> int:
    state = load_state(args.state)
    cut = BipartiteCut.parse(args.cut)
    record = {"cut": args.cut, "schmidt_number": schmidt_number_ppt(state, cut), "method": "ppt"}
    w, v = np.linalg.eigh(state.matrix)
    if w.size < 2 or w[-2] <= 1e-9:
        record["schmidt_rank"] = schmidt_decompose(v[:, -1], cut).rank
    _emit(record, args.out)
    return OK


def cmd_list_suites(args) -> int:
    for name in sorted(SUITES):
        print(f"{name:16s} {SUITES[name].about}")
    return OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resmex", description="Quantum divergences and their optimal extensions.")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate a divergence on two state files")
    c.add_argument("--divergence", required=True)
    c.add_argument("--alpha")
    c.add_argument("--epsilon", type=float)
    c.add_argument("--rho", required=True)
    c.add_argument("--sigma", required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compute)

    e = sub.add_parser("extend", help="evaluate an extension with its bound direction")
    e.add_argument("--kind", required=True, choices=["subnorm", "maximal-classical", "minimal-classical"])
    e.add_argument("--form", default="generalized-fidelity", help="closed form or registry divergence (subnorm)")
    e.add_argument("--classical", default="kl", help="kl, renyi, dmin, dmax, trace_distance, fidelity")
    e.add_argument("--alpha")
    e.add_argument("--epsilon", type=float)
    e.add_argument("--method", default="ansatz", choices=["ansatz", "search", "pure"])
    e.add_argument("--strategy", default="pencil", help="pencil or random:K")
    e.add_argument("--trials", type=int, default=200)
    e.add_argument("--seed", type=int)
    e.add_argument("--rho", required=True)
    e.add_argument("--sigma", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_extend)

    s = sub.add_parser("suite", help="run a randomized property suite")
    s.add_argument("--name", required=True)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--dims", default="2")
    s.add_argument("--seed", type=int)
    s.add_argument("--slack", type=float)
    s.add_argument("--extra", help="JSON object of suite-specific parameters")
    s.add_argument("--workers", type=int)
    s.add_argument("--out")
    s.add_argument("--format", choices=["json", "csv"])
    s.set_defaults(func=cmd_suite)

    a = sub.add_parser("aep", help="finite-n information-spectrum trace")
    a.add_argument("--p", default="0.9,0.1")
    a.add_argument("--q", default="0.5,0.5")
    a.add_argument("--rho")
    a.add_argument("--sigma")
    a.add_argument("--epsilon", type=float, default=0.05)
    a.add_argument("--n-max", type=int, default=8)
    a.add_argument("--out")
    a.set_defaults(func=cmd_aep)

    k = sub.add_parser("schmidt", help="Schmidt number of a bipartite state")
    k.add_argument("--state", required=True)
    k.add_argument("--cut", required=True)
    k.add_argument("--out")
    k.set_defaults(func=cmd_schmidt)

    ls = sub.add_parser("list-suites", help="list registered property suites")
    ls.set_defaults(func=cmd_list_suites)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except IndeterminateValue as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return COMPUTE
    except (ResmexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except Exception as exc:  # anything else is a failure inside a computation
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return COMPUTE


if __name__ == "__main__":
    sys.exit(main())
