"""Command line entry point: ``catrecip <command> [flags]``.

Every command prints one JSON document on stdout (also written to ``--out``)
and a short human-readable summary on stderr.  ``--n`` counts variables, so
``--k 2 --n 3`` is the space of ternary quartics.

Exit codes: 0 success, 1 check failure, 2 input error, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

THREADS_ENV = "CATRECIP_THREADS"
EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


def _set_threads(n):
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=2, help="half the form degree")
    common.add_argument("--n", type=int, default=3, help="number of variables")
    common.add_argument("--d", type=int, default=3, help="form degree for interpolation")
    common.add_argument("--rank", type=int, default=None, help="rank of the source point")
    common.add_argument("--count", type=int, default=None, help="number of samples")
    common.add_argument("--prime", type=int, default=None, help="first prime")
    common.add_argument("--prime2", type=int, default=None, help="second prime")
    common.add_argument("--seed", type=int, default=0, help="root random seed")
    common.add_argument("--threads", type=int,
                        default=int(os.environ.get(THREADS_ENV, "0") or 0),
                        help=f"BLAS thread cap (default ${THREADS_ENV})")
    common.add_argument("--heavy", action="store_true", help="allow hour-scale eliminations")
    common.add_argument("--loops", type=int, default=200, help="monodromy loop budget")
    common.add_argument("--budget", type=float, default=None,
                        help="wall-clock budget in seconds for monodromy runs")
    common.add_argument("--out", default=None, help="also write the JSON here")

    p = argparse.ArgumentParser(prog="catrecip", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common], help="dimensions of Cat(k,n)")
    v = sub.add_parser("verify-paper", parents=[common], help="run the reproduction suite")
    v.add_argument("--level", choices=["quick", "full"], default="quick")
    v.add_argument("--only", type=int, nargs="*", default=None, help="check ids to run")
    sub.add_parser("sample", parents=[common], help="sample the reciprocal variety")
    sub.add_parser("hilbert", parents=[common], help="HF_d of the reciprocal variety")
    sub.add_parser("span", parents=[common], help="span dimension of an image cloud")
    sub.add_parser("image", parents=[common], help="image dimension of a rank-r point")
    sub.add_parser("secant-dim", parents=[common], help="secant variety dimensions")
    sub.add_parser("degree", parents=[common], help="degree of the reciprocal variety")
    sub.add_parser("mldegree", parents=[common], help="ML-degree of the concentration model")
    o = sub.add_parser("orthogonal", parents=[common], help="orthogonal space analysis")
    o.add_argument("--rank2", action="store_true", help="also run the rank-two probe (slow)")
    return p


def _primes(args):
    from .fields import DEFAULT_PRIMES, FieldError, GF
    ps = (args.prime or DEFAULT_PRIMES[0], args.prime2 or DEFAULT_PRIMES[1])
    for p in ps:
        try:
            GF(p)
        except FieldError:
            raise InputError(f"{p} is not prime") from None
        if p <= 20:
            raise InputError(f"prime {p} is too small for adjugates of these sizes")
    if ps[0] == ps[1]:
        raise InputError("the two primes must differ")
    return ps


def _space(args):
    from .spaces import SizeError, build_cat_space
    if args.n < 2 or args.k < 1:
        raise InputError("need --k >= 1 and --n >= 2 variables")
    try:
        return build_cat_space(args.k, args.n - 1)
    except SizeError as exc:
        raise InputError(str(exc)) from exc


def _rank(args, space):
    if args.rank is None:
        raise InputError("--rank is required")
    if not 1 <= args.rank <= space.m:
        raise InputError(f"--rank must lie in [1, {space.m}]")
    return args.rank


def _rng(args, *tag):
    import numpy as np
    return np.random.default_rng([args.seed, *tag])


def cmd_info(args):
    s = _space(args)
    return {"k": s.k, "n": args.n, "m": s.m, "dim": s.dim, "codim": s.codim,
            "sym_dim": s.sym_dim, "projective_space_dim": s.dim - 1,
            "ambient_projective_dim": s.sym_dim - 1}


def cmd_sample(args):
    from .fields import GF
    from .sampling import sample_reciprocal
    s = _space(args)
    p = _primes(args)[0]
    cloud = sample_reciprocal(s, args.count or 100, GF(p), _rng(args, 1))
    return json.loads(cloud.to_json())


def cmd_hilbert(args):
    from .fields import GF
    from .sampling import (hilbert_count, monomial_count, multiples_rank, sample_reciprocal,
                           vanishing_forms)
    s = _space(args)
    ps = _primes(args)
    cols = monomial_count(s.sym_dim, args.d)
    if cols > 5000 and not args.heavy:
        raise BudgetError(f"degree {args.d} needs a {cols}-column elimination; pass --heavy")
    count = args.count or cols + 50
    clouds = [sample_reciprocal(s, count, GF(p), _rng(args, 2, i)) for i, p in enumerate(ps)]
    hf = hilbert_count(clouds[0], args.d, check=clouds[1])
    out = {"d": args.d, "HF": hf, "monomials": cols, "samples": count}
    if args.d >= 2:
        lower = args.d - 1
        lc = monomial_count(s.sym_dim, lower)
        small = sample_reciprocal(s, lc + 50, GF(ps[0]), _rng(args, 3))
        forms = vanishing_forms(small, lower)
        if len(forms):
            out[f"rank_of_degree_{lower}_multiples"] = multiples_rank(forms, 1)
    return out


def _image_point(args, s):
    from .fields import GF
    from .spaces import rank_r_point
    return rank_r_point(s, _rank(args, s), _rng(args, 4), GF(_primes(args)[0]))


def cmd_span(args):
    from .loci import image_cloud
    from .sampling import span_dimension
    s = _space(args)
    A = _image_point(args, s)
    cloud = image_cloud(s, A, args.count or s.sym_dim + 40, _rng(args, 5))
    return {"rank": args.rank, "samples": len(cloud), "span_dim": span_dimension(cloud)}


def cmd_image(args):
    from .loci import image_cloud, image_dimension_of_rank
    from .sampling import span_dimension
    s = _space(args)
    r = _rank(args, s)
    dim = image_dimension_of_rank(s, r, _primes(args), args.seed)
    A = _image_point(args, s)
    cloud = image_cloud(s, A, args.count or s.sym_dim + 40, _rng(args, 5))
    out = {"rank": r, "image_dim": dim, "span_dim": span_dimension(cloud)}
    if args.out:
        out["cloud"] = json.loads(cloud.to_json())
    return out


def cmd_secant_dim(args):
    from .spaces import secant_dimension
    s = _space(args)
    ranks = [_rank(args, s)] if args.rank else list(range(1, s.m + 1))
    return {"dims": {r: secant_dimension(s, r, _primes(args), args.seed) for r in ranks}}


def _mono_opts(args):
    from .homotopy.monodromy import MonodromyOptions
    return MonodromyOptions(max_loops=args.loops, time_budget=args.budget)


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


def cmd_degree(args):
    from .homotopy.systems import degree_reciprocal
    s = _space(args)
    res = degree_reciprocal(s, _rng(args, 6), _mono_opts(args), log=_log)
    out = {"degree": res["degree"], "complete": res["complete"], "trace_test": res["trace_test"],
           "stats": res["stats"], "witness": res["witness"].to_json()}
    if not res["stats"]["stabilized"]:
        out["lower_bound"] = True
    return out


def cmd_mldegree(args):
    from .homotopy.systems import ml_degree
    s = _space(args)
    res = ml_degree(s, _rng(args, 7), _mono_opts(args), log=_log)
    out = {"ml_degree": res["ml_degree"], "complete": res["complete"], "stats": res["stats"],
           "witness": res["witness"].to_json()}
    if not res["stats"]["stabilized"]:
        out["lower_bound"] = True
    return out


def cmd_orthogonal(args):
    from .loci import orthogonal_intersection_probe, orthogonal_rank_profile
    from .spaces import rank_r_point
    from .fields import GF
    s = _space(args)
    prof = orthogonal_rank_profile(s, _rng(args, 8), rank2=args.rank2)
    for key in ("rank1", "rank2"):
        if key in prof:
            prof[key]["solutions"] = [[[z.real, z.imag] for z in v]
                                      for v in prof[key]["solutions"]]
    if args.rank:
        A = rank_r_point(s, _rank(args, s), _rng(args, 9), GF(_primes(args)[0]))
        prof["probe"] = orthogonal_intersection_probe(s, A, args.count or 1000, _rng(args, 10))
    return prof


def cmd_verify(args):
    from .verify import SuiteConfig, run_suite
    cfg = SuiteConfig(level=args.level, seed=args.seed, primes=_primes(args), heavy=args.heavy,
                      samples=args.count or 10_000, loops=args.loops, budget=args.budget,
                      log=_log)
    report = run_suite(cfg, only=set(args.only) if args.only else None)
    for c in report["checks"]:
        mark = {True: "PASS", False: "FAIL", None: "SKIP"}[c["passed"]]
        _log(f"{mark}  {c['id']:>2}  {c['name']}  ({c['seconds']}s)")
    return report


COMMANDS = {"info": cmd_info, "verify-paper": cmd_verify, "sample": cmd_sample,
            "hilbert": cmd_hilbert, "span": cmd_span, "image": cmd_image,
            "secant-dim": cmd_secant_dim, "degree": cmd_degree, "mldegree": cmd_mldegree,
            "orthogonal": cmd_orthogonal}


def _jsonable(x):
    import numpy as np
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    _set_threads(args.threads)
    t0 = time.time()
    code = EXIT_OK
    try:
        _primes(args)
        result = COMMANDS[args.command](args)
    except InputError as exc:
        _log(f"input error: {exc}")
        return EXIT_INPUT
    except BudgetError as exc:
        _log(f"budget: {exc}")
        return EXIT_BUDGET
    from .fields import DEFAULT_PRIMES
    doc = {"command": args.command, "seed": args.seed,
           "primes": [args.prime or DEFAULT_PRIMES[0], args.prime2 or DEFAULT_PRIMES[1]],
           "k": args.k, "n": args.n, "seconds": round(time.time() - t0, 2),
           "result": _jsonable(result)}
    text = json.dumps(doc)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.command == "verify-paper" and not result["passed"]:
        code = EXIT_CHECK
    if isinstance(result, dict) and result.get("lower_bound"):
        code = EXIT_BUDGET
    return code


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
