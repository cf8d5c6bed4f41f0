"""Command-line front-end.

Subcommands: ``estimate``, ``oracle``, ``bench``, ``factor``, ``rescale``.

Exit codes: 0 success, 2 parse/usage error, 3 precondition violation,
4 memory cap exceeded, 5 I/O error on outputs.
"""

import argparse
import csv
import json
import sys
import time

import numpy as np

from .bounds import bound_toeplitz_via_circ, figure1_curve, min_admissible_n0
from .circulant import norm2_circ
from .errors import GramNormError, MemoryCapError
from .gram import gram_iteration
from .numerics import as_kernel, as_matrix
from .oracle import (
    DEFAULT_ELEMENT_CAP,
    DEFAULT_SEED,
    _check_cap,
    conv_operator,
    conv_power_iteration,
    materialize_circulant,
    materialize_toeplitz,
    sigma1_lanczos_lower,
    sigma1_sandwich,
)
from .rescaling import conv_spectral_rescale, rescale_kernel, spectral_rescale
from .toeplitz import norm2_toep

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_MEMORY, EXIT_IO = 0, 2, 3, 4, 5

BENCH_HEADER = [
    "method", "c_in", "c_out", "k", "n", "iters", "trial",
    "estimate", "oracle_sigma1", "rel_err", "elapsed_ms",
]
FACTOR_HEADER = ["n0", "k", "t", "alpha", "factor"]


class ParseError(Exception):
    """Input file or flag combination rejected before any computation."""


# -- I/O helpers -------------------------------------------------------------

def fmt(x):
    """17 significant digits: enough to round-trip any float64."""
    return format(float(x), ".17g")


def _json_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return json.dumps(v)


def dumps(obj):
    """JSON object with floats written at 17 significant digits."""
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in obj.items()) + "}"


def read_array_file(path):
    """Read ``{"shape": [...], "data": [...]}``; returns a float64 array."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict) or "shape" not in doc or "data" not in doc:
        raise ParseError(f"{path}: expected an object with 'shape' and 'data'")
    shape, data = doc["shape"], doc["data"]
    if (not isinstance(shape, list) or len(shape) not in (2, 4)
            or not all(isinstance(s, int) and s >= 1 for s in shape)):
        raise ParseError(f"{path}: shape must be 2 or 4 positive integers, got {shape}")
    if not isinstance(data, list) or len(data) != int(np.prod(shape)):
        raise ParseError(f"{path}: data length does not match shape {shape}")
    try:
        arr = np.array(data, dtype=np.float64).reshape(shape)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: non-numeric data") from exc
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{path}: data contains non-finite values")
    return arr


def array_to_json(arr):
    arr = np.asarray(arr, dtype=np.float64)
    shape = ", ".join(str(s) for s in arr.shape)
    data = ", ".join(fmt(x) for x in arr.ravel())
    return f'{{"shape": [{shape}], "data": [{data}]}}\n'


def write_array_file(path, arr):
    with open(path, "w") as fh:
        fh.write(array_to_json(arr))


def _read_kernel(path):
    arr = read_array_file(path)
    if arr.ndim != 4:
        raise ParseError(f"{path}: expected a 4-D kernel, got shape {list(arr.shape)}")
    return arr


def _open_output(path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _int_list(text):
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    return vals


# -- commands ----------------------------------------------------------------

def cmd_estimate(args):
    arr = read_array_file(args.path)
    method = args.method
    if method == "toep" and args.n is not None:
        raise ParseError("--n is not accepted for method toep (the bound is size-independent)")
    if method in ("circ", "circ-approx", "power") and args.n is None:
        raise ParseError(f"--n is required for method {method}")
    if arr.ndim == 2 and method != "gram-dense":
        raise ParseError(f"method {method} needs a 4-D kernel file")
    if method == "gram-dense" and arr.ndim == 4 and args.n is None:
        raise ParseError("--n is required to materialize a kernel for gram-dense")

    t0 = time.perf_counter()
    if method == "gram-dense":
        if arr.ndim == 2:
            W = as_matrix(arr)
        elif args.padding == "circular":
            W = materialize_circulant(arr, args.n, args.element_cap)
        else:
            W = materialize_toeplitz(arr, args.n, args.element_cap)
        cert = gram_iteration(W, args.iters, args.norm)
    elif method == "circ":
        cert = norm2_circ(arr, args.n, args.iters)
    elif method == "circ-approx":
        cert = bound_toeplitz_via_circ(arr, args.n, args.iters, strict=args.strict)
    elif method == "toep":
        cert = norm2_toep(arr, args.iters, args.variant)
    else:
        cert = conv_power_iteration(arr, args.n, args.padding, args.iters, args.seed)
    elapsed = 0.0 if args.no_timing else (time.perf_counter() - t0) * 1e3
    print(dumps({
        "value": cert.value,
        "method": cert.method,
        "iterations": cert.iterations,
        "is_upper_bound": cert.is_upper_bound,
        "elapsed_ms": elapsed,
    }))
    return EXIT_OK


def cmd_oracle(args):
    K = _read_kernel(args.path)
    if args.padding == "circular":
        M = materialize_circulant(K, args.n, args.element_cap)
    else:
        M = materialize_toeplitz(K, args.n, args.element_cap)
    cert = sigma1_sandwich(M, tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    print(dumps(cert.to_dict()))
    return EXIT_OK


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0) * 1e3


def bench_rows(channels, k, n, iters, trials, seed, power_iters=100,
               element_cap=None, timing=True):
    """Rows of the benchmark table (see ``BENCH_HEADER``)."""
    rows = []
    rng = np.random.default_rng(seed)
    # largest Gram count admissible for the circulant-to-zero-padding factor
    approx_iters = iters
    while approx_iters > 1 and min_admissible_n0(k, approx_iters) > n:
        approx_iters -= 1
    for c in channels:
        for trial in range(trials):
            K = rng.standard_normal((c, c, k, k))
            _check_cap(as_kernel(K), n, element_cap)
            oracle = sigma1_lanczos_lower(conv_operator(K, n, "zero"), seed=seed)
            runs = [
                ("circ", iters, lambda: norm2_circ(K, n, iters)),
                ("circ-approx", approx_iters, lambda: bound_toeplitz_via_circ(K, n, approx_iters)),
                ("toep", iters, lambda: norm2_toep(K, iters, "inf")),
                ("power", power_iters,
                 lambda: conv_power_iteration(K, n, "zero", power_iters, seed + trial)),
            ]
            for name, used_iters, fn in runs:
                cert, ms = _timed(fn)
                rel = (cert.value - oracle) / oracle if oracle > 0 else 0.0
                rows.append([name, c, c, k, n, used_iters, trial, cert.value, oracle, rel,
                             ms if timing else 0.0])
    return rows


def cmd_bench(args):
    fh = _open_output(args.out)
    with fh:
        rows = bench_rows(args.channels, args.k, args.n, args.iters, args.trials, args.seed,
                          args.power_iters, args.element_cap, not args.no_timing)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        for row in rows:
            w.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    return EXIT_OK


def cmd_factor(args):
    rows, omitted = figure1_curve(args.n0_min, args.n0_max, args.k, args.t, strict=args.strict)
    fh = _open_output(args.out)
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FACTOR_HEADER)
        for row in rows:
            w.writerow([row["n0"], row["k"], row["t"], fmt(row["alpha"]), fmt(row["factor"])])
    for n0, t in omitted:
        print(f"omitted: n0={n0} k={args.k} t={t} "
              f"(minimal admissible n0 is {min_admissible_n0(args.k, t, args.strict)})",
              file=sys.stderr)
    return EXIT_OK


def cmd_rescale(args):
    arr = read_array_file(args.path)
    if args.mode == "dense":
        if arr.ndim != 2:
            raise ParseError("mode dense needs a 2-D matrix file")
        diag = spectral_rescale(arr, args.t)
        out = arr * diag.factors[None, :]
        cert = sigma1_sandwich(out, tol=args.tol)
        report = {"mode": "dense", "t": args.t, "sigma1": cert.upper,
                  "sigma1_lower": cert.lower, "sigma1_upper": cert.upper}
    else:
        if arr.ndim != 4:
            raise ParseError("mode conv needs a 4-D kernel file")
        diag = conv_spectral_rescale(arr, args.t)
        out = rescale_kernel(arr, diag)
        _check_cap(out, args.n, args.element_cap)
        sigma = sigma1_lanczos_lower(materialize_toeplitz(out, args.n, args.element_cap),
                                     seed=args.seed)
        report = {"mode": "conv", "t": args.t, "n": args.n, "sigma1": sigma}
    try:
        write_array_file(args.out, out)
    except OSError as exc:
        raise OSError(f"cannot write {args.out}: {exc}") from exc
    print(dumps(report))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser():
    p = _Parser(prog="gramnorm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_cap(sp):
        sp.add_argument("--element-cap", type=int, default=DEFAULT_ELEMENT_CAP,
                        help="refuse dense operators with more entries than this")

    e = sub.add_parser("estimate", help="spectral norm estimate of a kernel or matrix")
    e.add_argument("path")
    e.add_argument("--method", required=True,
                   choices=["gram-dense", "circ", "toep", "circ-approx", "power"])
    e.add_argument("--n", type=int)
    e.add_argument("--iters", type=int, default=6)
    e.add_argument("--variant", choices=["inf", "fro", "fro-literal"], default="inf")
    e.add_argument("--padding", choices=["zero", "circular"], default="zero")
    e.add_argument("--norm", choices=["frobenius", "inf", "one"], default="frobenius")
    e.add_argument("--strict", action="store_true", help="conservative correction factor")
    e.add_argument("--seed", type=int, default=DEFAULT_SEED)
    e.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0")
    add_cap(e)
    e.set_defaults(func=cmd_estimate)

    o = sub.add_parser("oracle", help="sandwich certificate on the materialized operator")
    o.add_argument("path")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--padding", choices=["zero", "circular"], default="zero")
    o.add_argument("--tol", type=float, default=1e-10)
    o.add_argument("--max-iter", type=int, default=200)
    o.add_argument("--seed", type=int, default=DEFAULT_SEED)
    add_cap(o)
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="accuracy/timing sweep against the oracle")
    b.add_argument("--channels", type=_int_list, default=[1, 2, 4, 8])
    b.add_argument("--k", type=int, default=3)
    b.add_argument("--n", type=int, default=32)
    b.add_argument("--iters", type=int, default=6)
    b.add_argument("--power-iters", type=int, default=100)
    b.add_argument("--trials", type=int, default=2)
    b.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b.add_argument("--out", required=True)
    b.add_argument("--no-timing", action="store_true", help="write elapsed_ms as 0")
    add_cap(b)
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("factor", help="correction factor curves as CSV")
    f.add_argument("--k", type=int, default=3)
    f.add_argument("--t", type=_int_list, default=[1, 3, 5, 6])
    f.add_argument("--n0-min", type=int, default=1)
    f.add_argument("--n0-max", type=int, default=224)
    f.add_argument("--strict", action="store_true")
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_factor)

    r = sub.add_parser("rescale", help="spectrally rescale a matrix or kernel")
    r.add_argument("path")
    r.add_argument("--t", type=int, default=3)
    r.add_argument("--mode", choices=["dense", "conv"], default="dense")
    r.add_argument("--n", type=int, default=16, help="input size for the conv check")
    r.add_argument("--tol", type=float, default=1e-11)
    r.add_argument("--seed", type=int, default=DEFAULT_SEED)
    r.add_argument("--out", required=True)
    add_cap(r)
    r.set_defaults(func=cmd_rescale)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ParseError as exc:
        print(f"gramnorm: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MemoryCapError as exc:
        print(f"gramnorm: error: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    except GramNormError as exc:
        print(f"gramnorm: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"gramnorm: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
