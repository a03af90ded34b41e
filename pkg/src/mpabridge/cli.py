"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage or input.
Floats are written with 17 significant digits; JSON is indented with sorted keys.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path

import numpy as np

from . import mixture as mx
from . import mpa, verify
from .errors import MpaBridgeError
from .models import harmonic, ring, tasep
from .oracle import ExactDistribution, empirical, enumerate_measure, enumerate_mixture, total_variation
from .spectral import perron

MODELS = ("tasep-open-1", "tasep-open-general", "tasep-ring-2class", "harmonic")


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _dump_json(obj, out) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _open_out(path):
    if path is None:
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _load_any(path):
    """An MPA spec or a mixture, told apart by their JSON keys."""
    obj = json.loads(Path(path).read_text())
    if "matrices" in obj:
        return mpa.from_json(obj)
    if "kernel" in obj:
        return mx.from_json(obj)
    raise UsageError(f"{path}: neither an MPA spec nor a mixture file")


def _tasep_params(args) -> tasep.TasepParams:
    return tasep.TasepParams(args.alpha, args.beta, args.n, args.bmax)


def model_spec(args):
    """``(spec, mixture)`` for a finite model; either may be None."""
    if args.model == "tasep-open-1":
        p = _tasep_params(args)
        return tasep.tasep_case1_mpa(p), tasep.tasep_case1_mixture(p)
    if args.model == "tasep-open-general":
        p = _tasep_params(args)
        return tasep.tasep_general_mpa(p), tasep.tasep_general_mixture(p)
    if args.model == "tasep-ring-2class":
        return ring.ring_trace_spec(args.n), ring.ring_anchor_mixture(args.n)
    raise UsageError(f"model {args.model!r} has no finite matrix form")


def _source(args):
    """``(spec, mixture)`` from ``--spec`` or ``--model``."""
    if args.spec:
        obj = _load_any(args.spec)
        if isinstance(obj, mpa.MpaSpec):
            return obj, None
        return mpa.from_mixture(obj), obj
    if args.model:
        return model_spec(args)
    raise UsageError("give --spec FILE or --model NAME")


def _parse_word(text: str, A: int) -> np.ndarray:
    sep = "," if "," in text else "." if "." in text else None
    parts = text.split(sep) if sep else list(text)
    try:
        w = np.array([int(c, 10 if sep else 36) for c in parts], dtype=np.int64)
    except ValueError as exc:
        raise UsageError(f"cannot parse word {text!r}") from exc
    if np.any(w >= A):
        raise UsageError(f"word {text!r} uses letters outside 0..{A - 1}")
    return w


def cmd_decompose(args) -> int:
    spec, _ = _source(args)
    if args.model == "tasep-ring-2class":
        # the ring with its anchor site removed is an open chain pinned at 0
        spec = ring.ring_anchored_spec(args.n)
        mix = ring.ring_anchored_decompose(args.n)
        resid = ring.ring_closed_form_residual()
    elif spec.is_trace:
        raise UsageError("decompose needs boundary vectors, not a trace")
    elif args.model in ("tasep-open-1", "tasep-open-general"):
        p = _tasep_params(args)
        mix = tasep.tasep_case1_decompose(p) if args.model == "tasep-open-1" else tasep.tasep_general_decompose(p)
        # closed-form pair checked away from the truncation edge
        key = "case1" if args.model == "tasep-open-1" else "general"
        resid = tasep.closed_form_residuals(args.alpha, args.beta)[key]
    else:
        resid = perron(spec.M, tol=args.tol).residual
        mix = mx.decompose(spec, tol=args.tol)
    print(f"lambda,{fmt(mix.lam)}")
    print(f"perron_residual,{fmt(resid)}")
    print(f"zn_relation_error,{fmt(mx.znrelation_check(spec, mix))}")
    k = min(5, mix.bridge.states)
    for b in range(k):
        print(f"P_row_{b}," + ",".join(fmt(v) for v in mix.bridge.P[b, :k]))
    if args.output:
        _dump_json(mx.to_json(mix), args.output)
    return 0


def cmd_eval(args) -> int:
    if args.model == "harmonic":
        p = _harmonic_params(args)
        word = _parse_word(args.word, np.iinfo(np.int64).max)
        print(f"quadrature,{fmt(harmonic.harmonic_exact_small(p, word))}")
        if p.N <= 2:
            print(f"table,{fmt(harmonic.harmonic_table(p, K=int(word.max()) + 1).prob(word))}")
        return 0
    spec, mix = _source(args)
    word = _parse_word(args.word, spec.alphabet_size)
    p_mpa = mpa.probability(spec, word)
    print(f"mpa,{fmt(p_mpa)}")
    if mix is None and not spec.is_trace:
        mix = mx.decompose(spec, tol=args.tol)
    if mix is not None and mix.N == spec.N:
        p_mix = mx.mixture_probability(mix, word)
        print(f"mixture,{fmt(p_mix)}")
        print(f"difference,{fmt(abs(p_mpa - p_mix))}")
    return 0


def _exact(args) -> ExactDistribution:
    if args.model == "tasep-ring-2class":
        if args.n1 is None or args.n2 is None:
            return ring.ring_grand(args.n)
        return ring.ring_canonical(ring.RingParams(args.n, args.n1, args.n2))
    if args.model == "harmonic":
        return harmonic.harmonic_table(_harmonic_params(args))
    spec, mix = _source(args)
    if args.oracle and mix is not None:
        return enumerate_mixture(mix)
    return enumerate_measure(spec)


def _harmonic_params(args) -> harmonic.HarmonicParams:
    return harmonic.HarmonicParams(args.ml, args.mr, args.n, args.lambda_rate)


def cmd_sample(args) -> int:
    # resolve the exact law first so an unsupported --tv fails before any output
    exact = _exact(args) if args.tv else None
    rng = np.random.default_rng(args.seed)
    extra = None
    if args.model == "harmonic":
        words, hidden = harmonic.harmonic_sample(_harmonic_params(args), args.samples, rng, return_hidden=True)
        hfmt = fmt
    elif args.model == "tasep-ring-2class":
        if args.n1 is not None and args.n2 is not None:
            words = ring.ring_sample(ring.RingParams(args.n, args.n1, args.n2), args.samples, rng)
            hidden = None
        else:
            words, hidden, extra = ring.ring_sample_grand(args.n, args.samples, rng, return_hidden=True)
        hfmt = _int_str
    else:
        spec, mix = _source(args)
        if mix is None:
            mix = mx.decompose(spec, tol=args.tol)
        words, hidden = mx.sample_configurations(mix, args.samples, rng)
        hfmt = _int_str
    N = words.shape[1]
    header = [f"eta_{i}" for i in range(N)]
    if hidden is not None:
        header += [f"zeta_{k}" for k in range(hidden.shape[1])]
    if extra is not None:
        header.append("rotation")
    with _open_out(args.output) as fh:
        fh.write(",".join(header) + "\n")
        for r in range(len(words)):
            row = [str(int(a)) for a in words[r]]
            if hidden is not None:
                row += [hfmt(v) for v in hidden[r]]
            if extra is not None:
                row.append(str(int(extra[r])))
            fh.write(",".join(row) + "\n")
    if exact is not None:
        w = np.minimum(words, exact.alphabet_size - 1)
        tv = total_variation(empirical(w, N, exact.alphabet_size), exact)
        sys.stderr.write(f"total_variation,{fmt(tv)}\n")
    return 0


def _int_str(v) -> str:
    return str(int(v))


def cmd_verify(args) -> int:
    checks = verify.run(args.suite, tol=args.tol_override)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def cmd_profile(args) -> int:
    spec, mix = _source(args)
    if args.model == "tasep-ring-2class":
        raise UsageError("profile needs an open-chain mixture; the ring measure is a rotation average")
    if mix is None:
        mix = mx.decompose(spec, tol=args.tol)
    with _open_out(args.output) as fh:
        fh.write("kind,i,j,value\n")
        for i in range(mix.N):
            fh.write(f"mean,{i},{i},{fmt(mx.site_mean(mix, i))}\n")
        for i in range(mix.N):
            for j in range(mix.N):
                fh.write(f"correlation,{i},{j},{fmt(mx.correlation(mix, i, j))}\n")
    return 0


def cmd_enumerate(args) -> int:
    d = _exact(args)
    with _open_out(args.output) as fh:
        d.to_csv(fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpabridge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def source(p, spec_positional=False):
        if spec_positional:
            p.add_argument("spec", nargs="?", help="MPA spec or mixture JSON file")
        else:
            p.add_argument("--spec", help="MPA spec or mixture JSON file")
        p.add_argument("--model", choices=MODELS)
        p.add_argument("--alpha", type=float, default=0.7)
        p.add_argument("--beta", type=float, default=0.8)
        p.add_argument("--n", type=int, default=4, help="number of sites")
        p.add_argument("--n1", type=int, help="first-class particles (ring)")
        p.add_argument("--n2", type=int, help="second-class particles (ring)")
        p.add_argument("--ml", type=float, default=0.5, help="left mean (harmonic)")
        p.add_argument("--mr", type=float, default=2.0, help="right mean (harmonic)")
        p.add_argument("--lambda-rate", type=float, default=1.0, help="exponential rate (harmonic)")
        p.add_argument("--bmax", type=int, help="top hidden state of the truncation")
        p.add_argument("--tol", type=float, default=1e-12, help="Perron tolerance")
        p.add_argument("-o", "--output", help="output file (default stdout)")

    p = sub.add_parser("decompose", help="bridge mixture of a spec; report lambda and residuals")
    source(p, spec_positional=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("eval", help="probability of a word by both routes")
    source(p)
    p.add_argument("word", help="letters as digits (e.g. 0120) or comma/dot-separated integers")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", help="CSV of sampled words and hidden paths")
    source(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tv", action="store_true", help="report total variation to the exact law on stderr")
    p.set_defaults(func=cmd_sample, oracle=False)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=[*verify.SUITES, "all"])
    p.add_argument("--tol", dest="tol_override", type=float, help="threshold for deterministic checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("profile", help="site means and pair correlations from the hidden bridge")
    source(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("enumerate", help="exact probability of every word as CSV")
    source(p)
    p.add_argument("--oracle", action="store_true", help="literal sum over hidden paths")
    p.set_defaults(func=cmd_enumerate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); stop quietly
        sys.stderr.close()
        return 0
    except (UsageError, MpaBridgeError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
