"""Command-line front end: evaluate registry functions, run the identity
suite, and emit machine-readable tables.

Exit codes: 0 ok, 1 parse error, 2 domain error, 3 non-convergence,
4 verification failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import classical, fermion, twisted
from .errors import DomainError, NearPole, NotConverged, TwistellError
from .identities import SUITE, SamplePlan, run_all
from .numeric import TruncationConfig, bernoulli_poly, binomial, q_exp
from .twisted import GroupElement, TwistPair

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3
EXIT_VERIFY = 4
EXIT_IO = 5


class ParseError(Exception):
    pass


# ---------------------------------------------------------------------------
# scalar and structured argument parsing
# ---------------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """Parse 'a+bi' complex literals; accepts 'i', '2i', '1.5', '1-0.5i', 'j'."""
    t = text.strip().replace(" ", "").replace("J", "j").replace("I", "i")
    t = t.replace("j", "i")
    if not t:
        raise ParseError("empty number")
    try:
        if not t.endswith("i"):
            return complex(float(t), 0.0)
        body = t[:-1]
        split = 0
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "eE":
                split = pos
                break
        re_part, im_part = body[:split], body[split:]
        if im_part in ("", "+"):
            im = 1.0
        elif im_part == "-":
            im = -1.0
        else:
            im = float(im_part)
        return complex(float(re_part) if re_part else 0.0, im)
    except ValueError as exc:
        raise ParseError(f"cannot parse complex number {text!r}") from exc


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ParseError(f"cannot parse integer {text!r}") from exc


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ParseError(f"cannot parse real number {text!r}") from exc


def _parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(tok) for tok in text.split(",") if tok != ""]


def _parse_int_list(text: str) -> list[int]:
    return [_parse_int(tok) for tok in text.split(",") if tok != ""]


def _parse_label_groups(text: str) -> list[tuple[int, ...]]:
    return [tuple(_parse_int_list(group)) for group in text.split(";")]


def _parse_g(text: str) -> fermion.GSelector:
    try:
        return fermion.GSelector(text.strip().lower())
    except ValueError as exc:
        raise ParseError("g must be 'identity' or 'sigma'") from exc


def _parse_gamma(text: str) -> GroupElement:
    vals = _parse_int_list(text)
    if len(vals) != 4:
        raise ParseError("gamma needs four integers a,b,c,d")
    try:
        return GroupElement(*vals)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


_PARSERS = {
    "int": _parse_int,
    "float": _parse_float,
    "complex": parse_complex,
    "clist": _parse_complex_list,
    "ilist": _parse_int_list,
    "labels": _parse_label_groups,
    "g": _parse_g,
    "gamma": _parse_gamma,
}

_ALIASES = {
    "λ": "lam", "lambda": "lam", "τ": "tau", "μ": "mu",
    "α": "alpha", "β": "beta", "θ": "mu", "φ": "lam",
}

# function name -> (ordered (param, kind) spec, evaluator(args, cfg) -> complex)
REGISTRY: dict = {
    "bernoulli_poly": ([("n", "int"), ("lam", "float")],
                       lambda a, cfg: complex(bernoulli_poly(a["n"], a["lam"]))),
    "binomial": ([("n", "int"), ("k", "int")],
                 lambda a, cfg: complex(binomial(a["n"], a["k"]))),
    "q_exp": ([("z", "complex"), ("s", "complex")],
              lambda a, cfg: q_exp(a["z"], a["s"])),
    "eisenstein": ([("n", "int"), ("tau", "complex")],
                   lambda a, cfg: classical.eisenstein(a["n"], a["tau"], cfg)),
    "weierstrass_pk": ([("k", "int"), ("z", "complex"), ("tau", "complex")],
                       lambda a, cfg: classical.weierstrass_pk(a["k"], a["z"], a["tau"], cfg)),
    "weierstrass_pk_laurent": (
        [("k", "int"), ("z", "complex"), ("tau", "complex")],
        lambda a, cfg: classical.weierstrass_pk_laurent(a["k"], a["z"], a["tau"], cfg)),
    "p0": ([("z", "complex"), ("tau", "complex")],
           lambda a, cfg: classical.p0(a["z"], a["tau"], cfg)),
    "prime_form": ([("z", "complex"), ("tau", "complex")],
                   lambda a, cfg: classical.prime_form(a["z"], a["tau"], cfg)),
    "theta_char": ([("a", "float"), ("b", "float"), ("z", "complex"), ("tau", "complex")],
                   lambda a, cfg: classical.theta_char(a["a"], a["b"], a["z"], a["tau"], cfg)),
    "dedekind_eta": ([("tau", "complex")],
                     lambda a, cfg: classical.dedekind_eta(a["tau"], cfg)),
    "twisted_pk": ([("k", "int"), ("mu", "float"), ("lam", "float"),
                    ("z", "complex"), ("tau", "complex")],
                   lambda a, cfg: twisted.twisted_pk(
                       a["k"], TwistPair(a["mu"], a["lam"]), a["z"], a["tau"], cfg)),
    "twisted_pk_oracle": ([("k", "int"), ("mu", "float"), ("lam", "float"),
                           ("z", "complex"), ("tau", "complex")],
                          lambda a, cfg: twisted.twisted_pk_oracle(
                              a["k"], TwistPair(a["mu"], a["lam"]), a["z"], a["tau"], cfg)),
    "twisted_eisenstein": ([("n", "int"), ("mu", "float"), ("lam", "float"),
                            ("tau", "complex")],
                           lambda a, cfg: twisted.twisted_eisenstein(
                               a["n"], TwistPair(a["mu"], a["lam"]), a["tau"], cfg)),
    "twisted_eisenstein_oracle": (
        [("n", "int"), ("mu", "float"), ("lam", "float"), ("tau", "complex")],
        lambda a, cfg: twisted.twisted_eisenstein_oracle(
            a["n"], TwistPair(a["mu"], a["lam"]), a["tau"], cfg)),
    "coeff_C": ([("k", "int"), ("l", "int"), ("mu", "float"), ("lam", "float"),
                 ("tau", "complex")],
                lambda a, cfg: twisted.coeff_C(
                    a["k"], a["l"], TwistPair(a["mu"], a["lam"]), a["tau"], cfg)),
    "coeff_D": ([("k", "int"), ("l", "int"), ("mu", "float"), ("lam", "float"),
                 ("z", "complex"), ("tau", "complex")],
                lambda a, cfg: twisted.coeff_D(
                    a["k"], a["l"], TwistPair(a["mu"], a["lam"]), a["z"], a["tau"], cfg)),
    "twisted_p1_theta_form": ([("mu", "float"), ("lam", "float"), ("z", "complex"),
                               ("tau", "complex")],
                              lambda a, cfg: twisted.twisted_p1_theta_form(
                                  TwistPair(a["mu"], a["lam"]), a["z"], a["tau"], cfg)),
    "rank1_partition": ([("g", "g"), ("tau", "complex")],
                        lambda a, cfg: fermion.rank1_partition(a["g"], a["tau"], cfg)),
    "rank1_generating": ([("g", "g"), ("zs", "clist"), ("tau", "complex")],
                         lambda a, cfg: fermion.rank1_generating(
                             a["g"], a["zs"], a["tau"], cfg)),
    "rank1_fock_npoint": ([("labels", "labels"), ("zs", "clist"), ("g", "g"),
                           ("tau", "complex")],
                          lambda a, cfg: fermion.rank1_fock_npoint(
                              a["labels"], a["zs"], a["g"], a["tau"], cfg)),
    "rank1_sigma_twisted_generating": (
        [("zs", "clist"), ("tau", "complex")],
        lambda a, cfg: fermion.rank1_sigma_twisted_generating(a["zs"], a["tau"], cfg)),
    "sigma_module_partition": ([("tau", "complex")],
                               lambda a, cfg: fermion.sigma_module_partition(a["tau"], cfg)),
    "rank2_partition": ([("alpha", "float"), ("beta", "float"), ("tau", "complex")],
                        lambda a, cfg: fermion.rank2_partition(
                            fermion.OrbifoldParams(a["alpha"], a["beta"]), a["tau"], cfg)),
    "rank2_partition_theta": ([("alpha", "float"), ("beta", "float"), ("tau", "complex")],
                              lambda a, cfg: fermion.rank2_partition_theta(
                                  fermion.OrbifoldParams(a["alpha"], a["beta"]),
                                  a["tau"], cfg)),
    "rank2_generating": ([("alpha", "float"), ("beta", "float"), ("xs", "clist"),
                          ("ys", "clist"), ("tau", "complex")],
                         lambda a, cfg: fermion.rank2_generating(
                             fermion.OrbifoldParams(a["alpha"], a["beta"]),
                             a["xs"], a["ys"], a["tau"], cfg)),
    "rank2_fock_npoint": ([("plus", "labels"), ("minus", "labels"), ("zs", "clist"),
                           ("alpha", "float"), ("beta", "float"), ("tau", "complex")],
                          lambda a, cfg: fermion.rank2_fock_npoint(
                              list(zip(a["plus"], a["minus"])), a["zs"],
                              fermion.OrbifoldParams(a["alpha"], a["beta"]),
                              a["tau"], cfg)),
    "rank2_generating_boson": ([("alpha", "float"), ("beta", "float"), ("xs", "clist"),
                                ("ys", "clist"), ("tau", "complex")],
                               lambda a, cfg: fermion.rank2_generating_boson(
                                   fermion.OrbifoldParams(a["alpha"], a["beta"]),
                                   a["xs"], a["ys"], a["tau"], cfg)),
    "lattice_npoint": ([("alpha", "float"), ("beta", "float"), ("ms", "ilist"),
                        ("xs", "clist"), ("ns", "ilist"), ("ys", "clist"),
                        ("tau", "complex")],
                       lambda a, cfg: fermion.lattice_npoint(
                           fermion.OrbifoldParams(a["alpha"], a["beta"]),
                           a["ms"], a["xs"], a["ns"], a["ys"], a["tau"], cfg)),
}


def _modular_multiplier_eval(a, cfg):
    eps, params = fermion.modular_multiplier(a["gamma"], fermion.OrbifoldParams(
        a["alpha"], a["beta"]))
    return eps, [f"transformed params: alpha={params.alpha:.17g} beta={params.beta:.17g}"]


REGISTRY["modular_multiplier"] = (
    [("gamma", "gamma"), ("alpha", "float"), ("beta", "float")],
    _modular_multiplier_eval)


# ---------------------------------------------------------------------------
# deterministic JSON with 17-significant-digit floats
# ---------------------------------------------------------------------------

def _fmt_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if x != x:  # nan
        return '"nan"'
    if x in (float("inf"), float("-inf")):
        return f'"{x}"'
    return format(x, ".17g")


def dumps(obj) -> str:
    """Deterministic JSON with floats printed to 17 significant digits."""
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    return _fmt_number(obj)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(dumps({"error": kind, "message": message}) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cfg_from_args(args) -> TruncationConfig:
    base = TruncationConfig()
    try:
        return TruncationConfig(
            q_order=args.q_order if args.q_order is not None else base.q_order,
            theta_range=args.theta_range if args.theta_range is not None else base.theta_range,
            lattice_range=(args.lattice_range if args.lattice_range is not None
                           else base.lattice_range),
            tol=args.tol if args.tol is not None else base.tol,
            series_radius=(args.series_radius if args.series_radius is not None
                           else base.series_radius),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _parse_assignments(tokens, spec) -> dict:
    wanted = {name: kind for name, kind in spec}
    got: dict = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}")
        key, _, val = tok.partition("=")
        key = _ALIASES.get(key.strip(), key.strip())
        if key not in wanted:
            raise ParseError(f"unknown parameter {key!r}; expected "
                             f"{', '.join(n for n, _ in spec)}")
        if key in got:
            raise ParseError(f"duplicate parameter {key!r}")
        got[key] = _PARSERS[wanted[key]](val)
    missing = [n for n, _ in spec if n not in got]
    if missing:
        raise ParseError(f"missing parameter(s): {', '.join(missing)}")
    return got


def cmd_eval(args) -> int:
    if args.function not in REGISTRY:
        raise ParseError(f"unknown function {args.function!r}; known: "
                         f"{', '.join(sorted(REGISTRY))}")
    spec, fn = REGISTRY[args.function]
    cfg = _cfg_from_args(args)
    parsed = _parse_assignments(args.assignments, spec)
    out = fn(parsed, cfg)
    warnings: list[str] = []
    if isinstance(out, tuple):
        value, warnings = out
    else:
        value = out
    value = complex(value)
    payload = {"re": value.real, "im": value.imag, "cfg": cfg.asdict(),
               "warnings": warnings}
    sys.stdout.write(dumps(payload) + "\n")
    return EXIT_OK


def _report_rows(reports):
    for rep in reports:
        d = rep.to_dict()
        for sample in d["samples"]:
            yield [d["identity_name"], sample["input"],
                   format(sample["lhs"]["re"], ".17g"), format(sample["lhs"]["im"], ".17g"),
                   format(sample["rhs"]["re"], ".17g"), format(sample["rhs"]["im"], ".17g"),
                   format(sample["residual"], ".17g"), sample["status"],
                   format(d["tolerance"], ".17g"), str(d["passed"]), str(d["seed"])]


def cmd_verify(args) -> int:
    cfg = _cfg_from_args(args)
    if args.count is not None and args.count < 1:
        raise ParseError("count must be >= 1")
    try:
        plan = SamplePlan(seed=args.seed, count=args.count or 25)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if args.suite == "all":
        names = None
    else:
        names = [s.strip() for s in args.suite.split(",") if s.strip()]
        unknown = [n for n in names if n not in SUITE]
        if unknown:
            raise ParseError(f"unknown suite name(s) {', '.join(unknown)}; known: "
                             f"{', '.join(SUITE)} or 'all'")
    reports = run_all(plan, cfg, names=names, use_pinned_counts=args.count is None)
    for rep in reports:
        print(rep.summary_line())
    n_fail = sum(not rep.passed for rep in reports)
    print(f"{len(reports) - n_fail}/{len(reports)} checks passed")
    if args.out:
        try:
            if args.format == "json":
                text = dumps([rep.to_dict() for rep in reports]) + "\n"
            else:
                buf = io.StringIO()
                writer = csv.writer(buf, lineterminator="\n")
                writer.writerow(["identity_name", "input", "lhs_re", "lhs_im", "rhs_re",
                                 "rhs_im", "residual", "status", "tolerance", "passed",
                                 "seed"])
                writer.writerows(_report_rows(reports))
                text = buf.getvalue()
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            _emit_error("io", str(exc))
            return EXIT_IO
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


def cmd_report(args) -> int:
    """Re-read a JSON report file and reproduce the summary verdict."""
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        _emit_error("io", str(exc))
        return EXIT_IO
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a JSON report: {exc}") from exc
    n_fail = 0
    for rep in data:
        passed = rep["max_residual"] <= rep["tolerance"]
        verdict = "PASS" if passed else "FAIL"
        n_fail += not passed
        print(f"{verdict}  {rep['identity_name']:<28s} samples={len(rep['samples']):<4d} "
              f"max_residual={rep['max_residual']:.3e}  tol={rep['tolerance']:.1e}")
    print(f"{len(data) - n_fail}/{len(data)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


def _parse_range(val: str):
    """Grid token: 'a..b' (integer, inclusive) or 'start:stop:count' (linspace)."""
    if ".." in val:
        lo, _, hi = val.partition("..")
        return [complex(v) for v in range(_parse_int(lo), _parse_int(hi) + 1)]
    parts = val.split(":")
    if len(parts) == 3:
        start, stop = parse_complex(parts[0]), parse_complex(parts[1])
        count = _parse_int(parts[2])
        if count < 1:
            return []
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    raise ParseError(f"not a range: {val!r}")


def cmd_table(args) -> int:
    if args.function not in REGISTRY:
        raise ParseError(f"unknown function {args.function!r}")
    spec, fn = REGISTRY[args.function]
    kinds = dict(spec)
    cfg = _cfg_from_args(args)
    fixed: dict = {}
    varying: list[tuple[str, list[complex]]] = []
    for tok in args.assignments:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}")
        key, _, val = tok.partition("=")
        key = _ALIASES.get(key.strip(), key.strip())
        if key not in kinds:
            raise ParseError(f"unknown parameter {key!r}")
        if ".." in val or val.count(":") == 2:
            varying.append((key, _parse_range(val)))
        else:
            fixed[key] = _PARSERS[kinds[key]](val)
    if not 1 <= len(varying) <= 2:
        raise ParseError("table needs one or two varying parameters")
    if any(len(vals) == 0 for _, vals in varying):
        raise ParseError("empty grid")
    missing = [n for n, _ in spec if n not in fixed and n not in dict(varying)]
    if missing:
        raise ParseError(f"missing parameter(s): {', '.join(missing)}")

    def coerce(key, value):
        kind = kinds[key]
        if kind == "int":
            return int(value.real)
        if kind == "float":
            return value.real
        return value

    grids = [vals for _, vals in varying]
    rows = []
    names = [k for k, _ in varying]
    combos = [(a,) for a in grids[0]] if len(grids) == 1 else [
        (a, b) for a in grids[0] for b in grids[1]]
    for combo in combos:
        call = dict(fixed)
        for key, value in zip(names, combo):
            call[key] = coerce(key, value)
        status = "ok"
        value = complex(0)
        try:
            out = fn(call, cfg)
            value = complex(out[0] if isinstance(out, tuple) else out)
        except NearPole:
            status = "near_pole"
        except DomainError:
            status = "domain_error"
        except NotConverged:
            status = "not_converged"
        rows.append((combo, value, status))

    fixed_cols = sorted(fixed)
    header = names + fixed_cols + ["re", "im", "status"]

    def cell(v):
        if isinstance(v, complex):
            return format(v.real, ".17g") if v.imag == 0 else \
                f"{format(v.real, '.17g')}{'+' if v.imag >= 0 else '-'}{format(abs(v.imag), '.17g')}i"
        return str(v)

    out_rows = []
    for combo, value, status in rows:
        out_rows.append([cell(c) for c in combo] + [cell(fixed[k]) for k in fixed_cols]
                        + [format(value.real, ".17g"), format(value.imag, ".17g"), status])
    try:
        if args.format == "json":
            text = dumps([dict(zip(header, row)) for row in out_rows]) + "\n"
        else:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(out_rows)
            text = buf.getvalue()
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        _emit_error("io", str(exc))
        return EXIT_IO
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_cfg_flags(sub):
    sub.add_argument("--q-order", type=int, default=None)
    sub.add_argument("--theta-range", type=int, default=None)
    sub.add_argument("--lattice-range", type=int, default=None)
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--series-radius", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistell",
                                     description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    p_eval = subs.add_parser("eval", help="evaluate a registry function at key=value args")
    p_eval.add_argument("--function", dest="function_flag", default=None)
    p_eval.add_argument("function", nargs="?", default=None)
    p_eval.add_argument("assignments", nargs="*")
    _add_cfg_flags(p_eval)

    p_verify = subs.add_parser("verify", help="run identity-suite checks")
    p_verify.add_argument("--suite", default="all")
    p_verify.add_argument("--seed", type=int, default=7)
    p_verify.add_argument("--count", type=int, default=None)
    p_verify.add_argument("--format", choices=("json", "csv"), default="json")
    p_verify.add_argument("--out", default=None)
    _add_cfg_flags(p_verify)

    p_table = subs.add_parser("table", help="tabulate a function over a parameter grid")
    p_table.add_argument("--function", required=True)
    p_table.add_argument("assignments", nargs="*")
    p_table.add_argument("--format", choices=("json", "csv"), default="csv")
    p_table.add_argument("--out", default=None)
    _add_cfg_flags(p_table)

    p_report = subs.add_parser("report", help="re-read a JSON report and print its verdict")
    p_report.add_argument("path")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "eval":
            if getattr(args, "function_flag", None):
                if args.function is not None:
                    args.assignments = [args.function] + args.assignments
                args.function = args.function_flag
            if args.function is None:
                raise ParseError("eval needs a function name")
            return cmd_eval(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "table":
            return cmd_table(args)
        if args.command == "report":
            return cmd_report(args)
        raise ParseError(f"unknown command {args.command!r}")
    except ParseError as exc:
        _emit_error("parse", str(exc))
        return EXIT_PARSE
    except NearPole as exc:
        _emit_error("near_pole", str(exc))
        return EXIT_DOMAIN
    except DomainError as exc:
        _emit_error("domain", str(exc))
        return EXIT_DOMAIN
    except NotConverged as exc:
        _emit_error("convergence", str(exc))
        return EXIT_CONVERGENCE
    except (ValueError, KeyError, TwistellError) as exc:
        _emit_error("parse", str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
