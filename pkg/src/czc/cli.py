"""Command-line entry point ``czc``.

Exit codes: 0 success / Certified, 1 Refuted (or a failed check), 2 malformed
input, 3 Inconclusive (search bound exhausted).  JSON goes to stdout with
sorted keys, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, localcontext

from .catalog import cross_spec, cross_table, ellipsoid, lens
from .census import CensusConfig, OrbitDataset, finiteness_bound, resonance_check, run_census
from .errors import CzcError, CzcInputError, Exhausted
from .exact import ExactReal, parse_exact
from .homology import PrequantSpec, betti_M_array, k_min, mean_euler
from .index import collapse, cz_index, is_good, mean_chi, mean_index
from .jump import JumpCertificate, JumpRequest, find_jump, verify_jump

EXIT_OK, EXIT_REFUTED, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3

SPEC_SCHEMA = """spec file: {"n": int, "c_B": int, "sign": "positive"|"negative",
  "betti": [int x (2n+1)], "lacunary_base": bool}   (or a catalog bundle {"spec": ...})"""
ORBIT_SCHEMA = """orbits file: {"n": int, "orbits": [orbit, ...]}   (or a catalog bundle {"dataset": ...})
  orbit: {"name": str, "rotations": [exact, ...], "linear_even": even int,
          "odd_linear": [odd int, ...], "torsion_order": int >= 1}
  exact: int | "1/2" | "sqrt2/2" | {"type": "rat", "num", "den"}
         | {"type": "surd", "a", "b", "root", "den"} | {"type": "qsum",
           "terms": [{"root", "num", "den"}, ...]}"""

EPILOGS = {
    "betti": SPEC_SCHEMA + """

output: {"spec": spec, "lo": int, "hi": int,
         "ranks": [{"k": int, "rank": int}, ...]}""",
    "chi": SPEC_SCHEMA + "\n" + ORBIT_SCHEMA + """

output: {"chi_plus": exact-str, "k_min": int, "r_B": int, "finiteness_bound": int,
         "orbits": [{"name", "mean_index", "mean_chi"}, ...] (with --orbits)}""",
    "indices": ORBIT_SCHEMA + """

output: {"orbits": [{"name": str, "mean_index": exact-str, "mean_chi": exact-str,
                     "iterates": [{"k", "mu", "good", "contractible"}, ...]}, ...]}""",
    "jump": ORBIT_SCHEMA + """

output: {"plus": {"side": "plus", "d": int, "k": [int, ...]}, "minus": {...}}
with --verify FILE (holding that same shape):
        {"ok": bool, "violations": [{"clause", "orbit", "ell", "detail"}, ...],
         "defects_plus": [int] | null, "defects_minus": [int] | null}
exit: 0 found / verified, 1 verification failed, 3 search exhausted""",
    "census": SPEC_SCHEMA + "\n" + ORBIT_SCHEMA + """

output: {"verdict": "Certified"|"Refuted"|"Inconclusive", "reason": str,
         "first_violation": {"check", "lhs", "rhs", "degree"?} | null,
         "mode": str, "r": int, "r_B": int, "r_plus": int|null, "r_minus": int|null,
         "b0_correction": int, "forced_lower_bound": int,
         "parameters": {"ell0", "eta", "N", "search_bound", "s_plus", "s_minus", "max_degree"},
         "certificates": {"plus": cert, "minus": cert},
         "checks": [{"name", "lhs", "rhs", "pass", "detail"?}, ...]}
exit: 0 Certified, 1 Refuted, 2 input error, 3 Inconclusive""",
    "catalog": """output of ellipsoid / lens / spec: {"spec": spec, "dataset": {"n": int, "orbits": [...]}}
  (spec alone has no "dataset")
output of table: {"rows": [{"name": str, "r_B": str, "c_B": str}, ...]}""",
    "resonance": SPEC_SCHEMA + "\n" + ORBIT_SCHEMA + """

output: {"lhs": exact-str, "rhs": exact-str, "equal": bool}
exit: 0 equal, 1 not equal""",
}


# -- input ---------------------------------------------------------------------

def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CzcInputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CzcInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _spec(path: str) -> PrequantSpec:
    obj = _load(path)
    if isinstance(obj, dict) and "spec" in obj:
        obj = obj["spec"]
    try:
        return PrequantSpec.from_json(obj)
    except CzcInputError as exc:
        raise CzcInputError(f"{path}: {exc}") from None


def _orbits(path: str, n: int | None = None) -> OrbitDataset:
    try:
        return OrbitDataset.from_json(_load(path), n)
    except CzcInputError as exc:
        if str(exc).startswith(path):
            raise
        raise CzcInputError(f"{path}: {exc}") from None


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise CzcInputError(f"range must look like LO:HI, got {text!r}") from None
    if lo > hi:
        raise CzcInputError(f"empty range {text!r}")
    return lo, hi


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CzcInputError(f"expected comma-separated integers, got {text!r}") from None


# -- output --------------------------------------------------------------------

def _hint(x: ExactReal, digits: int) -> str:
    lo, hi = x.bounds(4 * digits + 16)
    mid = (lo + hi) / 2
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(mid.numerator) / Decimal(mid.denominator))


def _exact(x: ExactReal, digits: int) -> str:
    if x.is_rational:
        return str(x)
    return f"{x} ~ {_hint(x, digits)}"


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def _emit_table(header: list[str], rows: list[list]) -> None:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        sys.stdout.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


# -- subcommands ---------------------------------------------------------------

def cmd_betti(args) -> int:
    spec = _spec(args.spec)
    lo, hi = _range(args.range)
    ranks = betti_M_array(spec, lo, hi)
    if args.format == "table":
        _emit_table(["k", "rank"], [[lo + i, int(r)] for i, r in enumerate(ranks)])
    else:
        _emit_json({"spec": spec.to_json(), "lo": lo, "hi": hi,
                    "ranks": [{"k": lo + i, "rank": int(r)} for i, r in enumerate(ranks)]})
    return EXIT_OK


def cmd_chi(args) -> int:
    spec = _spec(args.spec)
    chi = mean_euler(spec)
    out = {"chi_plus": str(chi), "k_min": k_min(spec), "r_B": spec.r_B,
           "finiteness_bound": finiteness_bound(spec)}
    rows = []
    if args.orbits:
        data = _orbits(args.orbits, spec.n)
        out["orbits"] = []
        for o in data.orbits:
            u = collapse(o)
            mh, mc = mean_index(u), mean_chi(u)
            out["orbits"].append({"name": o.name, "mean_index": str(mh), "mean_chi": str(mc)})
            rows.append([o.name, _exact(mh, args.digits), str(mc)])
    if args.format == "table":
        _emit_table(["quantity", "value"], [[k, out[k]] for k in ("chi_plus", "k_min", "r_B", "finiteness_bound")])
        if rows:
            sys.stdout.write("\n")
            _emit_table(["orbit", "mean_index", "mean_chi"], rows)
    else:
        _emit_json(out)
    return EXIT_OK


def cmd_indices(args) -> int:
    data = _orbits(args.orbits, args.n)
    lo, hi = _range(args.k)
    if lo < 1:
        raise CzcInputError("iterates start at k = 1")
    out, rows = [], []
    for o in data.orbits:
        its = []
        for k in range(lo, hi + 1):
            mu = cz_index(o, k)
            item = {"k": k, "mu": mu, "good": is_good(o, k), "contractible": k % o.torsion_order == 0}
            its.append(item)
            rows.append([o.name, k, mu, item["good"], item["contractible"]])
        mh = mean_index(o)
        out.append({"name": o.name, "mean_index": str(mh), "mean_chi": str(mean_chi(o)), "iterates": its})
    if args.format == "table":
        _emit_table(["orbit", "k", "mu", "good", "contractible"], rows)
        sys.stdout.write("\n")
        _emit_table(["orbit", "mean_index", "mean_chi"],
                    [[o.name, _exact(mean_index(o), args.digits), str(mean_chi(o))] for o in data.orbits])
    else:
        _emit_json({"orbits": out})
    return EXIT_OK


def cmd_jump(args) -> int:
    data = _orbits(args.orbits, args.n)
    eta = parse_exact(args.eta)
    if args.verify:
        obj = _load(args.verify)
        if not isinstance(obj, dict):
            raise CzcInputError(f"{args.verify}: expected an object with 'plus' and/or 'minus'")
        plus = JumpCertificate.from_json(obj["plus"]) if obj.get("plus") else None
        minus = JumpCertificate.from_json(obj["minus"]) if obj.get("minus") else None
        report = verify_jump(data.orbits, plus, minus, eta, args.ell0, data.n, args.N)
        if args.format == "table":
            sys.stdout.write(f"verification: {'ok' if report.ok else 'FAILED'}\n")
            if report.violations:
                _emit_table(["clause", "orbit", "ell", "detail"],
                            [[v.clause, v.orbit, v.ell, v.detail] for v in report.violations])
        else:
            _emit_json(report.to_json())
        return EXIT_OK if report.ok else EXIT_REFUTED
    req = JumpRequest(data.orbits, eta, args.ell0, args.N, args.sides, args.bound)
    try:
        plus, minus = find_jump(req, data.n)
    except Exhausted as exc:
        sys.stderr.write(f"czc: {exc}\n")
        return EXIT_INCONCLUSIVE
    out = {side: (c.to_json() if c else None) for side, c in (("plus", plus), ("minus", minus))}
    if args.format == "table":
        _emit_table(["side", "d", "k"], [[s, c["d"], " ".join(map(str, c["k"]))] for s, c in out.items() if c])
    else:
        _emit_json(out)
    return EXIT_OK


_VERDICT_CODES = {"Certified": EXIT_OK, "Refuted": EXIT_REFUTED, "Inconclusive": EXIT_INCONCLUSIVE}


def cmd_census(args) -> int:
    spec = _spec(args.spec)
    data = _orbits(args.orbits, spec.n)
    config = CensusConfig(
        N=args.N,
        eta=parse_exact(args.eta) if args.eta else None,
        search_bound=args.bound,
        max_degree=args.max_degree,
        mode="lower_bound" if args.mode in ("lower-bound", "lower_bound") else args.mode,
    )
    report = run_census(data, spec, config)
    if args.format == "table":
        w = sys.stdout.write
        w(f"verdict: {report.verdict}\n")
        if report.reason:
            w(f"reason: {report.reason}\n")
        if report.first_violation:
            w(f"first violation: {json.dumps(report.first_violation, sort_keys=True, ensure_ascii=False)}\n")
        w(f"r = {report.r}, r_B = {report.r_B}, r_+ = {report.r_plus}, r_- = {report.r_minus}, "
          f"b0 = {report.b0_correction}\n")
        for side, cert in sorted(report.certificates.items()):
            w(f"{side}: d = {cert['d']}, k = {cert['k']}\n")
        w("\n")
        _emit_table(["status", "check", "lhs", "rhs"],
                    [["PASS" if c.passed else "FAIL", c.name, c.lhs, c.rhs] for c in report.checks])
    else:
        sys.stdout.write(json.dumps(report.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    if report.verdict == "Refuted" and report.first_violation:
        sys.stderr.write(f"czc: first violation: {report.reason}\n")
    return _VERDICT_CODES[report.verdict]


def _bundle(spec: PrequantSpec, data: OrbitDataset | None, args) -> int:
    out = {"spec": spec.to_json()}
    if data is not None:
        out["dataset"] = data.to_json()
    if args.format == "table":
        sys.stdout.write(f"spec: n={spec.n} c_B={spec.c_B} betti={list(spec.betti)} r_B={spec.r_B}\n")
        if data is not None:
            rows = [[o.name, ", ".join(_exact(r, args.digits) for r in o.rotations), o.linear_even,
                     o.torsion_order] for o in data.orbits]
            _emit_table(["orbit", "rotations", "linear_even", "torsion"], rows)
    else:
        _emit_json(out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    axes = None
    if getattr(args, "axes", None) is not None:
        axes = [parse_exact(a) for a in args.axes.split(",") if a.strip()]
    if args.what == "ellipsoid":
        return _bundle(*ellipsoid(axes), args)
    if args.what == "lens":
        return _bundle(*lens(args.p, _int_list(args.weights), axes), args)
    if args.what == "spec":
        return _bundle(cross_spec(args.name, args.value), None, args)
    rows = cross_table()
    if args.format == "table":
        _emit_table(["prequantization", "r_B", "c_B"], [[r.name, r.r_B, r.c_B] for r in rows])
    else:
        _emit_json({"rows": [r.to_json() for r in rows]})
    return EXIT_OK


def cmd_resonance(args) -> int:
    spec = _spec(args.spec)
    data = _orbits(args.orbits, spec.n)
    lhs, rhs, equal = resonance_check(data, spec)
    if args.format == "table":
        _emit_table(["lhs", "rhs", "equal"], [[str(lhs), str(rhs), equal]])
    else:
        _emit_json({"lhs": str(lhs), "rhs": str(rhs), "equal": equal})
    return EXIT_OK if equal else EXIT_REFUTED


# -- parser --------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--digits", type=int, default=12, help="decimal digits for display hints (display only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="czc",
        description="Index iteration, prequantization homology and orbit census checks.",
        epilog="exit codes: 0 ok/Certified, 1 Refuted, 2 input error, 3 Inconclusive; "
               "CZC_THREADS caps the jump search threads",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    def add(name, help_text, common=True):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=EPILOGS[name], formatter_class=fmt)
        if common:
            _common(p)
        return p

    p = add("betti", "ranks of the positive equivariant homology in a degree range")
    p.add_argument("--spec", required=True)
    p.add_argument("--range", required=True, help="LO:HI, inclusive")
    p.set_defaults(func=cmd_betti)

    p = add("chi", "mean Euler characteristic, k_min and finiteness bound; per-orbit mean_chi")
    p.add_argument("--spec", required=True)
    p.add_argument("--orbits")
    p.set_defaults(func=cmd_chi)

    p = add("indices", "indices of iterates")
    p.add_argument("--orbits", required=True)
    p.add_argument("--n", type=int, help="ambient half-dimension when the file omits it")
    p.add_argument("--k", default="1:10", help="iterate range LO:HI (default 1:10)")
    p.set_defaults(func=cmd_indices)

    p = add("jump", "search or verify index jump certificates")
    p.add_argument("--orbits", required=True)
    p.add_argument("--n", type=int, help="ambient half-dimension when the file omits it")
    p.add_argument("--eta", required=True)
    p.add_argument("--ell0", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--bound", type=int, default=10**6, help="cap on t with d = N*t")
    p.add_argument("--sides", choices=("plus", "minus", "both"), default="both")
    p.add_argument("--verify", metavar="FILE", help="verify the certificates in FILE instead of searching")
    p.set_defaults(func=cmd_jump)

    p = add("census", "check an orbit dataset against the homology of a prequantization")
    p.add_argument("--spec", required=True)
    p.add_argument("--orbits", required=True)
    p.add_argument("--mode", choices=("exact", "lower-bound"), default="exact")
    p.add_argument("--max-degree", type=int)
    p.add_argument("--bound", type=int, default=CensusConfig.search_bound)
    p.add_argument("--N", type=int)
    p.add_argument("--eta")
    p.set_defaults(func=cmd_census)

    p = add("catalog", "generate example datasets and reference data", common=False)
    csub = p.add_subparsers(dest="what", required=True)
    q = csub.add_parser("ellipsoid", help="irrational ellipsoid")
    q.add_argument("--axes", required=True, help='comma-separated exact values, e.g. "1,sqrt2,sqrt3"')
    q = csub.add_parser("lens", help="lens space quotient of an ellipsoid")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--weights", required=True)
    q.add_argument("--axes", required=True)
    csub.add_parser("table", help="the CROSS table")
    q = csub.add_parser("spec", help="shipped Betti profile for a table entry")
    q.add_argument("name")
    q.add_argument("--value", type=int, help="value of n or m for a parametric row")
    for q in csub.choices.values():
        q.epilog, q.formatter_class = EPILOGS["catalog"], fmt
        _common(q)
    p.set_defaults(func=cmd_catalog)

    p = add("resonance", "compare sum mean_chi/mean_index with the mean Euler characteristic")
    p.add_argument("--spec", required=True)
    p.add_argument("--orbits", required=True)
    p.set_defaults(func=cmd_resonance)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CzcInputError, KeyError, LookupError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"czc: error: {msg}\n")
        return EXIT_INPUT
    except CzcError as exc:
        sys.stderr.write(f"czc: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
