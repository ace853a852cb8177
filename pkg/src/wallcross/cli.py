#!/usr/bin/env python3.9
import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from wallcross import __version__
from wallcross.checks import DEFAULT_MAX_N, DEFAULT_SEED, run_checks
from wallcross.coefficients import parse_tree, s_coeff, t_coeff, u_coeff, v_coeff
from wallcross.curve import (
    DEFAULT_FLOOR,
    DEFAULT_GUARD,
    betti_numbers,
    coprime_poincare,
    iss_delta,
    iss_gamma,
)
from wallcross.engine import (
    J_OMEGA,
    EulerPairing,
    InvariantTable,
    j_from_iss,
    iss_from_j,
    lattice_enumerator,
    wallcross_iss,
    wallcross_j,
    wallcross_j_omega,
)
from wallcross.errors import (
    EnumerationError,
    InputError,
    MissingInvariantError,
    OracleGuardError,
    PrecisionError,
    WallcrossError,
)
from wallcross.lambda_ring import eval_at, lambda0_membership, project_omega
from wallcross.quiver import (
    ORACLE_MAX_DIM,
    ORACLE_MAX_Q,
    QuiverPresentation,
    ff_count_semistable,
    iss_semistable,
    j_semistable,
)
from wallcross.stability import (
    QuiverLattice,
    WeakStability,
    as_class,
    parse_order,
    parse_parts,
    parse_stability,
)

PROJECT_ROOT = Path(__file__).parent.parent.parent

try:
    sys.path.insert(0, str(PROJECT_ROOT))
    import config
except ImportError:
    config = None

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MISMATCH = 2


def _config_value(name):
    return getattr(config, name, None) if config else None


def get_jobs():
    jobs = _config_value("WALLCROSS_JOBS")
    return int(jobs) if jobs is not None else 1


def get_default_floor():
    floor = _config_value("WALLCROSS_FLOOR")
    return int(floor) if floor is not None else DEFAULT_FLOOR


def get_default_guard():
    guard = _config_value("WALLCROSS_GUARD")
    return int(guard) if guard is not None else DEFAULT_GUARD


def get_seed():
    seed = _config_value("WALLCROSS_SEED")
    return int(seed) if seed is not None else DEFAULT_SEED


def get_oracle_limits():
    max_dim = _config_value("WALLCROSS_ORACLE_MAX_DIM")
    max_q = _config_value("WALLCROSS_ORACLE_MAX_Q")
    return (
        int(max_dim) if max_dim is not None else ORACLE_MAX_DIM,
        int(max_q) if max_q is not None else ORACLE_MAX_Q,
    )


def get_log_file():
    log_file = _config_value("WALLCROSS_LOG_FILE")
    return Path(log_file) if log_file else PROJECT_ROOT / "wallcross.log"


def get_output_dir():
    output_dir = Path(_config_value("WALLCROSS_OUTPUT_DIR") or "output")
    return output_dir if output_dir.is_absolute() else PROJECT_ROOT / output_dir


def setup_logging():
    logging.basicConfig(
        filename=get_log_file(),
        level=logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )


def load_stability(text):
    """Stability from a parse string, inline JSON, or @path to a JSON file."""
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as f:
            return WeakStability.from_json(json.load(f))
    return parse_stability(text)


def parse_classes(text):
    return sorted(as_class(p) for p in parse_parts(text))


def parse_matrix(text):
    try:
        return [[int(x) for x in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError as e:
        raise InputError(f"malformed matrix '{text}': {e}") from e


def output_path(name):
    path = Path(name)
    if path.is_absolute() or path.parent != Path("."):
        return path
    output_dir = get_output_dir()
    output_dir.mkdir(parents=True, exist_ok=True)
    return output_dir / path


def render(rows, fmt):
    if fmt == "json":
        return json.dumps(rows, indent=2, ensure_ascii=False)
    fields = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                k: v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(v)
                for k, v in row.items()
            }
        )
    return buffer.getvalue()


def emit(rows, args):
    text = render(rows, args.format)
    if args.output:
        path = output_path(args.output)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
            if not text.endswith("\n"):
                f.write("\n")
        print(f"Wrote {len(rows)} rows to {path}")
    else:
        print(text)


def run_coeffs(args):
    d = parse_parts(args.parts)
    tau = load_stability(args.from_stability)
    tau_tilde = load_stability(args.to_stability)
    row = {
        "coeff": args.kind,
        "parts": d.to_json(),
        "from": tau.to_json(),
        "to": tau_tilde.to_json(),
    }
    if args.kind == "s":
        value = s_coeff(d, tau, tau_tilde)
    elif args.kind == "u":
        value = u_coeff(d, tau, tau_tilde)
    elif args.kind == "t":
        if not args.fibers:
            raise InputError("t needs --fibers")
        poset = parse_order(len(d), args.order or "")
        phi = [label.strip() for label in args.fibers.split(",")]
        K = list(dict.fromkeys(phi))
        row.update({"order": [[i + 1, j + 1] for i, j in poset.strict_pairs()], "fibers": phi})
        value = t_coeff(poset, d.parts, K, phi, tau, tau_tilde)
    else:
        if not args.tree:
            raise InputError("v needs --tree")
        graph = parse_tree(args.tree, len(d))
        row["tree"] = graph.to_json()
        value = v_coeff(graph, d.parts, tau, tau_tilde)
    row["value"] = str(value)
    emit([row], args)
    return EXIT_OK


def _load_quiver(args):
    if args.quiver:
        return QuiverPresentation.load(args.quiver)
    return QuiverPresentation.preset(args.preset or "kronecker")


def run_quiver(args):
    quiver = _load_quiver(args)
    stab = load_stability(args.stability)
    if args.classes:
        classes = parse_classes(args.classes)
    elif args.max_class:
        classes = quiver.lattice.classes_below(as_class(parse_parts(args.max_class)[0]))
    else:
        raise InputError("quiver needs --classes or --max-class")
    max_dim, max_q = get_oracle_limits()
    rows = []
    mismatches = 0
    for alpha in classes:
        value = iss_semistable(quiver, alpha, stab)
        j = j_semistable(quiver, alpha, stab)
        row = {
            "quiver": quiver.to_json(),
            "class": alpha.to_json(),
            "stability": stab.to_json(),
            "iss": value.to_json(),
            "iss_text": str(value),
            "j": str(j),
            "omega": str(project_omega(j)) if lambda0_membership(j) else None,
        }
        evaluations = {}
        for q in args.eval_at or []:
            evaluations[str(q)] = str(eval_at(value, q))
        if evaluations:
            row["eval"] = evaluations
        if args.oracle:
            oracle = {}
            for q in [q for q in args.eval_at or [] if q.denominator == 1] or [Fraction(2)]:
                counted = ff_count_semistable(
                    quiver, alpha, stab, int(q), jobs=args.jobs, max_dim=max_dim, max_q=max_q
                )
                expected = eval_at(value, q)
                oracle[str(q)] = {"count": str(counted), "match": counted == expected}
                if counted != expected:
                    mismatches += 1
                    logging.error(f"Oracle mismatch at {alpha}, q={q}: {counted} != {expected}")
            row["oracle"] = oracle
        rows.append(row)
    emit(rows, args)
    return EXIT_MISMATCH if mismatches else EXIT_OK


def run_curve(args):
    floor = args.floor if args.floor is not None else get_default_floor()
    row = {
        "genus": args.genus,
        "rank": args.rank,
        "degree": args.degree,
        "stability": args.stability,
        "floor": floor,
    }
    if args.stability == "purity":
        series = iss_delta(args.rank, args.degree, args.genus, floor)
    else:
        series = iss_gamma(args.rank, args.degree, args.genus, floor)
    row["series"] = series.to_json()
    row["series_text"] = str(series)
    if args.poincare:
        guard = args.guard if args.guard is not None else get_default_guard()
        poly = coprime_poincare(args.rank, args.degree, args.genus, guard)
        row["guard"] = guard
        row["poincare"] = poly.to_json()
        row["betti"] = betti_numbers(poly)
    emit([row], args)
    return EXIT_OK


def run_check(args):
    seed = args.seed if args.seed is not None else get_seed()
    results = run_checks(args.suite, seed=seed, max_n=args.max_n, jobs=args.jobs)
    rows = [r.to_json() for r in results]
    emit(rows, args)
    failed = sum(not r.passed for r in results)
    print(f"{len(results)} checks, {failed} failed")
    logging.info(f"check {args.suite}: {len(results) - failed} passed, {failed} failed")
    return EXIT_MISMATCH if failed else EXIT_OK


TABLE_OPS = ("j_from_iss", "iss_from_j", "wallcross_iss", "wallcross_j", "wallcross_j_omega")


def run_tables(args):
    table = InvariantTable.load(args.table)
    chi = EulerPairing(parse_matrix(args.chi))
    enumerator = lattice_enumerator(QuiverLattice(chi.rank))
    classes = parse_classes(args.classes) if args.classes else table.classes()
    tau = load_stability(args.from_stability)
    rows = []
    for alpha in classes:
        row = {"op": args.op, "class": alpha.to_json(), "from": tau.to_json()}
        if args.op == "j_from_iss":
            value = j_from_iss(alpha, tau, table, chi, enumerator)
        elif args.op == "iss_from_j":
            value = iss_from_j(alpha, tau, table, chi, enumerator)
        else:
            if not args.to_stability:
                raise InputError(f"{args.op} needs --to")
            tau_tilde = load_stability(args.to_stability)
            row["to"] = tau_tilde.to_json()
            if args.op == "wallcross_iss":
                value = wallcross_iss(alpha, tau, tau_tilde, table, chi, enumerator)
            elif args.op == "wallcross_j":
                value = wallcross_j(alpha, tau, tau_tilde, table, chi, enumerator)
            else:
                if table.flavor != J_OMEGA:
                    raise InputError("wallcross_j_omega needs a J_OMEGA table")
                value = wallcross_j_omega(
                    alpha, tau, tau_tilde, table, chi.antisymmetrize(), enumerator, args.mode
                )
        row["value"] = str(value) if args.op == "wallcross_j_omega" else value.to_json()
        row["value_text"] = str(value)
        rows.append(row)
    emit(rows, args)
    return EXIT_OK


HANDLERS = {
    "coeffs": run_coeffs,
    "quiver": run_quiver,
    "curve": run_curve,
    "check": run_check,
    "tables": run_tables,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wallcross",
        description="Exact counting invariants and their wall-crossing under changes of stability",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--jobs", type=int, default=None, help="worker threads (0 = one per CPU)")
    parser.add_argument("--output", default=None, help="write results to this file")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    coeffs = sub.add_parser("coeffs", help="transformation coefficients S, T, U, V")
    coeffs.add_argument("kind", choices=("s", "t", "u", "v"))
    coeffs.add_argument("--parts", required=True, help='classes, e.g. "[1,0];[0,1]"')
    coeffs.add_argument("--from", dest="from_stability", required=True)
    coeffs.add_argument("--to", dest="to_stability", required=True)
    coeffs.add_argument("--order", help='partial order for t, e.g. "1<2;2<3"')
    coeffs.add_argument("--fibers", help='labels of the map to K for t, e.g. "a,a,b"')
    coeffs.add_argument("--tree", help='directed tree for v, e.g. "1>2,2>3"')

    quiver = sub.add_parser("quiver", help="semistable invariants of quiver representations")
    source = quiver.add_mutually_exclusive_group()
    source.add_argument("--quiver", help="quiver JSON file")
    source.add_argument("--preset", help="kronecker, kronecker-3, one-vertex or a2")
    quiver.add_argument("--classes", help='dimension vectors, e.g. "[1,1];[2,0]"')
    quiver.add_argument("--max-class", help="every class below this one")
    quiver.add_argument("--stability", default="trivial")
    quiver.add_argument("--eval-at", type=Fraction, action="append", help="evaluate at l = q")
    quiver.add_argument("--oracle", action="store_true", help="compare with finite-field counts")

    curve = sub.add_parser("curve", help="invariants of sheaves on a curve")
    curve.add_argument("--genus", type=int, required=True)
    curve.add_argument("--rank", type=int, required=True)
    curve.add_argument("--degree", type=int, default=0)
    curve.add_argument("--stability", choices=("gieseker", "purity"), default="gieseker")
    curve.add_argument("--floor", type=int, default=None)
    curve.add_argument("--poincare", action="store_true")
    curve.add_argument("--guard", type=int, default=None)

    check = sub.add_parser("check", help="randomized identity suites")
    check.add_argument(
        "--suite", choices=("coeffs", "engine", "quiver", "curve", "cy3", "all"), default="all"
    )
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)

    tables = sub.add_parser("tables", help="transform a user-supplied invariant table")
    tables.add_argument("op", choices=TABLE_OPS)
    tables.add_argument("--table", required=True, help="invariant table JSON file")
    tables.add_argument("--chi", required=True, help='Euler form matrix, e.g. "1,-2;0,1"')
    tables.add_argument("--from", dest="from_stability", required=True)
    tables.add_argument("--to", dest="to_stability")
    tables.add_argument("--classes")
    tables.add_argument("--mode", choices=("oriented", "increasing"), default="oriented")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()
    if args.jobs is None:
        args.jobs = get_jobs()
    logging.info(f"Starting {args.command}")
    try:
        code = HANDLERS[args.command](args)
    except PrecisionError as e:
        logging.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InputError, MissingInvariantError, OracleGuardError, EnumerationError) as e:
        logging.error(f"{args.command} rejected its input: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (WallcrossError, OSError, json.JSONDecodeError) as e:
        logging.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    logging.info(f"Finished {args.command} with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
