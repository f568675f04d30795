"""Command-line front end.

Every subcommand builds one or more named tables plus a list of failed
internal checks.  Tables are written as TSV (``## name`` header, column
line, rows) or as one JSON document; both carry the same numbers.  The
exit status is 0 when every check passes, 1 when some check fails and 2
on invalid input.
"""

import argparse
import json
import logging
import math
import os
import sys
from fractions import Fraction

from . import chaos, cumulants, fock, kernel, laws, partitions
from .errors import FreeChaosError

log = logging.getLogger("freechaos")

OUT_DIR_ENV = "FREECHAOS_OUT_DIR"


class Report:
    def __init__(self, command):
        self.command = command
        self.tables = []
        self.failures = []

    def table(self, name, columns):
        rows = []
        self.tables.append((name, list(columns), rows))
        return rows

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)
        return ok


def _real_part(x):
    if isinstance(x, complex):
        return x.real
    return x


def _tsv_value(x):
    x = _real_part(x)
    if x is None:
        return ""
    if isinstance(x, bool):
        return "ok" if x else "FAIL"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _json_value(x):
    x = _real_part(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if hasattr(x, "item"):
        return x.item()
    return x


def render(report, fmt):
    if fmt == "json":
        doc = {"command": report.command,
               "tables": {name: {"columns": cols,
                                 "rows": [[_json_value(v) for v in row]
                                          for row in rows]}
                          for name, cols, rows in report.tables},
               "failures": report.failures}
        return json.dumps(doc, indent=1) + "\n"
    chunks = []
    for name, cols, rows in report.tables:
        lines = ["## " + name, "\t".join(cols)]
        lines += ["\t".join(_tsv_value(v) for v in row) for row in rows]
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


def _number(text, exact):
    try:
        return Fraction(text) if exact else float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise FreeChaosError("not a number: %r" % text) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_counts(args, report):
    table = partitions.count_table(args.max_m)
    width = max(1, args.max_m // 2)
    cols = ["m", "catalan", "riordan"] + ["R_m%d" % j for j in
                                          range(1, width + 1)] + ["identity"]
    rows = report.table("counts", cols)
    for m, c, r, refined in table.rows():
        refined = list(refined[1:width + 1])
        refined += [0] * (width - len(refined))
        ok = c == sum(math.comb(m, j) * table.riordan[j] for j in range(m + 1))
        if m >= 1:
            ok = ok and r == sum(table.refined[m])
        report.check(ok, "identity violated at m=%d" % m)
        rows.append([m, c, r] + refined + [ok])


def _combinatorial_moments(dist, param, max_m):
    if dist == "semicircle":
        kappa = cumulants.semicircle_cumulants(param, max_m)
        return list(cumulants.moments_from_cumulants(kappa, max_m))
    return [cumulants.centered_poisson_moment(param, m)
            for m in range(1, max_m + 1)]


def cmd_moments(args, report):
    exact = args.mode == "exact"
    param = _number(args.param, exact)
    tol = args.tol if args.tol is not None else 1e-6
    want_comb = args.method in ("combinatorial", "both")
    want_quad = args.method in ("quadrature", "both")
    limit = 10 if want_quad else partitions.MAX_ENUM
    if not 1 <= args.max_m <= limit:
        raise FreeChaosError("max-m must be in [1, %d] for method %s"
                             % (limit, args.method))
    law = (laws.semicircle(float(param)) if args.dist == "semicircle"
           else laws.centered_free_poisson(float(param)))
    comb = _combinatorial_moments(args.dist, param, args.max_m) if want_comb else None
    cols = ["m"] + (["combinatorial"] if want_comb else []) \
        + (["quadrature"] if want_quad else []) \
        + (["gap"] if want_comb and want_quad else [])
    rows = report.table("moments", cols)
    for m in range(1, args.max_m + 1):
        row = [m]
        if want_comb:
            row.append(comb[m - 1])
        if want_quad:
            q = laws.quadrature_moment(law, m)
            row.append(q)
        if want_comb and want_quad:
            gap = abs(float(comb[m - 1]) - q)
            report.check(gap <= tol, "moment %d: quadrature gap %.3g > %g"
                         % (m, gap, tol))
            row.append(gap)
        rows.append(row)


def _rel_gap(a, b):
    a, b = complex(a), complex(b)
    return abs(a - b) / max(1.0, abs(b))


def cmd_chaos(args, report):
    exact = args.mode == "exact"
    f = kernel.read_kernel(args.kernel, exact=exact)
    tol = args.tol if args.tol is not None else 1e-9
    summary = chaos.kernel_summary(f)
    lam = summary["norm_sq"]
    if not lam:
        log.warning("kernel is identically zero")
    cols = ["m", "moment", "d_sum", "e_sum", "imag"]
    if args.oracle:
        cols += ["oracle", "oracle_gap"]
    rows = report.table("moments", cols)
    seq_rows = (report.table("sequences", ["m", "sequence", "class", "value"])
                if args.report_sequences else None)
    moments = {}
    for m in range(2, args.m_max + 1):
        rep = chaos.wigner_moment(f, m, keep_sequences=args.report_sequences)
        moments[m] = rep.total
        imag = rep.imag_residual
        report.check(imag <= 1e-10 * max(1.0, abs(complex(rep.total))),
                     "moment %d is not real (imag %.3g)" % (m, imag))
        row = [m, rep.total, rep.d_sum, rep.e_sum, imag]
        if args.oracle:
            o = fock.oracle_moment(f, m)
            gap = _rel_gap(o, rep.total)
            report.check(gap <= tol, "oracle gap at m=%d: %.3g" % (m, gap))
            row += [o, gap]
        rows.append(row)
        if seq_rows is not None:
            for seq, val in rep.per_sequence:
                seq_rows.append([m, str(seq), seq.classification, val])
    if 2 in moments:
        report.check(_rel_gap(moments[2], lam) <= 1e-12,
                     "second moment differs from ||f||^2")
    stat = chaos.fourth_moment_statistic(f)
    defect = chaos.poisson_defect(f)
    srows = report.table("summary", ["quantity", "value"])
    srows.append(["norm_sq", lam])
    srows.append(["fourth_moment_statistic", stat])
    srows.append(["poisson_target", 2 * lam ** 2 - lam])
    srows.append(["defect_midpoint", defect.midpoint])
    for r, v in sorted(defect.offband.items()):
        srows.append(["defect_offband_%d" % r, v])
    srows.append(["defect_total", defect.total])


def _family(args):
    exact = args.mode == "exact"
    if args.family == "poisson":
        if len(args.params) != 2:
            raise FreeChaosError("poisson family takes: p d")
        p, d = (int(x) for x in args.params)
        return chaos.poisson_family(p, d, exact=exact), p
    if args.family == "semicircle4":
        if len(args.params) != 1:
            raise FreeChaosError("semicircle4 family takes: lambda")
        lam = float(Fraction(args.params[0]))
        return chaos.semicircle4_family(lam), lam
    raise FreeChaosError("unknown family %r" % args.family)


def cmd_scan(args, report):
    family, lam = _family(args)
    tol = args.tol if args.tol is not None else 1e-9
    table = chaos.convergence_scan(family, lam, args.m_max, args.n)
    gcols = ["gap_%d" % m for m in range(2, args.m_max + 1)]
    rows = report.table("scan", ["n", "second_moment", "statistic",
                                 "statistic_gap", "defect_midpoint",
                                 "defect_offband", "defect_total"] + gcols)
    for row in table.rows:
        rows.append([row.n, row.moments[2], row.statistic, row.statistic_gap,
                     row.defect.midpoint, sum(row.defect.offband.values()),
                     row.defect.total]
                    + [row.moment_gaps[m] for m in range(2, args.m_max + 1)])
        if args.family == "poisson":
            worst = max(float(g) for g in row.moment_gaps.values())
            report.check(worst <= tol, "n=%d: moment gap %.3g at the Poisson "
                         "fixed point" % (row.n, worst))
    trows = report.table("trend", ["column", "trend"])
    for k, v in table.trend.items():
        trows.append([k, v])


def cmd_oracle(args, report):
    exact = args.mode == "exact"
    f = kernel.read_kernel(args.kernel, exact=exact)
    tol = args.tol if args.tol is not None else 1e-9
    q = f.order
    engine = q in (2, 4)
    cols = ["m", "oracle"] + (["engine", "gap"] if engine else ["expected"])
    rows = report.table("oracle", cols)
    lam = kernel.norm_sq(f)
    for m in range(1, args.m_max + 1):
        level = args.level if args.level is not None else q * m
        o = fock.oracle_moment(f, m, max(level, q * m))
        if engine and m >= 2:
            e = chaos.wigner_moment(f, m, keep_sequences=False).total
            gap = _rel_gap(o, e)
            report.check(gap <= tol, "oracle gap at m=%d: %.3g" % (m, gap))
            rows.append([m, o, e, gap])
        elif engine:
            rows.append([m, o, None, None])
        elif q == 1:
            exp = (partitions.catalan(m // 2) * float(lam) ** (m // 2)
                   if m % 2 == 0 else 0.0)
            report.check(_rel_gap(o, exp) <= tol,
                         "q=1 moment %d differs from Catalan value" % m)
            rows.append([m, o, exp])
        else:
            rows.append([m, o, None])


COMMANDS = {"counts": cmd_counts, "moments": cmd_moments, "chaos": cmd_chaos,
            "scan": cmd_scan, "oracle": cmd_oracle}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "float"), default="float")
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")
    common.add_argument("--tol", type=float, default=None,
                        help="override the command's check tolerance")
    common.add_argument("--out", default=None,
                        help="write output here instead of stdout "
                             "(relative paths honour $%s)" % OUT_DIR_ENV)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="freechaos",
        description="Free cumulants, free Poisson moments and Wigner chaos "
                    "moment diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counts", parents=[common],
                       help="Catalan / Riordan / refined Riordan table")
    p.add_argument("--max-m", type=int, default=8)

    p = sub.add_parser("moments", parents=[common],
                       help="moments of the semicircle or centered free "
                            "Poisson law")
    p.add_argument("dist", choices=("semicircle", "cpoisson"))
    p.add_argument("param", help="variance t or rate lambda (e.g. 7/3)")
    p.add_argument("--max-m", type=int, default=6)
    p.add_argument("--method", choices=("combinatorial", "quadrature", "both"),
                   default="both")

    p = sub.add_parser("chaos", parents=[common],
                       help="moments and diagnostics of I(f) for a kernel file")
    p.add_argument("kernel")
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--report-sequences", action="store_true")
    p.add_argument("--oracle", action="store_true",
                   help="add a Fock-space oracle column")

    p = sub.add_parser("scan", parents=[common],
                       help="convergence scan over a built-in kernel family")
    p.add_argument("family", choices=("poisson", "semicircle4"))
    p.add_argument("params", nargs="+")
    p.add_argument("--n", type=int, nargs="+", default=[4, 16, 64])
    p.add_argument("--m-max", type=int, default=4)

    p = sub.add_parser("oracle", parents=[common],
                       help="vacuum moments on the truncated Fock space")
    p.add_argument("kernel")
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--level", type=int, default=None)
    return parser


def _out_path(path):
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    report = Report(args.command)
    try:
        COMMANDS[args.command](args, report)
    except (FreeChaosError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    text = render(report, args.format)
    if args.out:
        with open(_out_path(args.out), "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report.failures:
        print(json.dumps({"failures": report.failures}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
