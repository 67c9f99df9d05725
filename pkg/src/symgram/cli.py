"""Command-line entry point: ``symgram <command> ...``.

Exit codes: 0 success, 1 infeasible or refuted, 2 indeterminate, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import families, hposet, survey
from .certify import SosCertificate, adapted_basis_for, certify, rank_profile, verify
from .polycore import PolySyntaxError, SparsePoly, parse_poly, render
from .repsn import multiplicity, resolve_group
from .sdpcore import SdpOptions, Status
from .symadapt import copy_deviation, verify_block_structure
from .symfunc import format_partition, parse_partition, partitions_of

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INDETERMINATE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _status_exit(status: Status) -> int:
    if status.is_feasible:
        return EXIT_OK
    return EXIT_INFEASIBLE if status is Status.INFEASIBLE else EXIT_INDETERMINATE


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _rationals(text: str, count: int | None = None) -> list[Fraction]:
    try:
        values = [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse numbers from {text!r}") from exc
    if count is not None and len(values) != count:
        raise UsageError(f"expected {count} comma-separated values, got {len(values)}")
    return values


def _group_variables(group: str) -> int | None:
    match = re.fullmatch(r"[sS](\d+)", group.strip())
    return int(match.group(1)) if match else (3 if group.lower() in ("ih", "icosahedral") else None)


def _read_poly(path: str, n: int | None, group: str) -> SparsePoly:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    text = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if n is None:
        n = _group_variables(group)
    if n is None:
        indices = [int(k) for k in re.findall(r"x(\d+)", text)]
        n = max(indices, default=1)
    try:
        return parse_poly(text, n)
    except PolySyntaxError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _sdp_options(args) -> SdpOptions:
    opts = SdpOptions()
    if getattr(args, "feas_tol", None) is not None:
        opts.feas_tol = args.feas_tol
    if getattr(args, "rank_tol", None) is not None:
        opts.rank_tol = args.rank_tol
    if getattr(args, "max_iters", None) is not None:
        opts.max_iters = args.max_iters
    return opts


def _add_sdp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--feas-tol", type=float, help="feasibility tolerance (default 1e-8)")
    p.add_argument("--rank-tol", type=float, help="relative numerical rank cutoff (default 1e-7)")
    p.add_argument("--max-iters", type=int, help="interior-point iteration cap")


# ----------------------------------------------------------------- commands


def cmd_multiplicity(args) -> int:
    rows = [(lam, multiplicity(lam, args.d)) for lam in partitions_of(args.n)]
    if args.json:
        _write(_dump({"format": "symgram-multiplicity", "version": 1, "n": args.n, "d": args.d,
                      "rows": [{"partition": list(lam), "multiplicity": m} for lam, m in rows]}), None)
    else:
        lines = ["partition\tmultiplicity"] + [f"{format_partition(lam)}\t{m}" for lam, m in rows]
        _write("\n".join(lines), None)
    return EXIT_OK


def cmd_basis(args) -> int:
    rep = resolve_group(args.group, args.n, args.d)
    sab = adapted_basis_for(rep)
    block_err = verify_block_structure(rep, sab.change_of_basis, sab.layout)
    copy_err = copy_deviation(rep, sab.change_of_basis, sab.layout)
    if args.json:
        data = {"format": "symgram-basis", "version": 1, "group": rep.name, "n": args.n, "d": args.d,
                "basis": [render(SparsePoly.monomial(e)) for e in rep.basis],
                "block_error": block_err, "copy_error": copy_err}
        data.update(sab.to_dict())
        _write(_dump(data), None)
    else:
        lines = [f"group {rep.name} (order {rep.order}), degree {args.d}, {rep.size} monomials",
                 "label\tm\tn\toffset"]
        lines += [f"{e['label']}\t{e['m']}\t{e['n']}\t{e['offset']}" for e in sab.layout.to_dict()]
        lines.append(f"block structure error {block_err:.3e}; copy deviation {copy_err:.3e}")
        _write("\n".join(lines), None)
    return EXIT_OK


def cmd_certify(args) -> int:
    f = _read_poly(args.poly, args.n, args.group)
    outcome = certify(f, args.group, objective=args.objective, opts=_sdp_options(args))
    if outcome.certificate is not None and outcome.feasible:
        _write(outcome.certificate.to_json(), args.out)
        total, ranks = rank_profile(outcome.certificate)
        print(f"{outcome.status.value}: total rank {total} {ranks}, {len(outcome.certificate.squares)} squares, "
              f"residual {outcome.certificate.residual:.3e}", file=sys.stderr)
    else:
        data = {"status": outcome.status.value, "message": outcome.message}
        _write(_dump(data), args.out)
    return _status_exit(outcome.status)


def cmd_verify(args) -> int:
    try:
        cert = SosCertificate.from_json(Path(args.cert).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.cert}: {exc}") from exc
    f = _read_poly(args.poly, cert.n, "")
    report = verify(f, cert)
    ok = report.ok(args.tol)
    data = {"format": "symgram-verify", "version": 1, "ok": ok, "residual": report.residual,
            "invariance_defect": report.invariance_defect, "partial_defects": report.partial_defects}
    if args.json:
        _write(_dump(data), None)
    else:
        _write(f"{'valid' if ok else 'INVALID'}: residual {report.residual:.3e}, "
               f"invariance defect {report.invariance_defect:.3e}", None)
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_quartic(args) -> int:
    coeffs = families.QuarticCoeffs.of(*_rationals(args.coeffs, 4))
    result = families.quartic_analyze(coeffs, _sdp_options(args))
    if args.json:
        _write(_dump(families.quartic_analysis_to_dict(result)), None)
    else:
        names = ("a >= 0", "a + c >= 0", "a + 2b + c + d >= 0")
        lines = [f"quartic a,b,c,d = {','.join(str(v) for v in coeffs.as_tuple())}"]
        lines += [f"  necessary {name}: {'pass' if ok else 'FAIL'}" for name, ok in zip(names, result.necessary_ineqs)]
        lines.append(f"  conics: K1 {result.conics[0].kind.value}, K2 {result.conics[1].kind.value}")
        for v in result.vertices:
            where = f"({v.q12.real:.9g}, {v.q16.real:.9g})" if v.real else f"({v.q12:.6g}, {v.q16:.6g})"
            lines.append(f"  vertex {where}: {'PSD' if v.psd else 'not PSD' if v.real else 'complex'}")
        if result.ray:
            lines.append(f"  K1 is the ray from {result.ray[0]} in direction {result.ray[1]}")
        lines.append(f"  sos: {result.sos.value}")
        if result.witness:
            point, value = result.witness
            lines.append(f"  witness f{tuple(point)} = {value}")
        _write("\n".join(lines), None)
    return _status_exit(result.sos)


def cmd_quadratic(args) -> int:
    a, b = _rationals(args.a, 1)[0], _rationals(args.b, 1)[0]
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    result = families.quadratic_analyze(a, b, args.n)
    if args.json:
        _write(_dump(families.quadratic_analysis_to_dict(result)), None)
    else:
        verdict = f"SOS, rank {result.rank}" if result.sos else "not SOS"
        _write(f"a={a} b={b} n={args.n}: {verdict}; eigenvalues {result.eigenvalues[0]:.12g} (x1), "
               f"{result.eigenvalues[1]:.12g} (x{args.n - 1})", None)
    return EXIT_OK if result.sos else EXIT_INFEASIBLE


def cmd_sextic(args) -> int:
    coeffs = families.SexticCoeffs.of(*_rationals(args.coeffs, 7))
    obstructions = families.sextic_rank3_obstructions(coeffs)
    solution = None
    try:
        solution = families.solve_sextic(coeffs, _sdp_options(args))
    except ValueError as exc:
        print(f"feasibility not decided: {exc}", file=sys.stderr)
    status = solution.status if solution is not None else Status.INDETERMINATE
    data = {"format": "symgram-sextic", "version": 1, "coeffs": [str(v) for v in coeffs.as_tuple()],
            "obstructions": {k: str(v) for k, v in obstructions.items()}, "sos": status.value}
    free = _rationals(args.free, 6) if args.free else (list(solution.params) if solution and solution.params is not None else None)
    if free is not None:
        blocks = families.sextic_blocks(coeffs, [float(v) for v in free])
        data["free"] = [float(v) for v in free]
        data["blocks"] = [b.tolist() for b in blocks]
    if args.json:
        _write(_dump(data), None)
    else:
        lines = [f"sextic a1..a7 = {','.join(data['coeffs'])}",
                 f"  case (a) residual {obstructions['case_a']}", f"  case (b) residual {obstructions['case_b']}",
                 f"  sos: {status.value}"]
        for name, block in zip(("trivial", "standard", "sign"), data.get("blocks", [])):
            lines.append(f"  {name} block eigenvalues {np.round(np.linalg.eigvalsh(np.array(block)), 10).tolist()}")
        _write("\n".join(lines), None)
    return _status_exit(status)


def cmd_hpair(args) -> int:
    lam, mu = parse_partition(args.lam), parse_partition(args.mu)
    verdict = hposet.certify_h_pair(lam, mu, args.n, args.seed, _sdp_options(args))
    if args.json:
        _write(_dump(verdict.to_dict()), None)
    else:
        line = (f"H_{format_partition(mu)} >= H_{format_partition(lam)} (n={args.n}): {verdict.status.value}; "
                f"dominance {verdict.dominance.value}")
        if verdict.status is hposet.Verdict.CERTIFIED:
            line += f"; residual {verdict.residual:.3e}"
        elif verdict.point is not None:
            line += f"; difference at {tuple(str(v) for v in verdict.point)} is {verdict.value}"
        _write(line, None)
    return {hposet.Verdict.CERTIFIED: EXIT_OK, hposet.Verdict.REFUTED: EXIT_INFEASIBLE}.get(verdict.status, EXIT_INDETERMINATE)


def cmd_hposet(args) -> int:
    result = hposet.build_poset(args.weight, args.n, args.seed, _sdp_options(args), args.jobs,
                                args.max_pairs, args.degree_cap)
    dot = hposet.export_dot(result.verdicts, result.reduced_edges, result.nodes)
    if args.dot:
        _write(dot, args.dot)
    if args.json:
        _write(_dump(result.to_dict()), args.json)
    if args.plot:
        from .plotting import plot_poset

        plot_poset(result, args.plot)
    if not args.dot and not args.json:
        _write(dot, None)
    counts = {s.value: sum(v.status is s for v in result.verdicts) for s in hposet.Verdict}
    print(", ".join(f"{k}: {v}" for k, v in counts.items()), file=sys.stderr)
    return EXIT_OK


def cmd_survey(args) -> int:
    f = _read_poly(args.poly, args.n, args.group)
    try:
        report = survey.rank_survey(f, args.group, args.samples, args.seed, _sdp_options(args), args.jobs)
    except survey.NotSosError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.csv:
        _write(report.to_csv(), args.csv)
    if args.json:
        _write(_dump(report.to_dict()), args.json)
    if args.plot:
        from .plotting import plot_rank_histogram

        plot_rank_histogram(report, args.plot)
    if not args.csv and not args.json:
        _write(report.to_csv(), None)
    return EXIT_OK if not report.failures else EXIT_INDETERMINATE


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symgram", description="Symmetry-reduced SOS certificates for invariant forms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("multiplicity", help="isotypic multiplicities of S_n on degree-d forms")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_multiplicity)

    p = sub.add_parser("basis", help="symmetry-adapted basis and block layout")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--group", default="sn", help="sn, S<n>, ih, or a group JSON file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("certify", help="decide SOS and print a certificate")
    p.add_argument("--poly", required=True, help="file with the polynomial (x1, x2, ...)")
    p.add_argument("--group", default="sn")
    p.add_argument("--n", type=int, help="number of variables (inferred when omitted)")
    p.add_argument("--objective", choices=["trace", "min-rank"], default="trace")
    p.add_argument("--out", help="certificate output path (default stdout)")
    p.add_argument("--json", action="store_true", help="accepted for uniformity; output is always JSON")
    _add_sdp_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="check a certificate against a polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("quartic", help="symmetric ternary quartic analysis")
    p.add_argument("--coeffs", required=True, help="a,b,c,d")
    p.add_argument("--json", action="store_true")
    _add_sdp_flags(p)
    p.set_defaults(func=cmd_quartic)

    p = sub.add_parser("quadratic", help="symmetric quadratic form a*sum x^2 + 2b*sum x_i x_j")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_quadratic)

    p = sub.add_parser("sextic", help="symmetric ternary sextic blocks and rank-3 obstructions")
    p.add_argument("--coeffs", required=True, help="a1,...,a7")
    p.add_argument("--free", help="q12,q16,q18,q110,q49,q410 (default: a feasible point)")
    p.add_argument("--json", action="store_true")
    _add_sdp_flags(p)
    p.set_defaults(func=cmd_sextic)

    p = sub.add_parser("hpair", help="certify H_mu >= H_lambda on the orthant")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    _add_sdp_flags(p)
    p.set_defaults(func=cmd_hpair)

    p = sub.add_parser("hposet", help="poset of certified H inequalities")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dot")
    p.add_argument("--json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-pairs", type=int)
    p.add_argument("--degree-cap", type=int)
    p.add_argument("--plot", help="write a poset figure (PNG) here; needs matplotlib")
    _add_sdp_flags(p)
    p.set_defaults(func=cmd_hposet)

    p = sub.add_parser("survey", help="rank distribution under random objectives")
    p.add_argument("--poly", required=True)
    p.add_argument("--group", default="sn")
    p.add_argument("--n", type=int)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.add_argument("--json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--plot", help="write a rank histogram (PNG) here; needs matplotlib")
    _add_sdp_flags(p)
    p.set_defaults(func=cmd_survey)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"symgram {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (families.FamilyError, ValueError) as exc:
        print(f"symgram {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
