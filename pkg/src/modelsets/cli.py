"""Command-line front end.

Subcommands wrap the library operations into reproducible runs: the same
flags produce byte-identical output files.  Exit codes: 0 ok, 1 family
validation failure, 2 bad argument, 3 comparison contract failure, 64
malformed config.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction

from . import family as fam
from . import report
from .correlation import autocorr_table, sandwich_check
from .diffraction import (RationalPoint, amplitude, empirical_amplitude,
                          inclusion_exclusion_amplitude, minimal_support,
                          spectrum_table)
from .errors import BadExponent, ModelSetError, ValidationError
from .family import CoprimeFamily, model_density
from .hullcheck import (PatchPattern, admissible, patch_frequency_empirical,
                        patch_frequency_exact)
from .pointsets import (Region, density_sequence, find_hole, generate,
                        generate_kfree, generate_visible, maximality_report)
from .primes import primes_upto

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BAD_ARG = 2
EXIT_CONTRACT = 3
EXIT_CONFIG = 64


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=["visible-d2", "kfree", "bfree"],
                   help="built-in family")
    p.add_argument("--k", type=int, default=2, help="exponent for --preset kfree")
    p.add_argument("--b", type=str, default=None,
                   help="comma-separated moduli for --preset bfree")
    p.add_argument("--family", type=str, default=None,
                   help="JSON family description file")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--truncation", type=int, default=None,
                   help="number of leading members to use")
    p.add_argument("--prime-bound", type=int, default=10000,
                   help="for prime-indexed presets: use members with prime <= bound")
    p.add_argument("--out", type=str, default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--plot", type=str, default=None,
                   help="also render a figure to this file")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap; results are independent of it")


def _build_family(args) -> CoprimeFamily:
    if args.family:
        try:
            with open(args.family) as fh:
                desc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _CliError(EXIT_CONFIG, f"cannot read family file: {exc}")
        try:
            return fam.family_from_description(desc)
        except BadExponent as exc:
            raise _CliError(EXIT_BAD_ARG, str(exc))
        except (ModelSetError, ValueError, KeyError) as exc:
            raise _CliError(EXIT_VALIDATION, f"invalid family: {exc}")
    if not args.preset:
        raise _CliError(EXIT_BAD_ARG, "need --preset or --family")
    try:
        if args.preset == "visible-d2":
            return fam.visible_points_family()
        if args.preset == "kfree":
            return fam.kfree_family(args.k)
        if args.preset == "bfree":
            if not args.b:
                raise _CliError(EXIT_BAD_ARG, "--preset bfree needs --b")
            return fam.bfree_family([int(v) for v in args.b.split(",")])
    except BadExponent as exc:
        raise _CliError(EXIT_BAD_ARG, str(exc))
    except ValidationError as exc:
        raise _CliError(EXIT_VALIDATION, str(exc))
    raise _CliError(EXIT_BAD_ARG, f"unknown preset {args.preset}")


def _truncation(f: CoprimeFamily, args) -> int:
    if args.truncation is not None:
        if args.truncation < 1:
            raise _CliError(EXIT_BAD_ARG, "--truncation must be >= 1")
        return f.effective_truncation(args.truncation)
    if f.is_finite:
        return f.size
    return len(primes_upto(args.prime_bound))


def _emit(args, text_writer, json_payload) -> None:
    buf = io.StringIO()
    if args.format == "csv":
        text_writer(buf)
    else:
        report.write_json(json_payload(), buf)
    data = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data)


def _exact_or_generate(f: CoprimeFamily, region: Region, N: int):
    if f.preset_tag == fam.PRESET_VISIBLE:
        return generate_visible(region)
    if f.preset_tag == fam.PRESET_KFREE:
        return generate_kfree(f.kfree_k, region)
    return generate(f, region, N)


# -- subcommands -------------------------------------------------------------------


def cmd_validate(args) -> int:
    if args.family:
        try:
            with open(args.family) as fh:
                desc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _CliError(EXIT_CONFIG, f"cannot read family file: {exc}")
    else:
        if not args.preset:
            raise _CliError(EXIT_BAD_ARG, "need --preset or --family")
        desc = {"preset": args.preset}
        if args.preset == "kfree":
            desc["k"] = args.k
        if args.preset == "bfree":
            if not args.b:
                raise _CliError(EXIT_BAD_ARG, "--preset bfree needs --b")
            desc["b"] = [int(v) for v in args.b.split(",")]
    rep = fam.validation_report(desc)
    sys.stdout.write(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    if rep.valid:
        return EXIT_OK
    if rep.error_type == "BadExponent":
        return EXIT_BAD_ARG
    return EXIT_VALIDATION


def cmd_generate(args) -> int:
    f = _build_family(args)
    N = _truncation(f, args)
    region = Region(args.shape, args.radius, f.dim)
    patch = _exact_or_generate(f, region, N)
    _emit(args, lambda out: report.patch_csv(patch, out),
          lambda: report.patch_json(patch))
    if args.plot:
        report.plot_patch(patch, args.plot)
    return EXIT_OK


def cmd_density(args) -> int:
    f = _build_family(args)
    N = _truncation(f, args)
    if not args.radii and args.radius is None:
        raise _CliError(EXIT_BAD_ARG, "need --radius or --radii")
    radii = _parse_int_list(args.radii) if args.radii else [args.radius]
    seq = density_sequence(f, radii, N, shape=args.shape)
    model = model_density(f, N)
    _emit(args, lambda out: report.density_csv(seq, model, out),
          lambda: report.density_json(seq, model))
    if args.plot:
        report.plot_density(seq, model, args.plot)
    return EXIT_OK


def cmd_autocorr(args) -> int:
    f = _build_family(args)
    N = _truncation(f, args)
    region = Region(args.shape, args.radius, f.dim)
    patch = _exact_or_generate(f, region, N)
    shifts = _parse_shifts(args.shifts, f.dim)
    table = autocorr_table(f, patch, shifts, N)
    _emit(args, lambda out: report.autocorr_csv(table, out),
          lambda: report.autocorr_json(table))
    if args.plot:
        report.plot_autocorr(table, args.plot)
    return EXIT_OK


def cmd_diffract(args) -> int:
    f = _build_family(args)
    N = _truncation(f, args)
    box = _parse_kbox(args.kbox, f.dim)
    table = spectrum_table(f, box, args.threshold, N)
    _emit(args, lambda out: report.spectrum_csv(table, out),
          lambda: report.spectrum_json(table))
    if args.plot:
        report.plot_spectrum(table, args.plot)
    return EXIT_OK


def cmd_amplitude(args) -> int:
    from .errors import NotInSpectrum
    f = _build_family(args)
    N = _truncation(f, args)
    k = _parse_k(args.kpoint, f.dim)
    try:
        closed = amplitude(f, k, N)
        rows = {
            "k": str(k),
            "in_spectrum": True,
            "support": list(minimal_support(f, k)),
            "closed_form": report.interval_dict(closed),
        }
    except NotInSpectrum:
        # off the spectrum the limit amplitude is zero; only the empirical
        # sum is informative
        closed = None
        rows = {"k": str(k), "in_spectrum": False, "support": None,
                "closed_form": None}
    if args.ie_members and closed is not None:
        ie = inclusion_exclusion_amplitude(f, k, args.ie_members)
        rows["inclusion_exclusion"] = report.interval_dict(ie)
        rows["oracles_overlap"] = closed.overlaps(ie)
    if args.radius:
        region = Region(args.shape, args.radius, f.dim)
        patch = _exact_or_generate(f, region, N)
        emp = empirical_amplitude(patch, k)
        rows["empirical"] = {"real": emp.real, "imag": emp.imag}
        rows["empirical_abs_error"] = abs(emp - (closed.mid if closed else 0.0))
    sys.stdout.write(json.dumps(rows, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_hole(args) -> int:
    f = _build_family(args)
    result = find_hole(f, args.m)
    payload = {
        "t": [str(c) for c in result.t],
        "m": result.m,
        "block_points": len(result.assignments),
        "witnesses": [{
            "offset": list(off),
            "member": n,
            "point": [str(c) for c in pt],
            "witness": w,
        } for off, n, pt, w in result.assignments],
    }
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_hull(args) -> int:
    f = _build_family(args)
    if f.preset_tag != fam.PRESET_VISIBLE:
        raise _CliError(EXIT_BAD_ARG, "hull checks are defined for --preset visible-d2")
    region = Region(args.shape, args.radius, 2)
    patch = generate_visible(region)
    if args.check_admissible:
        rep = admissible(patch, args.prime_bound)
        payload = {"admissible": rep.admissible,
                   "failing_primes": rep.failing,
                   "witnesses": {str(q): (list(w) if w else None)
                                 for q, w in rep.witnesses.items()}}
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    if not args.pattern:
        raise _CliError(EXIT_BAD_ARG, "need --pattern file or --check-admissible")
    try:
        with open(args.pattern) as fh:
            desc = json.load(fh)
        pattern = PatchPattern.from_dict(desc)
    except (OSError, json.JSONDecodeError) as exc:
        raise _CliError(EXIT_CONFIG, f"cannot read pattern file: {exc}")
    except ValueError as exc:
        raise _CliError(EXIT_BAD_ARG, str(exc))
    empirical = patch_frequency_empirical(patch, pattern)
    exact = patch_frequency_exact(pattern, args.exact_prime_bound)
    _emit(args, lambda out: report.hull_csv(pattern, empirical, exact, out),
          lambda: {"rho": pattern.rho,
                   "occupied": sorted(map(list, pattern.occupied)),
                   "empty": sorted(map(list, pattern.empty)),
                   "empirical": empirical.value,
                   "exact": report.interval_dict(exact)})
    return EXIT_OK


def cmd_compare(args) -> int:
    f = _build_family(args)
    N = _truncation(f, args)
    failures = []
    lines = []

    radii = _parse_int_list(args.radii) if args.radii else [args.radius]
    maxrep = maximality_report(f, radii, N, shape=args.shape)
    ok = maxrep.verdict == "CONSISTENT"
    lines.append(_verdict_line("maximal-density", ok,
                               f"worst margin {maxrep.worst_margin:.3e}"))
    if not ok:
        failures.append("maximal-density")

    region = Region(args.shape, max(radii), f.dim)
    patch = _exact_or_generate(f, region, N)
    shifts = _parse_shifts(args.shifts, f.dim)
    table = autocorr_table(f, patch, shifts, N)
    sandwich = sandwich_check(f, table)
    lines.append(_verdict_line("autocorr-sandwich", sandwich.passed,
                               f"worst margin {sandwich.worst_margin:.3e}"))
    if not sandwich.passed:
        failures.append("autocorr-sandwich")

    box = _parse_kbox(args.kbox, f.dim)
    spectrum = spectrum_table(f, box, args.threshold, N)
    M = args.ie_members or min(N, 25)
    bad = []
    for line in spectrum.lines[:args.kpoints]:
        ie = inclusion_exclusion_amplitude(f, line.k, M)
        if not ie.overlaps(line.amplitude):
            bad.append(str(line.k))
    lines.append(_verdict_line("amplitude-two-oracles", not bad,
                               f"{min(len(spectrum.lines), args.kpoints)} points checked"
                               + (f"; disagree at {bad}" if bad else "")))
    if bad:
        failures.append("amplitude-two-oracles")

    summary = "PASS" if not failures else f"FAIL ({', '.join(failures)})"
    lines.append(f"overall: {summary}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if not failures else EXIT_CONTRACT


def _verdict_line(name: str, ok: bool, detail: str) -> str:
    return f"{name}: {'PASS' if ok else 'FAIL'} ({detail})"


# -- parsing helpers ----------------------------------------------------------------


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise _CliError(EXIT_BAD_ARG, f"bad integer list {text!r}: {exc}")


def _parse_shifts(text: str, dim: int) -> list[tuple[int, ...]]:
    shifts = []
    try:
        for part in text.split(";"):
            if not part.strip():
                continue
            shift = tuple(int(v) for v in part.split(","))
            if len(shift) != dim:
                raise _CliError(EXIT_BAD_ARG, f"shift {part!r} has wrong dimension")
            shifts.append(shift)
    except ValueError as exc:
        raise _CliError(EXIT_BAD_ARG, f"bad shift list {text!r}: {exc}")
    if not shifts:
        raise _CliError(EXIT_BAD_ARG, "empty shift list")
    return shifts


def _parse_kbox(text: str, dim: int):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 * dim:
        raise _CliError(EXIT_BAD_ARG,
                        f"--kbox needs {2 * dim} comma-separated values for dim {dim}")
    try:
        vals = [Fraction(p) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise _CliError(EXIT_BAD_ARG, f"bad --kbox {text!r}: {exc}")
    box = [(vals[2 * i], vals[2 * i + 1]) for i in range(dim)]
    for lo, hi in box:
        if not lo < hi:
            raise _CliError(EXIT_BAD_ARG, "--kbox bounds must satisfy lo < hi")
    return box


def _parse_k(text: str, dim: int) -> RationalPoint:
    try:
        k = RationalPoint.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise _CliError(EXIT_BAD_ARG, f"bad k point {text!r}: {exc}")
    if k.dim != dim:
        raise _CliError(EXIT_BAD_ARG, f"k point {text!r} has wrong dimension")
    return k


# -- driver ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelsets",
        description="Weak model sets from coprime sublattice families: "
                    "densities, autocorrelation, diffraction.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        _add_family_flags(p)
        _add_common_flags(p)
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, help="validate a family description")

    g = add("generate", cmd_generate, help="list the points of V in a region")
    g.add_argument("--radius", type=int, required=True)
    g.add_argument("--shape", choices=["box", "ball"], default="box")

    d = add("density", cmd_density, help="empirical densities vs the model value")
    d.add_argument("--radius", type=int, default=None)
    d.add_argument("--radii", type=str, default=None,
                   help="comma-separated radii for a density sequence")
    d.add_argument("--shape", choices=["box", "ball"], default="box")

    a = add("autocorr", cmd_autocorr, help="autocorrelation coefficients at shifts")
    a.add_argument("--radius", type=int, required=True)
    a.add_argument("--shape", choices=["box", "ball"], default="box")
    a.add_argument("--shifts", type=str, default="1,0;1,1;2,0;2,1;3,0")

    f = add("diffract", cmd_diffract, help="diffraction spectrum table")
    f.add_argument("--kbox", type=str, required=True,
                   help="half-open dual box lo1,hi1[,lo2,hi2]")
    f.add_argument("--threshold", type=float, default=1e-6,
                   help="relative intensity floor")

    m = add("amplitude", cmd_amplitude, help="amplitude at one spectrum point")
    m.add_argument("--kpoint", type=str, required=True, help="e.g. 1/2,1/2")
    m.add_argument("--radius", type=int, default=None,
                   help="also evaluate the empirical exponential sum")
    m.add_argument("--shape", choices=["box", "ball"], default="box")
    m.add_argument("--ie-members", type=int, default=None,
                   help="cross-check with inclusion-exclusion over this prefix")

    h = add("hole", cmd_hole, help="construct an all-excluded block")
    h.add_argument("--m", type=int, required=True,
                   help="block is t + [-m, m]^d")

    u = add("hull", cmd_hull, help="hull admissibility and patch frequencies")
    u.add_argument("--radius", type=int, default=200)
    u.add_argument("--shape", choices=["box", "ball"], default="box")
    u.add_argument("--pattern", type=str, default=None,
                   help="pattern JSON: {\"rho\": 1, \"occupied\": [[0,0]], \"empty\": []}")
    u.add_argument("--check-admissible", action="store_true")
    u.add_argument("--exact-prime-bound", type=int, default=1000)

    c = add("compare", cmd_compare, help="run the consistency contracts")
    c.add_argument("--radius", type=int, default=500)
    c.add_argument("--radii", type=str, default=None)
    c.add_argument("--shape", choices=["box", "ball"], default="box")
    c.add_argument("--shifts", type=str, default="1,0;1,1;2,0;2,1;3,0")
    c.add_argument("--kbox", type=str, default="0,1,0,1")
    c.add_argument("--threshold", type=float, default=1e-3)
    c.add_argument("--kpoints", type=int, default=20)
    c.add_argument("--ie-members", type=int, default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        sys.stderr.write("--threads must be >= 1\n")
        return EXIT_BAD_ARG
    try:
        return args.func(args)
    except _CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except BadExponent as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BAD_ARG
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except ModelSetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BAD_ARG


if __name__ == "__main__":
    sys.exit(main())
