"""Delimited reports, JSON mirrors, and figure rendering.

CSV is the primary output; JSON mirrors carry the full interval metadata.
Each report writer has a matching `plot_*` that renders a matplotlib
figure to a file alongside the delimited output.  Rows follow fixed sort
orders and floats are written with shortest round-trip repr, so identical
configurations produce byte-identical files.
"""

from __future__ import annotations

import json
from typing import IO, Optional

from .correlation import AutocorrTable
from .diffraction import SpectrumTable
from .hullcheck import PatchPattern
from .intervals import BoundedValue
from .pointsets import DensitySequence, Patch

# -- CSV ------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_rows(out: IO[str], header: list[str], rows: list[list]) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")


def patch_csv(p: Patch, out: IO[str]) -> None:
    d = p.region.dim
    header = [f"x{i + 1}" for i in range(d)]
    _write_rows(out, header, [list(map(int, row)) for row in p.points])


def patch_json(p: Patch) -> dict:
    return {
        "family": p.family_tag,
        "region": region_dict(p.region),
        "count": p.count,
        "points": [list(map(int, row)) for row in p.points],
    }


def region_dict(region) -> dict:
    return {"shape": region.shape, "radius": region.radius,
            "center": list(region.center), "volume": region.volume}


def autocorr_csv(table: AutocorrTable, out: IO[str]) -> None:
    d = table.region.dim
    header = [f"z{i + 1}" for i in range(d)]
    header += ["pair_count", "empirical", "theo_lower", "theo_upper", "margin"]
    rows = []
    for z in table.shifts():
        e = table.entries[z]
        theo = e.theoretical
        lo = theo.lower if theo else ""
        hi = theo.upper if theo else ""
        margin = (theo.upper - e.empirical) if theo else ""
        rows.append(list(z) + [e.pair_count, e.empirical, lo, hi, margin])
    _write_rows(out, header, rows)


def autocorr_json(table: AutocorrTable) -> dict:
    entries = []
    for z in table.shifts():
        e = table.entries[z]
        entries.append({
            "shift": list(z),
            "pair_count": e.pair_count,
            "empirical": e.empirical,
            "theoretical": interval_dict(e.theoretical),
        })
    return {"family": table.family_tag, "region": region_dict(table.region),
            "normalization": table.normalization, "entries": entries}


def interval_dict(v: Optional[BoundedValue]) -> Optional[dict]:
    if v is None:
        return None
    return {"lower": v.lower, "upper": v.upper}


def spectrum_csv(table: SpectrumTable, out: IO[str]) -> None:
    if not table.lines:
        dim = len(table.window_region)
    else:
        dim = table.lines[0].k.dim
    header = []
    for i in range(dim):
        header += [f"k{i + 1}_num", f"k{i + 1}_den"]
    header += ["Fk", "amp_lower", "amp_upper", "int_lower", "int_upper",
               "rel_intensity"]
    rows = []
    for line in table.lines:
        row = []
        for c in line.k.coords:
            row += [c.numerator, c.denominator]
        row += [";".join(str(n) for n in line.support_set),
                line.amplitude.lower, line.amplitude.upper,
                line.intensity.lower, line.intensity.upper,
                float(line.rel_intensity)]
        rows.append(row)
    _write_rows(out, header, rows)


def spectrum_json(table: SpectrumTable) -> dict:
    lines = []
    for line in table.lines:
        lines.append({
            "k": [[c.numerator, c.denominator] for c in line.k.coords],
            "support": list(line.support_set),
            "amplitude": interval_dict(line.amplitude),
            "intensity": interval_dict(line.intensity),
            "rel_intensity": [line.rel_intensity.numerator,
                              line.rel_intensity.denominator],
        })
    return {
        "family": table.family_tag,
        "threshold": table.threshold,
        "kbox": [[str(lo), str(hi)] for lo, hi in table.window_region],
        "lines": lines,
    }


def density_csv(seq: DensitySequence, model: Optional[BoundedValue],
                out: IO[str]) -> None:
    header = ["radius", "shape", "count", "volume", "estimate",
              "running_min", "running_max", "model_lower", "model_upper"]
    rows = []
    for est, lo, hi in zip(seq.estimates, seq.running_min, seq.running_max):
        rows.append([est.region.radius, est.region.shape, est.count,
                     est.volume, est.value, lo, hi,
                     model.lower if model else "", model.upper if model else ""])
    _write_rows(out, header, rows)


def density_json(seq: DensitySequence, model: Optional[BoundedValue]) -> dict:
    return {
        "model": interval_dict(model),
        "estimates": [{
            "region": region_dict(e.region),
            "count": e.count,
            "volume": e.volume,
            "value": e.value,
            "running_min": lo,
            "running_max": hi,
        } for e, lo, hi in zip(seq.estimates, seq.running_min, seq.running_max)],
    }


def hull_csv(pattern: PatchPattern, empirical, exact: BoundedValue,
             out: IO[str]) -> None:
    header = ["rho", "occupied", "empty", "translations", "volume",
              "empirical", "exact_lower", "exact_upper"]
    occ = ";".join(str(s) for s in sorted(pattern.occupied))
    emp = ";".join(str(s) for s in sorted(pattern.empty))
    _write_rows(out, header, [[pattern.rho, f'"{occ}"', f'"{emp}"',
                               empirical.count, empirical.volume,
                               empirical.value, exact.lower, exact.upper]])


def write_json(payload: dict, out: IO[str]) -> None:
    json.dump(payload, out, indent=2, sort_keys=True)
    out.write("\n")


# -- figures ----------------------------------------------------------------------


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_patch(p: Patch, path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6))
    if p.region.dim == 1:
        xs = p.points[:, 0]
        ax.scatter(xs, [0] * len(xs), s=4, c="k", marker="|")
        ax.set_yticks([])
    else:
        ax.scatter(p.points[:, 0], p.points[:, 1], s=max(0.2, 4e4 / max(p.count, 1)),
                   c="k", marker=".", linewidths=0)
        ax.set_aspect("equal")
    ax.set_title(f"{p.family_tag}: {p.count} points, {p.region.shape} r={p.region.radius}")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_spectrum(table: SpectrumTable, path: str) -> None:
    """Diffraction chart: a disk per line, area proportional to intensity."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6))
    if table.lines:
        xs = [float(l.k.coords[0]) for l in table.lines]
        ys = [float(l.k.coords[1]) if l.k.dim > 1 else 0.0 for l in table.lines]
        peak = max(float(l.rel_intensity) for l in table.lines)
        sizes = [240.0 * float(l.rel_intensity) / peak for l in table.lines]
        ax.scatter(xs, ys, s=sizes, c="k")
        ax.set_aspect("equal")
    ax.set_xlabel("k1")
    ax.set_ylabel("k2")
    ax.set_title(f"{table.family_tag}: {len(table.lines)} lines, "
                 f"threshold {table.threshold:g}")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_density(seq: DensitySequence, model: Optional[BoundedValue],
                 path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    radii = [e.region.radius for e in seq.estimates]
    ax.plot(radii, [e.value for e in seq.estimates], "ko-", label="empirical")
    if model is not None:
        ax.axhspan(model.lower, model.upper, color="tab:blue", alpha=0.3,
                   label="model interval")
    ax.set_xlabel("radius")
    ax.set_ylabel("density")
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_autocorr(table: AutocorrTable, path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    shifts = table.shifts()
    xs = range(len(shifts))
    ax.plot(xs, [table.entries[z].empirical for z in shifts], "ko",
            label="empirical")
    if all(table.entries[z].theoretical is not None for z in shifts):
        mids = [table.entries[z].theoretical.mid for z in shifts]
        errs = [0.5 * table.entries[z].theoretical.width for z in shifts]
        ax.errorbar(list(xs), mids, yerr=errs, fmt="r_", label="model")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(z) for z in shifts], rotation=45, fontsize=7)
    ax.set_ylabel("autocorrelation")
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
