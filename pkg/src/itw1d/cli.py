"""Command-line surface: spectrum, certify, count, figure, born, limits, homotopy.

Output is fully deterministic: no randomized initial points anywhere, roots
ordered by (Re k, Im k), floats serialized with 17 significant digits so CSV
round-trips losslessly through doubles.  Exit codes: 0 success, 1 solver or
certification defect, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import analytic_solver as an
from . import certify as ct
from . import limits as lm
from . import rational_solver as rs
from . import roots as rt
from .model import (
    Medium,
    RationalM,
    ScaledProblem,
    contrast_from_sigma,
    detect_rational,
    k_to_z,
    make_medium,
    normalize,
    z_to_k,
)

MAX_RATIONAL_DEGREE = 4000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    sigma_text: str
    sigma: float
    sigma_exact: Fraction | None
    length: float
    kmin: float
    kmax: float
    method: str = "auto"
    fmt: str = "csv"
    out: str | None = None
    tol_residual: float = 1e-9
    tol_cluster: float = rs.DEFAULT_CLUSTER_RADIUS
    deterministic: bool = True


def _parse_sigma(text: str) -> tuple[float, Fraction | None]:
    if "/" in text:
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse sigma {text!r}: {exc}") from exc
        return float(frac), frac
    try:
        return float(text), None
    except ValueError as exc:
        raise ConfigError(f"cannot parse sigma {text!r}: {exc}") from exc


def _setup(cfg: RunConfig) -> tuple[Medium, ScaledProblem, RationalM | None]:
    medium = make_medium(cfg.sigma, cfg.length)
    problem = normalize(medium)
    if cfg.sigma_exact is not None:
        m_exact = contrast_from_sigma(cfg.sigma_exact)
        rm = RationalM(m_exact.numerator, m_exact.denominator, exact=True)
    else:
        rm = detect_rational(problem.m)
    return medium, problem, rm


def _z_window(cfg: RunConfig, problem: ScaledProblem) -> tuple[float, float]:
    lo = complex(k_to_z(cfg.kmin, problem)).real
    hi = complex(k_to_z(cfg.kmax, problem)).real
    if not hi > lo >= 0:
        raise ConfigError("need 0 <= kmin < kmax")
    return lo, hi


def _pick_method(cfg: RunConfig, rm: RationalM | None) -> str:
    if cfg.method != "auto":
        return cfg.method
    if rm is not None and 2 * rm.p <= MAX_RATIONAL_DEGREE:
        return "rational"
    return "analytic"


def _solve(cfg: RunConfig, problem: ScaledProblem, rm: RationalM | None, method: str) -> rt.Spectrum:
    window = _z_window(cfg, problem)
    if method == "rational":
        if rm is None:
            raise ConfigError("rational method requires a rational contrast")
        return rs.spectrum_rational(problem, rm, window, cluster_radius=cfg.tol_cluster)
    return an.spectrum_analytic(problem, window, rm)


def match_spectra(a: rt.Spectrum, b: rt.Spectrum, tol: float = 1e-8) -> list[str]:
    """Multiplicity-aware 1-to-1 nearest matching in z; returns mismatch notes."""
    notes = []
    ra, rb = list(a.roots), list(b.roots)
    if len(ra) != len(rb):
        notes.append(f"root counts differ: {len(ra)} vs {len(rb)}")
    unused = list(rb)
    for x in ra:
        if not unused:
            break
        y = min(unused, key=lambda r: abs(complex(r.z) - complex(x.z)))
        unused.remove(y)
        if abs(complex(x.z) - complex(y.z)) > tol:
            notes.append(f"roots {x.z} and {y.z} differ by more than {tol}")
        elif x.multiplicity != y.multiplicity:
            notes.append(f"multiplicities differ at z={x.z}: {x.multiplicity} vs {y.multiplicity}")
    return notes


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def spectrum_csv(spectrum: rt.Spectrum) -> str:
    lines = ["re_k,im_k,multiplicity,parity,certified"]
    for r in sorted(spectrum.roots, key=lambda r: (complex(r.k).real, complex(r.k).imag)):
        k = complex(r.k)
        lines.append(
            f"{_fmt(k.real)},{_fmt(k.imag)},{r.multiplicity},{r.parity.value},"
            f"{'true' if r.certified else 'false'}"
        )
    return "\n".join(lines) + "\n"


def _root_dict(r: rt.Root) -> dict:
    z, k = complex(r.z), complex(r.k)
    return {
        "re_z": z.real,
        "im_z": z.imag,
        "re_k": k.real,
        "im_k": k.imag,
        "multiplicity": r.multiplicity,
        "parity": r.parity.value,
        "method": r.method,
        "certified": r.certified,
    }


def _config_dict(cfg: RunConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["sigma_exact"] = str(cfg.sigma_exact) if cfg.sigma_exact is not None else None
    return d


def spectrum_json(cfg: RunConfig, spectrum: rt.Spectrum, report: ct.CertReport | None = None) -> str:
    payload = {
        "config": _config_dict(cfg),
        "roots": [
            _root_dict(r)
            for r in sorted(spectrum.roots, key=lambda r: (complex(r.k).real, complex(r.k).imag))
        ],
        "report": report_dict(report) if report is not None else None,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_dict(report: ct.CertReport) -> dict:
    return {
        "matched": report.matched,
        "convention_notes": report.convention_notes,
        "max_eigen_residual": report.max_eigen_residual,
        "bounds": {
            "z_bound": report.bounds.z_bound,
            "k_bound": report.bounds.k_bound,
            "max_imag_z": report.bounds.max_imag_z,
            "max_imag_k": report.bounds.max_imag_k,
            "max_fraction_z": report.bounds.max_fraction_z,
            "max_fraction_k": report.bounds.max_fraction_k,
            "violations": list(report.bounds.violations),
        },
        "defects": list(report.defects),
        "strips": [
            {
                "kind": rec.kind,
                "j_lo": rec.j_lo,
                "j_hi": rec.j_hi,
                "re_lo": rec.re_lo,
                "re_hi": rec.re_hi,
                "predicted": rec.predicted,
                "winding_odd": rec.winding_odd,
                "winding_even": rec.winding_even,
                "spectrum_total": rec.spectrum_total,
                "match": rec.match,
                "note": rec.note,
            }
            for rec in report.records
        ],
    }


def guide_lines(sigma: float, length: float, kmax: float) -> list[float]:
    """Vertical guide abscissae Re k = 2*j*pi/((sigma+1)*L) covering (0, kmax]."""
    step = 2.0 * math.pi / ((sigma + 1.0) * length)
    return [j * step for j in range(1, int(kmax / step) + 1)]


def render_svg(panels: list[tuple[str, rt.Spectrum, list[float]]], kmax: float) -> str:
    width, panel_h, margin = 900.0, 300.0, 45.0
    total_h = panel_h * len(panels)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" '
        f'height="{total_h:.0f}" viewBox="0 0 {width:.0f} {total_h:.0f}">',
    ]
    for idx, (label, spectrum, guides) in enumerate(panels):
        ys = [abs(complex(r.k).imag) for r in spectrum.roots] or [1.0]
        ymax = max(max(ys) * 1.2, 0.5)
        top = idx * panel_h

        def sx(x: float) -> float:
            return margin + (width - 2 * margin) * x / kmax

        def sy(y: float) -> float:
            return top + panel_h / 2 - (panel_h / 2 - margin) * y / ymax

        parts.append(f'<g id="panel{idx}">')
        parts.append(
            f'<rect x="{margin:.2f}" y="{top + margin:.2f}" width="{width - 2 * margin:.2f}" '
            f'height="{panel_h - 2 * margin:.2f}" fill="none" stroke="#888" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{margin:.2f}" y="{top + margin - 8:.2f}" font-size="14">{label}</text>'
        )
        for gx in guides:
            parts.append(
                f'<line x1="{sx(gx):.3f}" y1="{top + margin:.3f}" x2="{sx(gx):.3f}" '
                f'y2="{top + panel_h - margin:.3f}" stroke="#3366cc" stroke-width="0.8"/>'
            )
        parts.append(
            f'<line x1="{margin:.3f}" y1="{sy(0.0):.3f}" x2="{width - margin:.3f}" '
            f'y2="{sy(0.0):.3f}" stroke="#bbb" stroke-width="0.8"/>'
        )
        for r in sorted(spectrum.roots, key=lambda r: (complex(r.k).real, complex(r.k).imag)):
            k = complex(r.k)
            if r.multiplicity >= 4:
                parts.append(
                    f'<rect x="{sx(k.real) - 4:.3f}" y="{sy(k.imag) - 4:.3f}" width="8" height="8" '
                    f'fill="#cc3333" class="root quadruple"/>'
                )
            else:
                color = "#222222" if r.parity.value == "odd" else "#22aa55"
                parts.append(
                    f'<circle cx="{sx(k.real):.3f}" cy="{sy(k.imag):.3f}" r="3.2" '
                    f'fill="{color}" class="root"/>'
                )
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def figure_csv(panels: list[tuple[str, rt.Spectrum, list[float]]]) -> str:
    lines = ["sigma,re_k,im_k,multiplicity,parity,certified"]
    for label, spectrum, _ in panels:
        for r in sorted(spectrum.roots, key=lambda r: (complex(r.k).real, complex(r.k).imag)):
            k = complex(r.k)
            lines.append(
                f"{label},{_fmt(k.real)},{_fmt(k.imag)},{r.multiplicity},{r.parity.value},"
                f"{'true' if r.certified else 'false'}"
            )
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_spectrum(cfg: RunConfig) -> int:
    medium, problem, rm = _setup(cfg)
    method = _pick_method(cfg, rm)
    if cfg.method == "both":
        if rm is None:
            print("method 'both' requires a rational contrast", file=sys.stderr)
            return 2
        rational = _solve(cfg, problem, rm, "rational")
        analytic = _solve(cfg, problem, rm, "analytic")
        notes = match_spectra(rational, analytic)
        for spec in (rational, analytic):
            for d in spec.defects:
                print(f"defect: {d}", file=sys.stderr)
        if notes or rational.defects or analytic.defects:
            for n in notes:
                print(f"mismatch: {n}", file=sys.stderr)
            return 1
        spectrum = rational
    else:
        spectrum = _solve(cfg, problem, rm, method)
        if spectrum.defects:
            for d in spectrum.defects:
                print(f"defect: {d}", file=sys.stderr)
            return 1
    if cfg.fmt == "json":
        _emit(spectrum_json(cfg, spectrum), cfg.out)
    elif cfg.fmt == "svg":
        guides = guide_lines(cfg.sigma, cfg.length, cfg.kmax)
        _emit(render_svg([(f"sigma={cfg.sigma_text}", spectrum, guides)], cfg.kmax), cfg.out)
    else:
        _emit(spectrum_csv(spectrum), cfg.out)
    return 0


def cmd_certify(cfg: RunConfig) -> int:
    medium, problem, rm = _setup(cfg)
    spectrum = _solve(cfg, problem, rm, _pick_method(cfg, rm))
    report, certified = ct.certify_spectrum(spectrum, problem, medium, rm)
    if cfg.fmt == "json":
        _emit(spectrum_json(cfg, certified, report), cfg.out)
    else:
        lines = ["kind,j_lo,j_hi,winding_odd,winding_even,spectrum_total,match,note"]
        for rec in report.records:
            lines.append(
                f"{rec.kind},{rec.j_lo},{rec.j_hi},{rec.winding_odd},{rec.winding_even},"
                f"{rec.spectrum_total},{'true' if rec.match else 'false'},{rec.note!r}"
            )
        _emit("\n".join(lines) + "\n", cfg.out)
    for d in report.defects:
        print(f"defect: {d}", file=sys.stderr)
    return 0 if report.matched else 1


def cmd_count(cfg: RunConfig, width: float) -> int:
    medium, problem, rm = _setup(cfg)
    spectrum = _solve(cfg, problem, rm, _pick_method(cfg, rm))
    report, certified = ct.certify_spectrum(spectrum, problem, medium, rm)
    if not report.matched:
        for d in report.defects:
            print(f"defect: {d}", file=sys.stderr)
        return 1
    rows = ["family,width,computed,predicted,deviation"]
    for real_only, name in ((False, "all"), (True, "real")):
        res = lm.counting(certified, width, real_only=real_only)
        rows.append(
            f"{name},{_fmt(res.window_width)},{res.computed},{_fmt(res.predicted)},"
            f"{_fmt(res.deviation)}"
        )
    _emit("\n".join(rows) + "\n", cfg.out)
    return 0


def cmd_figure(cfg: RunConfig, sigmas: list[str], out_base: str) -> int:
    panels = []
    for text in sigmas:
        sigma, exact = _parse_sigma(text)
        sub = dataclasses.replace(cfg, sigma_text=text, sigma=sigma, sigma_exact=exact)
        medium, problem, rm = _setup(sub)
        spectrum = _solve(sub, problem, rm, _pick_method(sub, rm))
        if spectrum.defects:
            for d in spectrum.defects:
                print(f"defect: {d}", file=sys.stderr)
            return 1
        panels.append((text, spectrum, guide_lines(sigma, cfg.length, cfg.kmax)))
    _emit(render_svg(panels, cfg.kmax), out_base + ".svg")
    _emit(figure_csv(panels), out_base + ".csv")
    return 0


def cmd_born(j_max: int, out: str | None) -> int:
    rows = ["j,sign,re_z,im_z,asymptotic_re,asymptotic_im,abs_difference"]
    for root in lm.born_roots(range(1, j_max + 1)):
        if complex(root.z).imag < 0:
            continue
        ref = lm.born_asymptotic(root.j)
        diff = abs(complex(root.z) - ref)
        z = complex(root.z)
        rows.append(
            f"{root.j},{root.sign},{_fmt(z.real)},{_fmt(z.imag)},{_fmt(ref.real)},"
            f"{_fmt(ref.imag)},{_fmt(diff)}"
        )
    _emit("\n".join(rows) + "\n", out)
    return 0


def cmd_limits(cfg: RunConfig, j_max: int) -> int:
    medium, problem, rm = _setup(cfg)
    spectrum = an.spectrum_analytic(problem, _z_window(cfg, problem), rm)
    if spectrum.defects:
        for d in spectrum.defects:
            print(f"defect: {d}", file=sys.stderr)
        return 1
    tan_roots = lm.strong_odd_roots(j_max)
    scale = 2.0 / ((medium.sigma - 1.0) * medium.length)
    odd_real = sorted(
        complex(r.k).real
        for r in spectrum.roots
        if r.is_real and r.parity.value == "odd"
    )
    rows = ["j,tan_solution_k,nearest_odd_k,relative_error"]
    for j, x in enumerate(tan_roots, start=1):
        target = x * scale
        if not odd_real:
            rows.append(f"{j},{_fmt(target)},nan,nan")
            continue
        nearest = min(odd_real, key=lambda v: abs(v - target))
        rows.append(
            f"{j},{_fmt(target)},{_fmt(nearest)},{_fmt(abs(nearest - target) / target)}"
        )
    _emit("\n".join(rows) + "\n", cfg.out)
    return 0


def cmd_homotopy(sigma_text: str, j: int, beta_end: float | None, steps: int, out: str | None) -> int:
    sigma, exact = _parse_sigma(sigma_text)
    medium = make_medium(sigma, 1.0)
    problem = normalize(medium)
    end = beta_end if beta_end is not None else problem.m
    path = an.trace_homotopy(j, problem.m, end, steps=steps)
    rows = ["beta,re_z,im_z"]
    for beta, z in path.samples:
        rows.append(f"{_fmt(beta)},{_fmt(z.real)},{_fmt(z.imag)}")
    rows.append(f"# terminated_by={path.terminated_by}")
    _emit("\n".join(rows) + "\n", out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itw1d",
        description="Interior transmission wavenumbers of a constant index of refraction "
        "on a 1D interval",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sigma=True):
        if sigma:
            p.add_argument("--sigma", required=True, help="index of refraction, real or 'p/q'")
        p.add_argument("--length", type=float, default=2.0)
        p.add_argument("--kmin", type=float, default=0.0)
        p.add_argument("--kmax", type=float, default=9.5)
        p.add_argument("--method", choices=["auto", "rational", "analytic", "both"], default="auto")
        p.add_argument("--format", dest="fmt", choices=["csv", "json", "svg"], default="csv")
        p.add_argument("--out", default=None)
        p.add_argument("--tol-residual", type=float, default=1e-9)
        p.add_argument("--tol-cluster", type=float, default=rs.DEFAULT_CLUSTER_RADIUS)

    common(sub.add_parser("spectrum", help="compute the spectrum in a wavenumber window"))
    common(sub.add_parser("certify", help="independently certify the computed spectrum"))
    p_count = sub.add_parser("count", help="counting functions against their predictions")
    common(p_count)
    p_count.add_argument("--width", type=float, required=True)
    p_fig = sub.add_parser("figure", help="scatter plot of two spectra with guide lines")
    p_fig.add_argument("--sigma", action="append", default=None,
                       help="repeatable; defaults to 2 and 3/2")
    p_fig.add_argument("--length", type=float, default=2.0)
    p_fig.add_argument("--kmin", type=float, default=0.0)
    p_fig.add_argument("--kmax", type=float, default=13.0)
    p_fig.add_argument("--method", choices=["auto", "rational", "analytic", "both"], default="auto")
    p_fig.add_argument("--out", default="figure", help="basename for .svg and .csv outputs")
    p_born = sub.add_parser("born", help="weak-scatterer limit roots and asymptotics")
    p_born.add_argument("--jmax", type=int, default=50)
    p_born.add_argument("--out", default=None)
    p_lim = sub.add_parser("limits", help="strong-scatterer comparison table")
    common(p_lim)
    p_lim.add_argument("--jmax", type=int, default=10)
    p_hom = sub.add_parser("homotopy", help="trace one deformation path")
    p_hom.add_argument("--sigma", required=True)
    p_hom.add_argument("--j", type=int, required=True)
    p_hom.add_argument("--beta-end", type=float, default=None)
    p_hom.add_argument("--steps", type=int, default=100)
    p_hom.add_argument("--out", default=None)
    return parser


def _config_from(args) -> RunConfig:
    sigma, exact = _parse_sigma(args.sigma)
    return RunConfig(
        sigma_text=args.sigma,
        sigma=sigma,
        sigma_exact=exact,
        length=args.length,
        kmin=args.kmin,
        kmax=args.kmax,
        method=args.method,
        fmt=getattr(args, "fmt", "csv"),
        out=args.out,
        tol_residual=getattr(args, "tol_residual", 1e-9),
        tol_cluster=getattr(args, "tol_cluster", rs.DEFAULT_CLUSTER_RADIUS),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "spectrum":
            return cmd_spectrum(_config_from(args))
        if args.command == "certify":
            return cmd_certify(_config_from(args))
        if args.command == "count":
            return cmd_count(_config_from(args), args.width)
        if args.command == "figure":
            sigmas = args.sigma if args.sigma else ["2", "3/2"]
            if len(sigmas) != 2:
                print("figure expects exactly two sigma values", file=sys.stderr)
                return 2
            cfg = RunConfig(
                sigma_text=sigmas[0],
                sigma=_parse_sigma(sigmas[0])[0],
                sigma_exact=_parse_sigma(sigmas[0])[1],
                length=args.length,
                kmin=args.kmin,
                kmax=args.kmax,
                method=args.method,
            )
            return cmd_figure(cfg, sigmas, args.out)
        if args.command == "born":
            return cmd_born(args.jmax, args.out)
        if args.command == "limits":
            cfg = _config_from(args)
            return cmd_limits(cfg, args.jmax)
        if args.command == "homotopy":
            return cmd_homotopy(args.sigma, args.j, args.beta_end, args.steps, args.out)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (rs.NonconvergenceError, lm.NonconvergenceError, lm.UncertifiedInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
