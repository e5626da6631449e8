"""Command-line entry point.

Each figure command writes one plot-ready dataset (CSV or JSON); verify runs
the exact algebra checks plus numeric cross-checks and emits a JSON report;
tables emits the ladder denominators.  Reruns with the same configuration are
byte-identical: fixed numeric formatting, no timestamps in the data body.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import coherent, hilbert, susy
from . import _kernels as kernels

FIGURES = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11")

# harmonic-oscillator comparison panel in the beamsplitter dataset
OSCILLATOR_REFERENCE_Z = 3.5


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("grid range must be finite")
        if self.count < 2:
            raise ValueError("grid count must be at least 2")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected a:b:n, got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunConfig:
    command: str
    z_abs: Optional[float] = None
    z_arg_deg: float = 0.0
    grid_x: Optional[GridSpec] = None
    grid_t: Optional[GridSpec] = None
    grid_p: Optional[GridSpec] = None
    trunc_K: Optional[int] = None
    trunc_Kw: Optional[int] = None
    nmax: int = 20
    out: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.z_abs is not None and not (math.isfinite(self.z_abs)
                                           and self.z_abs >= 0):
            raise ValueError("--z-abs must be finite and nonnegative")
        for name in ("trunc_K", "trunc_Kw"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.nmax < 1:
            raise ValueError("nmax must be at least 1")

    def z(self, default_abs: float) -> complex:
        r = default_abs if self.z_abs is None else self.z_abs
        theta = math.radians(self.z_arg_deg)
        return complex(r * math.cos(theta), r * math.sin(theta))

    def output_path(self) -> str:
        if self.out is not None:
            return self.out
        suffix = "json" if self.command == "verify" else self.fmt
        return f"{self.command}.{suffix}"


# -- dataset formatting -------------------------------------------------------

def _fmt_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".16e")


def _json_cell(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def write_dataset(path: str, command: str, columns: Sequence[str],
                  rows: Sequence[Sequence], fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt_cell(v) for v in row) for row in rows)
        body = "\n".join(lines) + "\n"
    else:
        payload = {
            "command": command,
            "columns": list(columns),
            "rows": [[_json_cell(v) for v in row] for row in rows],
        }
        body = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(body)
    return path


# -- sweep grids ---------------------------------------------------------------

def _abs_sweep(stop: float, count: int) -> list[float]:
    """|z| grid: the exact vacuum point plus a log-spaced climb."""
    return [0.0] + [float(v) for v in np.logspace(-2.0, math.log10(stop),
                                                  count - 1)]


def _state_for(config: RunConfig, z) -> coherent.CoherentState:
    return coherent.make_coherent(z, K=config.trunc_K)


# -- figure builders -----------------------------------------------------------

def _fig3(config: RunConfig):
    rows = [(r, float(coherent.energy_expectation(r)))
            for r in _abs_sweep(1e5, 50)]
    return ("abs_z", "energy"), rows


def _fig4(config: RunConfig):
    z = config.z(1e5)
    state = _state_for(config, z)
    # support of the default z=1e5 packet reaches the nu=95 turning point
    xs = (config.grid_x or GridSpec(0.0, 14.0, 281)).points()
    # one full revival period of the tower spacing
    ts = (config.grid_t or GridSpec(0.0, math.pi / 6.0, 13)).points()
    herm, resid, den = kernels.basis_arrays(state.K)
    V = kernels.eval_states(herm, resid, den, xs)
    alphas = np.array([state.alpha_complex(k) for k in range(state.K)])
    ks = np.arange(state.K)
    rows = []
    for t in ts:
        amps = (alphas * np.exp(-12j * ks * t)) @ V
        rho = np.abs(amps) ** 2
        rho[xs <= 0.0] = 0.0
        rows.extend((float(t), float(x), float(d)) for x, d in zip(xs, rho))
    return ("t", "x", "density"), rows


def _fig5(config: RunConfig):
    rows = [(r, float(coherent.distinguishability(r)))
            for r in [float(v) for v in np.linspace(0.0, 1e5, 201)]]
    return ("abs_z", "distinguishability"), rows


def _fig6(config: RunConfig):
    z = config.z(1e5)
    xs = (config.grid_x or GridSpec(0.0, 14.0, 281)).points()
    plus = coherent.make_cat(z, +1)
    minus = coherent.make_cat(z, -1)
    rows = [(float(x),
             coherent.cat_density(float(x), 0.0, z, +1, cat=plus),
             coherent.cat_density(float(x), 0.0, z, -1, cat=minus))
            for x in xs]
    return ("x", "density_even", "density_odd"), rows


def _fig7(config: RunConfig):
    z = config.z(500.0)
    state = _state_for(config, z)
    xs = (config.grid_x or GridSpec(0.0, 6.0, 121)).points()
    ps = (config.grid_p or GridSpec(-6.0, 6.0, 121)).points()
    if config.trunc_Kw is not None:
        K_w = config.trunc_Kw
    else:
        weights = state.weights()
        peak = max(weights)
        K_w = max(k + 1 for k, w in enumerate(weights) if w > 1e-18 * peak)
    B, R, den = kernels.packet_arrays(state, 0.0, K=K_w)
    nodes, weights_gl = kernels.gauss_legendre_base(64)
    W = kernels.wigner_grid(B, R, den, xs, ps, nodes, weights_gl)
    rows = []
    for i, x in enumerate(xs):
        rows.extend((float(x), float(p), float(W[i, j]))
                    for j, p in enumerate(ps))
    return ("x", "p", "wigner"), rows


def _fig8(config: RunConfig):
    z = config.z(1e5)
    pmf = coherent.beamsplitter_pmf(z, N_max=config.nmax)
    mean_half = OSCILLATOR_REFERENCE_Z ** 2 / 2.0
    rows = []
    for n1 in range(config.nmax + 1):
        for n2 in range(config.nmax + 1):
            # comparison panel: ordinary oscillator input factorizes into
            # two Poisson arms of mean |z_ref|^2 / 2
            ref = math.exp(-OSCILLATOR_REFERENCE_Z ** 2
                           + (n1 + n2) * math.log(mean_half)
                           - math.lgamma(n1 + 1) - math.lgamma(n2 + 1))
            rows.append((n1, n2, float(pmf.table[n1][n2]), ref))
    return ("n1", "n2", "probability", "oscillator_reference"), rows


def _fig9(config: RunConfig):
    rows = []
    for r in _abs_sweep(1e5, 50):
        rows.append((r, float(coherent.linear_entropy(r))))
    return ("abs_z", "linear_entropy"), rows


def _fig10(config: RunConfig):
    tables = hilbert.moment_tables(config.trunc_K or 7)
    rows = []
    for r in [0.0] + [float(v) for v in np.logspace(-2.0, math.log10(2e4), 39)]:
        sx, sp = coherent.uncertainties(r, K=tables.K, tables=tables)
        rows.append((r, float(sx), float(sp), float(sx * sp)))
    return ("abs_z", "sigma_x", "sigma_p", "product"), rows


def _fig11(config: RunConfig):
    rows = []
    for r in _abs_sweep(1e5, 50):
        rows.append((r, float(coherent.mandel_q(r))))
    return ("abs_z", "mandel_q"), rows


_FIGURE_BUILDERS = {
    "fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "fig6": _fig6,
    "fig7": _fig7, "fig8": _fig8, "fig9": _fig9, "fig10": _fig10,
    "fig11": _fig11,
}


def cmd_figure(name: str, config: RunConfig) -> str:
    if name not in _FIGURE_BUILDERS:
        raise ValueError(f"unknown figure {name!r}")
    columns, rows = _FIGURE_BUILDERS[name](config)
    return write_dataset(config.output_path(), name, columns, rows, config.fmt)


def cmd_tables(config: RunConfig) -> str:
    rows = []
    exact = 1
    rows.append((0, 1, 1.0))
    for k in range(1, 7):
        radicand = hilbert.ladder_radicand(k)
        assert radicand.denominator == 1
        exact *= radicand.numerator
        rows.append((k, exact, float(exact)))
    columns = ("k", "D_k_squared_exact", "D_k_squared_float")
    return write_dataset(config.output_path(), "tables", columns, rows,
                         config.fmt)


# -- verification --------------------------------------------------------------

def _summarize(suite: str, entries: list[dict], checks: list[dict],
               flagged: list[dict]):
    bad = [e for e in entries if e["status"] not in ("ok", "flagged")]
    soft = [e for e in entries if e["status"] == "flagged"]
    status = "fail" if bad else "pass"
    detail = f"{len(entries)} checks, {len(soft)} flagged"
    if bad:
        ids = ["{}[{}, nu={}]".format(e["check"], e.get("operator"),
                                      e.get("nu")) for e in bad]
        detail += "; failing: " + "; ".join(ids)
    checks.append({"name": suite, "status": status, "detail": detail})
    flagged.extend(soft)


def _numeric_checks(checks: list[dict]):
    residual = float(hilbert.orthonormality_residual(6))
    checks.append({
        "name": "orthonormality",
        "status": "pass" if residual < 1e-10 else "fail",
        "detail": f"max off-diagonal overlap {residual:.3e} for the first "
                  "six tower states",
    })
    worst = max(float(hilbert.energy_residual(k)) for k in (0, 1))
    checks.append({
        "name": "energy_quadrature",
        "status": "pass" if worst < 1e-8 else "fail",
        "detail": f"kinetic-plus-potential residual {worst:.3e}",
    })
    worst_rel = 0.0
    for i in (1, 2, 3):
        closed = hilbert.ladder_coefficient_closed(i)
        quad = hilbert.ladder_coefficient_quadrature(i)
        worst_rel = max(worst_rel, abs(float((quad - closed) / closed)))
    checks.append({
        "name": "ladder_closed_vs_quadrature",
        "status": "pass" if worst_rel < 1e-8 else "fail",
        "detail": f"max relative gap {worst_rel:.3e} over steps 1-3",
    })


def cmd_verify(config: RunConfig) -> tuple[int, dict]:
    checks: list[dict] = []
    flagged: list[dict] = []

    potential = susy.verify_potential()
    checks.append({"name": "potential_closed_form",
                   "status": "pass" if potential["status"] == "ok" else "fail",
                   "detail": potential["residual_description"]})

    try:
        susy.build_adding_chain((2, 2))
    except ValueError as exc:
        degenerate = "degenerate" in str(exc)
        detail = str(exc)
    else:
        degenerate, detail = False, "no error raised"
    checks.append({"name": "degenerate_seed_rejected",
                   "status": "pass" if degenerate else "fail",
                   "detail": detail})

    regularity = susy.regularity_report()
    checks.append({"name": "denominator_regularity",
                   "status": "pass" if regularity["status"] == "ok" else "fail",
                   "detail": regularity["residual_description"]})

    _summarize("eigenstates", susy.verify_eigenstates(), checks, flagged)
    _summarize("zero_modes", susy.verify_zero_modes(), checks, flagged)
    heisenberg = []
    for name in ("C", "Ctilde", "L", "Lbar", "Ltilde", "Lbartilde"):
        heisenberg.extend(susy.verify_heisenberg_algebra(name))
    _summarize("heisenberg_algebra", heisenberg, checks, flagged)
    _summarize("product_polynomials", susy.audit_product_polynomials(),
               checks, flagged)
    _summarize("intertwining", susy.verify_intertwining(), checks, flagged)

    _numeric_checks(checks)

    passed = all(c["status"] == "pass" for c in checks)
    report = {
        "passed": passed,
        "checks": checks,
        "flagged_findings": flagged,
    }
    return (0 if passed else 1), report


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susyosc",
        description="Datasets and verification for the four-step rational "
                    "extension of the truncated oscillator.",
        epilog="SUSYOSC_PRECISION sets the working precision in bits for the "
               "high-precision layer (default 192).")
    parser.add_argument("--command", required=True,
                        choices=("verify", "tables") + FIGURES)
    parser.add_argument("--z-abs", type=float, dest="z_abs")
    parser.add_argument("--z-arg-deg", type=float, default=0.0,
                        dest="z_arg_deg")
    parser.add_argument("--grid-x", type=GridSpec.parse, dest="grid_x",
                        metavar="A:B:N")
    parser.add_argument("--grid-t", type=GridSpec.parse, dest="grid_t",
                        metavar="A:B:N")
    parser.add_argument("--grid-p", type=GridSpec.parse, dest="grid_p",
                        metavar="A:B:N")
    parser.add_argument("--trunc-K", type=int, dest="trunc_K")
    parser.add_argument("--trunc-Kw", type=int, dest="trunc_Kw")
    parser.add_argument("--nmax", type=int, default=20)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        dest="fmt")
    return parser


def _normalize_argv(argv: Sequence[str]) -> list[str]:
    """Join grid flags with leading-dash range values (--grid-p -6:6:61)."""
    grid_flags = ("--grid-x", "--grid-t", "--grid-p")
    out: list[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (token in grid_flags and i + 1 < len(argv)
                and argv[i + 1].startswith("-") and ":" in argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_normalize_argv(argv))
    try:
        config = RunConfig(command=args.command, z_abs=args.z_abs,
                           z_arg_deg=args.z_arg_deg, grid_x=args.grid_x,
                           grid_t=args.grid_t, grid_p=args.grid_p,
                           trunc_K=args.trunc_K, trunc_Kw=args.trunc_Kw,
                           nmax=args.nmax, out=args.out, fmt=args.fmt)
    except ValueError as exc:
        print(f"susyosc: {exc}", file=sys.stderr)
        return 2

    if config.command == "verify":
        code, report = cmd_verify(config)
        text = json.dumps(report, indent=1, sort_keys=True)
        if config.out is not None:
            with open(config.out, "w", newline="\n") as fh:
                fh.write(text + "\n")
        print(text)
        return code

    try:
        if config.command == "tables":
            path = cmd_tables(config)
        else:
            path = cmd_figure(config.command, config)
    except ValueError as exc:
        print(f"susyosc: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
