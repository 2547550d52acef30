"""Command-line front end.

Subcommands: solve, scan, profile, limit, einstein-check, table. Floats are
written with 17 significant digits so every value round-trips to the same
binary64 number. Exit status is 0 on success, 2 on a domain error and 3 on a
numerical failure; errors are reported as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import DomainError, Family, ManifoldParams, NumericalError, validate_params
from .geometry import einstein_residual, fiber_length, fiber_volume, integrate_curve
from .limits import EhModel, OrbModel, convergence_report, cylinder_report, make_model
from .profiles import solve

GAP = 1e-6
SCAN_HEADER = ("beta1", "beta2", "T_or_t", "ricci", "fiber_length", "fiber_volume")


def fmt(x) -> str:
    """17 significant digits; non-finite values become null."""
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dump_json(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dump_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, complex):
        return dump_json([obj.real, obj.imag])
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else fmt(v)
    if isinstance(v, complex):
        return f"{fmt(v.real)}{'+' if v.imag >= 0 else '-'}{fmt(abs(v.imag))}j"
    if isinstance(v, (list, tuple)):
        return ";".join(csv_cell(x) for x in v)
    return str(v)


def dump_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    lines += [",".join(csv_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n: int
    k: int
    family: Family
    betas: tuple
    target: Optional[str]
    s_window: Optional[tuple]
    samples: Optional[int]
    anchor: Optional[float]
    h: float
    fmt: str
    out: Optional[str]

    @property
    def params(self) -> ManifoldParams:
        return ManifoldParams(self.n, self.k)


def _parse_betas(args) -> tuple:
    if args.betas:
        try:
            return tuple(float(b) for b in args.betas.split(",") if b.strip())
        except ValueError:
            raise DomainError(f"cannot parse --betas {args.betas!r}") from None
    if args.beta is not None:
        return (args.beta,)
    if args.beta_start is not None and args.beta_end is not None:
        steps = args.steps if args.steps is not None else 10
        if steps < 1:
            raise DomainError("--steps must be >= 1")
        if steps == 1:
            return (args.beta_start,)
        return tuple(float(b) for b in np.linspace(args.beta_start, args.beta_end, steps))
    return ()


def make_config(args) -> RunConfig:
    family = Family.parse(args.family)
    params = ManifoldParams(args.n, args.k)
    betas = _parse_betas(args)
    for b in betas:
        validate_params(params.n, params.k, family, b)
    window = None
    if args.s_min is not None or args.s_max is not None:
        lo = -5.0 if args.s_min is None else args.s_min
        hi = 5.0 if args.s_max is None else args.s_max
        if not lo < hi:
            raise DomainError("need --s-min < --s-max")
        window = (lo, hi)
    if args.samples is not None and args.samples < 1:
        raise DomainError("--samples must be positive")
    default_fmt = "text" if args.command == "table" else "json"
    return RunConfig(args.command, params.n, params.k, family, betas, getattr(args, "target", None), window,
                     args.samples, args.anchor, args.h, args.format or default_fmt, args.out)


def _need_betas(cfg: RunConfig, what: str = "--beta") -> tuple:
    if not cfg.betas:
        raise DomainError(f"{cfg.subcommand} needs {what}")
    return cfg.betas


def _solve_record(params: ManifoldParams, family: Family, beta: float) -> dict:
    prof = solve(params, family, beta)
    return {
        "n": params.n,
        "k": params.k,
        "family": family.value,
        "beta1": prof.beta1,
        "beta2": prof.beta2,
        "T_or_t": prof.root,
        "ricci": prof.ricci,
        "extra_roots": [[r.real, r.imag] for r in prof.extra_roots],
        "fiber_length": fiber_length(prof),
        "fiber_volume": fiber_volume(prof),
    }


def cmd_solve(cfg: RunConfig) -> str:
    recs = [_solve_record(cfg.params, cfg.family, b) for b in _need_betas(cfg)]
    if cfg.fmt == "csv":
        header = list(recs[0])
        return dump_csv(header, [[r[h] for h in header] for r in recs])
    return dump_json(recs[0] if len(recs) == 1 else recs) + "\n"


def cmd_scan(cfg: RunConfig) -> str:
    betas = _need_betas(cfg, "--betas or --beta-start/--beta-end")
    recs = [_solve_record(cfg.params, cfg.family, b) for b in betas]
    if cfg.fmt == "json":
        return dump_json([{h: r[h] for h in SCAN_HEADER} for r in recs]) + "\n"
    return dump_csv(SCAN_HEADER, [[r[h] for h in SCAN_HEADER] for r in recs])


def cmd_profile(cfg: RunConfig) -> str:
    (beta, *_) = _need_betas(cfg)
    prof = solve(cfg.params, cfg.family, beta)
    lo, hi = cfg.s_window or (-5.0, 5.0)
    curve = integrate_curve(prof, cfg.anchor, lo, hi, cfg.samples or 201)
    if cfg.fmt == "csv":
        return dump_csv(("s", "tau", "phi"), list(zip(curve.s_grid, curve.tau_values, curve.phi_values)))
    return dump_json({
        "n": cfg.n,
        "k": cfg.k,
        "family": cfg.family.value,
        "beta": beta,
        "anchor_tau": curve.anchor_tau,
        "s": list(curve.s_grid),
        "tau": list(curve.tau_values),
        "phi": list(curve.phi_values),
    }) + "\n"


def cmd_limit(cfg: RunConfig) -> str:
    if not cfg.target:
        raise DomainError("limit needs --target")
    target = make_model(cfg.target, cfg.params)
    betas = _need_betas(cfg, "--betas")
    if target.name == "cylinder":
        rep = cylinder_report(cfg.params, cfg.family, betas, cfg.s_window or (-10.0, 10.0), cfg.samples or 201)
    else:
        rep = convergence_report(cfg.params, cfg.family, target, betas, cfg.s_window or (-5.0, 5.0),
                                 cfg.samples or 201)
    d = {"n": cfg.n, "k": cfg.k, **rep.as_dict()}
    if cfg.fmt == "csv":
        rows = zip(rep.betas, rep.sup_tau_dev, rep.sup_phi_dev, rep.gauge_matched)
        return dump_csv(("beta", "sup_tau_dev", "sup_phi_dev", "gauge_matched"), list(rows))
    return dump_json(d) + "\n"


def chart_points(n: int, count: int, seed: int = 0):
    """Deterministic interior chart points (z, w) with |z| ~ 0.5 and |w| in [e^-1, e]."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        z = 0.5 * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))
        w = math.exp(rng.uniform(-1.0, 1.0)) * complex(math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a))
        pts.append((z, w))
    return pts


def cmd_einstein(cfg: RunConfig) -> str:
    params = cfg.params
    if cfg.target in ("eh", "orb"):
        curve = EhModel(params.n, params.k) if cfg.target == "eh" else OrbModel(params.n, params.k)
        ricci, beta, family = curve.ricci, None, curve.family
    elif cfg.target:
        raise DomainError("einstein-check accepts --target eh or orb only")
    else:
        (beta, *_) = _need_betas(cfg)
        prof = solve(params, cfg.family, beta)
        curve = integrate_curve(prof, cfg.anchor)
        ricci, family = prof.ricci, cfg.family
    if not 1e-4 <= cfg.h <= 1e-2:
        raise DomainError("--h must lie in [1e-4, 1e-2]")
    pts = chart_points(params.n, cfg.samples or 20)
    res = [einstein_residual(params, curve, ricci, z, w, cfg.h) for z, w in pts]
    if cfg.fmt == "csv":
        return dump_csv(("point", "residual"), list(enumerate(res)))
    return dump_json({
        "n": cfg.n,
        "k": cfg.k,
        "family": family.value,
        "target": cfg.target or "profile",
        "beta": beta,
        "ricci": ricci,
        "h": cfg.h,
        "points": len(res),
        "max_residual": max(res),
    }) + "\n"


# ---- table ---------------------------------------------------------------

def _length_flag(params, family, beta_of_gap) -> str:
    l5 = fiber_length(solve(params, family, beta_of_gap(1e-5)))
    l6 = fiber_length(solve(params, family, beta_of_gap(1e-6)))
    return "diverges" if l6 > 1.5 * l5 else "converges"


def table_rows(params: ManifoldParams) -> list[dict]:
    n, k = params.n, params.k
    eta_top, xi_top = n / k, 1.0 / k
    weights = ",".join(["1"] * n + [str(k)])
    fs_base = "omega_FS" if k == 1 else f"{k} omega_FS"
    if (n, k) == (2, 2):
        eh_label = "Eguchi-Hanson (eps=1)"
    elif (n, k) == (2, 1):
        eh_label = "Ricci-flat metric on (-H_P1, Z_1)"
    else:
        eh_label = f"omega_eh,{n},{k} on -{k}H_P{n - 1}"
    orb_label = f"(P^{n}, omega_FS)" if k == 1 else f"(P^{n}({weights}), omega_orb,{n},{k})"
    cyl_label = f"(P^{n - 1} x C*, ({k}/{n})({n} omega_FS + omega_Cyl))"
    specs = [
        ("beta1->0", Family.ETA, False, lambda g: g, 0.0, f"(P^{n - 1}, {fs_base})"),
        ("beta1->0 rescaled", Family.ETA, True, lambda g: g, 0.0, cyl_label),
        (f"beta1->{n}/{k}", Family.ETA, False, lambda g: eta_top - g, xi_top, eh_label),
        (f"beta2->1/{k}", Family.XI, False, lambda g: xi_top - g, eta_top, orb_label),
        (f"beta2->1/{k} rescaled", Family.XI, True, lambda g: xi_top - g, eta_top, eh_label),
        ("beta2->0 rescaled", Family.XI, True, lambda g: g, 0.0, cyl_label),
    ]
    rows = []
    if (n, k) == (2, 1):
        p = solve(params, Family.ETA, 1.0)
        rows.append({
            "regime": "beta1=1", "family": "eta", "rescaled": False, "beta": 1.0,
            "other_beta": p.beta2, "other_beta_limit": math.sqrt(3.0) - 1.0,
            "root": p.root, "root_gap": p.length, "fiber_length": fiber_length(p),
            "length_flag": "finite", "limit": "KEE metric on (F_1, Z_-1)",
        })
    for label, fam, rescaled, beta_of_gap, other_limit, model in specs:
        beta = beta_of_gap(GAP)
        p = solve(params, fam, beta)
        rows.append({
            "regime": label,
            "family": fam.value,
            "rescaled": rescaled,
            "beta": beta,
            "other_beta": p.beta2 if fam is Family.ETA else p.beta1,
            "other_beta_limit": other_limit,
            "root": p.root,
            "root_gap": p.length,
            "fiber_length": fiber_length(p),
            "length_flag": _length_flag(params, fam, beta_of_gap),
            "limit": model,
        })
    return rows


TABLE_COLUMNS = ("regime", "family", "rescaled", "beta", "other_beta", "other_beta_limit", "root", "root_gap",
                 "fiber_length", "length_flag", "limit")


def _render_text(rows: list[dict], color: bool) -> str:
    cells = [list(TABLE_COLUMNS)] + [[csv_cell(r[c]) for c in TABLE_COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(TABLE_COLUMNS))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    if color:
        lines[0] = f"\x1b[1m{lines[0]}\x1b[0m"
    return "\n".join(lines) + "\n"


def cmd_table(cfg: RunConfig, color: bool = False) -> str:
    rows = table_rows(cfg.params)
    if cfg.fmt == "json":
        return dump_json({"n": cfg.n, "k": cfg.k, "gap": GAP, "rows": rows}) + "\n"
    if cfg.fmt == "csv":
        return dump_csv(TABLE_COLUMNS, [[r[c] for c in TABLE_COLUMNS] for r in rows])
    return _render_text(rows, color)


# ---- entry point ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="calabi-kee", description="Kähler-Einstein edge profiles on F_{n,k}.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, target=False):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--family", default="eta", help="eta or xi")
        p.add_argument("--beta", type=float)
        p.add_argument("--betas", help="comma separated list")
        p.add_argument("--beta-start", type=float)
        p.add_argument("--beta-end", type=float)
        p.add_argument("--steps", type=int)
        if target:
            p.add_argument("--target", help="eh, orb, cylinder or fs")
        p.add_argument("--s-min", type=float)
        p.add_argument("--s-max", type=float)
        p.add_argument("--samples", type=int)
        p.add_argument("--anchor", type=float)
        p.add_argument("--h", type=float, default=1e-3)
        p.add_argument("--format", choices=("json", "csv", "text"))
        p.add_argument("--out")

    common(sub.add_parser("solve", help="solve one profile"))
    common(sub.add_parser("scan", help="sweep the free angle"))
    common(sub.add_parser("profile", help="sample tau(s), phi(s)"))
    common(sub.add_parser("limit", help="convergence toward a limit model"), target=True)
    common(sub.add_parser("einstein-check", help="finite-difference Ricci residual"), target=True)
    common(sub.add_parser("table", help="regime table at gap 1e-6"))
    return ap


COMMANDS = {
    "solve": cmd_solve,
    "scan": cmd_scan,
    "profile": cmd_profile,
    "limit": cmd_limit,
    "einstein-check": cmd_einstein,
}


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        if cfg.subcommand == "table":
            tty = cfg.out is None and sys.stdout.isatty()
            text = cmd_table(cfg, color=tty and "NO_COLOR" not in os.environ)
        else:
            text = COMMANDS[cfg.subcommand](cfg)
    except DomainError as exc:
        return _fail("DomainError", str(exc), 2)
    except (NumericalError, ArithmeticError) as exc:
        return _fail("NumericalError", str(exc), 3)
    if cfg.out:
        with io.open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
