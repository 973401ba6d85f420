"""Command-line front end: ``exthl trajectory | kernel | boost | verify``.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration
(including ``|beta| >= 1``), 3 integration failure, 4 non-time-like kernel
separation. The kernel table is evaluated on a worker pool whose size is
taken from ``EXTHL_NUM_THREADS`` (default: available CPUs).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import minkowski as mk
from .config import ScenarioConfig, canonical_toml, check_output_dir, load_config
from .dynamics.functionals import (
    constraint_residuals,
    extended_hamiltonian_em,
    kinetic_momentum,
    point_from_momentum,
    point_from_velocity,
)
from .dynamics.integrate import integrate_conventional, integrate_extended, reparameterize_to_t
from .dynamics.io import trajectory_to_json, write_conventional_csv, write_trajectory_csv
from .dynamics.state import ExtendedPhasePoint
from .errors import ConfigError, DomainError, IntegrationError, UnsupportedSeparationError
from .fields import FieldConfig, eval_potentials
from .propagator.io import write_kernel_csv
from .propagator.kernels import SpacetimeSeparation, kernel_free
from .verify import DEFAULT_SEED, SUITES, reports_to_json, run_suites

__all__ = ["main", "build_parser", "num_threads", "EXIT_OK", "EXIT_VERIFY", "EXIT_CONFIG",
           "EXIT_INTEGRATION", "EXIT_SPACELIKE"]

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_SPACELIKE = 4
THREADS_ENV = "EXTHL_NUM_THREADS"


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def num_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise _Exit(EXIT_CONFIG, f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _dump_json(doc: dict, path: Path) -> Path:
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return path


def _out_dir(cfg: ScenarioConfig | None, override: str | None) -> Path:
    target = override if override is not None else (cfg.output.dir if cfg is not None else ".")
    try:
        return check_output_dir(target)
    except ConfigError as exc:
        raise _Exit(EXIT_CONFIG, str(exc)) from exc


def _initial_point(cfg: ScenarioConfig, field: FieldConfig) -> ExtendedPhasePoint:
    params = cfg.params()
    ini = cfg.initial
    try:
        if ini.p is not None:
            return point_from_momentum(params, ini.q, ini.p, ini.t, None, field, ini.s)
        return point_from_velocity(params, ini.q, np.asarray(ini.v) * params.c, ini.t, field, ini.s)
    except DomainError as exc:
        raise _Exit(EXIT_CONFIG, f"initial: {exc}") from exc


# -- commands -----------------------------------------------------------------


def cmd_trajectory(cfg: ScenarioConfig, out: Path, seed: int) -> dict:
    """Extended, reparameterized and conventional trajectories plus a JSON summary.

    ``initial.v`` is given in units of ``c``.
    """
    params = cfg.params()
    field = cfg.field.to_field()
    point = _initial_point(cfg, field)
    spec = cfg.integrator.spec()
    span = (point.s, cfg.integrator.s_end)
    if not span[1] > span[0]:
        raise _Exit(EXIT_CONFIG, "integrator.s_end: must exceed initial.s")
    try:
        rec = integrate_extended(params, point, field, span, spec, dense=cfg.integrator.dense)
        conv = integrate_conventional(params, point.q, point.p, (rec.t[0], rec.t[-1]), field, spec)
        rep = reparameterize_to_t(rec, t_grid=conv.t)
    except IntegrationError as exc:
        raise _Exit(EXIT_INTEGRATION, f"integration failed: {exc}") from exc
    except DomainError as exc:
        raise _Exit(EXIT_CONFIG, f"initial: {exc}") from exc
    pre = cfg.output.prefix
    files = {
        "extended": write_trajectory_csv(rec, out / f"{pre}trajectory_extended.csv"),
        "reparameterized": write_conventional_csv(rep, out / f"{pre}trajectory_reparameterized.csv"),
        "conventional": write_conventional_csv(conv, out / f"{pre}trajectory_conventional.csv"),
    }
    q_scale = max(float(np.max(np.abs(conv.q))), params.hbar / (params.m * params.c))
    summary = json.loads(trajectory_to_json(rec, include_samples=False))
    summary.update({
        "seed": seed,
        "equivalence_q_rel": float(np.max(np.abs(rep.q - conv.q))) / q_scale,
        "files": {k: v.name for k, v in files.items()},
    })
    _dump_json(summary, out / f"{pre}trajectory.json")
    return summary


def _separations(cfg: ScenarioConfig) -> list[SpacetimeSeparation]:
    k = cfg.kernel
    c = cfg.units.c
    if k.tau is not None:
        # a proper time is only meaningful for tau > 0; 0 sits on the light cone
        seps = [(t, SpacetimeSeparation((0.0, 0.0, 0.0), t, c)) for t in k.tau]
        bad = [t for t, _ in seps if not t > 0]
        if bad:
            raise _Exit(EXIT_SPACELIKE, f"kernel.tau: {bad} are not time-like proper times (need tau > 0)")
        return [s for _, s in seps]
    out = []
    for row in k.separations:
        sep = SpacetimeSeparation(row[1:], row[0], c)
        if sep.classification != "timelike":
            raise _Exit(EXIT_SPACELIKE, f"kernel.separations: {row} is {sep.classification} (tau^2 = {sep.tau2:.17g})")
        out.append(sep)
    return out


def cmd_kernel(cfg: ScenarioConfig, out: Path, seed: int) -> dict:
    if cfg.kernel is None:
        raise _Exit(EXIT_CONFIG, "kernel: section required for the kernel command")
    params = cfg.params()
    seps = _separations(cfg)
    spec = cfg.quadrature.spec()
    N = cfg.kernel.N
    try:
        with ThreadPoolExecutor(max_workers=num_threads()) as pool:
            rows = list(pool.map(lambda s: kernel_free(params, s, N, spec), seps))
    except UnsupportedSeparationError as exc:
        raise _Exit(EXIT_SPACELIKE, str(exc)) from exc
    pre = cfg.output.prefix
    path = write_kernel_csv(rows, out / f"{pre}kernel.csv")
    summary = {
        "seed": seed,
        "N": N,
        "n_rows": len(rows),
        "max_rel_discrepancy": max(r.discrepancy for r in rows),
        "params": params.to_dict(),
        "quadrature": spec.to_dict(),
        "file": path.name,
    }
    _dump_json(summary, out / f"{pre}kernel.json")
    return summary


def _h1_kinetic(params, k, ek) -> float:
    """``H1`` written in terms of kinetic momentum and energy (frame independent)."""
    return extended_hamiltonian_em(params, ExtendedPhasePoint(0.0, 0.0, ek, (0.0, 0.0, 0.0), k))


def cmd_boost(cfg: ScenarioConfig, out: Path, seed: int) -> dict:
    if cfg.boost is None:
        raise _Exit(EXIT_CONFIG, "boost: section required for the boost command")
    try:
        b = mk.BoostParams(cfg.boost.beta)
    except DomainError as exc:
        raise _Exit(EXIT_CONFIG, f"boost.beta: {exc}") from exc
    params = cfg.params()
    c, z = params.c, params.zeta
    field = cfg.field.to_field()
    point = _initial_point(cfg, field)
    pot = eval_potentials(field, point.q, point.t)
    k, ek = kinetic_momentum(params, point, field)
    Q, T = mk.boost_coordinates(point.q, point.t, b, c)
    Pk, Ek = mk.boost_momentum_energy(k, ek, b, c, inverse=True)
    A2, phi2 = mk.boost_potentials(pot.A, pot.phi, b, inverse=True)
    P = Pk + (z / c) * A2
    E = Ek + z * phi2
    h1_before = _h1_kinetic(params, k, ek)
    h1_after = _h1_kinetic(params, Pk, Ek)
    canon = mk.verify_extended_canonical(mk.boost_canonical_map(b, c), point, c=c)
    scale = params.m * c * c
    report = {
        "seed": seed,
        "beta": b.beta.tolist(),
        "gamma": b.gamma,
        "before": {"q": point.q.tolist(), "t": point.t, "p": point.p.tolist(), "e": point.e,
                   "p_kinetic": k.tolist(), "e_kinetic": ek, "A": pot.A.tolist(), "phi": pot.phi},
        "after": {"q": Q.tolist(), "t": T, "p": P.tolist(), "e": E,
                  "p_kinetic": Pk.tolist(), "e_kinetic": Ek, "A": A2.tolist(), "phi": phi2},
        "h1_before": h1_before,
        "h1_after": h1_after,
        "h1_invariance": "PASS" if abs(h1_after - h1_before) / scale < 1e-12 else "FAIL",
        "mass_shell_residual": constraint_residuals(params, point, field).energy_constraint_residual,
        "canonical_max_violation": canon.max_violation,
        "canonical": "PASS" if canon.passed(1e-6) else "FAIL",
    }
    _dump_json(report, out / f"{cfg.output.prefix}boost.json")
    return report


def cmd_verify(suite: str, seed: int, out: Path | None) -> tuple[int, str]:
    reports = run_suites(suite, seed)
    text = "\n".join(r.to_text() for r in reports)
    doc = reports_to_json(reports)
    if out is not None:
        (out / "verify_report.json").write_text(doc + "\n")
    failed = [f for r in reports for f in r.failures]
    return (EXIT_VERIFY if failed else EXIT_OK), text + ("\nFAILED: " + ", ".join(failed) if failed else "\nall invariants passed")


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exthl", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("trajectory", "integrate a scenario and write CSV/JSON artifacts"),
        ("kernel", "tabulate closed-form and quadrature kernel values over tau"),
        ("boost", "apply a Lorentz boost to the initial point and report invariants"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="recorded in the outputs")
    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("--suite", default="all", choices=(*SUITES, "all"))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None, help="directory for verify_report.json")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "verify":
            out = _out_dir(None, args.out) if args.out is not None else None
            code, text = cmd_verify(args.suite, args.seed, out)
            print(text, file=sys.stdout if code == EXIT_OK else sys.stderr)
            return code
        try:
            cfg = load_config(args.config)
        except ConfigError as exc:
            raise _Exit(EXIT_CONFIG, f"invalid configuration {args.config}:\n{exc}") from exc
        out = _out_dir(cfg, args.out)
        (out / f"{cfg.output.prefix}config.toml").write_text(canonical_toml(cfg))
        cmd = {"trajectory": cmd_trajectory, "kernel": cmd_kernel, "boost": cmd_boost}[args.command]
        result = cmd(cfg, out, args.seed)
        print(json.dumps(result, sort_keys=True, indent=1))
        return EXIT_OK
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
