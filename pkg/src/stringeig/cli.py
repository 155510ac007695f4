"""Command-line interface.

Three subcommands tie density JSON files to the solver and the
verification harness:

* ``solve``      -- spectrum table (n, lambda, interior zeros) of one density
* ``verify``     -- claim report rows (ratio, gap, keller, identity,
                    crossings, homotopy, interlacing, or all)
* ``transform``  -- Legendre substitution of a (p, rho) pair: sigma, a
                    sampled t(x) table, and the Sturm-Liouville spectrum via
                    the transformed string problem next to the flux-form
                    finite-difference reference

Exit codes: 0 success; 1 a verification row inside its hypothesis failed;
2 unusable input (missing file, bad JSON, invalid density, bad flag
values); 3 solver failure.

Output is CSV by default (JSON via --format json), prefixed with a ``#``
header line recording the effective defaults, and deterministic for a
fixed configuration apart from the runtime_ms column.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import prufer, verify
from .density import Density, DensityError, from_json
from .oracle import OracleError, fd_sl_reference
from .prufer import SolverError, eigenfunction, set_default_steps
from .transforms import legendre_map
from .verify import CSV_HEADER, report_csv_row, report_json_obj, run_claims

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_SOLVER = 3

DEFAULTS = {
    "grid": 4096,
    "rel_tol": 1e-10,
    "meshes": (1000, 2000),
    "tau_steps": 21,
    "seed": 42,
}


class InputError(Exception):
    """Unusable configuration or density input (exit 2)."""


@dataclass
class RunConfig:
    command: str
    densities: list[str]
    claim: str = "all"
    n_max: int = 8
    rel_tol: float = DEFAULTS["rel_tol"]
    grid: int = DEFAULTS["grid"]
    meshes: tuple = DEFAULTS["meshes"]
    tau_steps: int = DEFAULTS["tau_steps"]
    seed: int = DEFAULTS["seed"]
    fmt: str = "csv"
    out: str | None = None
    loaded: list[Density] = field(default_factory=list)

    def validate(self):
        if self.n_max < 1:
            raise InputError(f"--nmax must be >= 1, got {self.n_max}")
        if not (1e-14 <= self.rel_tol <= 1e-2):
            raise InputError(f"--rel-tol must lie in [1e-14, 1e-2], got {self.rel_tol}")
        if self.grid < 64:
            raise InputError(f"--grid must be >= 64, got {self.grid}")
        if self.tau_steps < 2:
            raise InputError(f"--tau-steps must be >= 2, got {self.tau_steps}")
        if self.meshes[1] != 2 * self.meshes[0]:
            raise InputError(f"--mesh must be N,2N, got {self.meshes}")
        if self.fmt not in ("csv", "json"):
            raise InputError(f"--format must be csv or json, got {self.fmt}")


def _load_density(path: str) -> Density:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read density file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"density file {path} is not valid JSON: {exc}") from exc
    try:
        return from_json(payload)
    except DensityError as exc:
        raise InputError(f"density file {path}: {exc}") from exc


def _header(cfg: RunConfig) -> str:
    return ("# stringeig {cmd} defaults: grid={grid} rel_tol={rt} "
            "meshes={m0},{m1} tau_steps={ts} seed={seed} nmax={nmax} "
            "claim={claim} densities={dens}").format(
        cmd=cfg.command, grid=cfg.grid, rt=cfg.rel_tol,
        m0=cfg.meshes[0], m1=cfg.meshes[1], ts=cfg.tau_steps,
        seed=cfg.seed, nmax=cfg.n_max, claim=cfg.claim,
        dens=";".join(d.digest for d in cfg.loaded))


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(cfg: RunConfig) -> int:
    d = cfg.loaded[0]
    grid_size = max(65, cfg.grid // 2 + 1)
    pairs = [eigenfunction(d, n, grid_size=grid_size,
                           rel_tol=cfg.rel_tol, steps=cfg.grid)
             for n in range(1, cfg.n_max + 1)]
    if cfg.fmt == "json":
        payload = {
            "command": "solve",
            "density": d.to_json(),
            "density_digest": d.digest,
            "rows": [{"n": p.index, "lambda": p.lam, "zeros": list(p.zeros)}
                     for p in pairs],
        }
        _emit(cfg, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [_header(cfg), "n,lambda,zeros"]
        for p in pairs:
            zeros = ";".join(repr(float(z)) for z in p.zeros)
            lines.append(f"{p.index},{p.lam!r},{zeros}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    d = cfg.loaded[0]
    rows = run_claims(d, [cfg.claim], cfg.n_max, tau_steps=cfg.tau_steps)
    if cfg.fmt == "json":
        text = "\n".join(json.dumps(report_json_obj(r)) for r in rows) + "\n"
    else:
        lines = [_header(cfg), CSV_HEADER]
        lines.extend(report_csv_row(r) for r in rows)
        text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    failed = [r for r in rows if r.in_hypothesis and not r.passed]
    return EXIT_CLAIM_FAILED if failed else EXIT_OK


def cmd_transform(cfg: RunConfig) -> int:
    if len(cfg.loaded) != 2:
        raise InputError("transform needs two --density files: p then rho")
    p, rho = cfg.loaded
    mapping = legendre_map(p, rho)
    eff = mapping.effective_density
    xs = np.linspace(0.0, 1.0, 17)
    ts = mapping.t_of_x(xs)
    lam_string = [prufer.eigenvalue(eff, n, rel_tol=cfg.rel_tol, steps=cfg.grid)
                  for n in range(1, cfg.n_max + 1)]
    lam_fd = fd_sl_reference(p, rho, cfg.n_max, cfg.meshes)
    if cfg.fmt == "json":
        payload = {
            "command": "transform",
            "p": p.to_json(),
            "rho": rho.to_json(),
            "sigma": mapping.sigma,
            "map": [{"x": float(x), "t": float(t)} for x, t in zip(xs, ts)],
            "spectrum": [{"n": i + 1, "lambda_string": ls, "lambda_fd": float(lf)}
                         for i, (ls, lf) in enumerate(zip(lam_string, lam_fd))],
        }
        _emit(cfg, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [_header(cfg), "record,a,b,c",
                 f"sigma,{mapping.sigma!r},,"]
        for x, t in zip(xs, ts):
            lines.append(f"map,{float(x)!r},{float(t)!r},")
        for i, (ls, lf) in enumerate(zip(lam_string, lam_fd)):
            lines.append(f"eig,{i + 1},{ls!r},{float(lf)!r}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stringeig",
        description="Dirichlet spectra of -y'' = lambda rho(x) y and "
                    "verification of spectral inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, densities: int):
        sp.add_argument("--density", action="append", required=True,
                        metavar="PATH",
                        help="density JSON file" +
                             (" (give twice: p then rho)" if densities == 2 else ""))
        sp.add_argument("--nmax", type=int, default=8)
        sp.add_argument("--rel-tol", type=float, default=DEFAULTS["rel_tol"])
        sp.add_argument("--grid", type=int, default=DEFAULTS["grid"],
                        help="RK4 integration steps (default 4096)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None, metavar="PATH")

    sp = sub.add_parser("solve", help="spectrum table for one density")
    common(sp, 1)

    sp = sub.add_parser("verify", help="verification report rows")
    common(sp, 1)
    sp.add_argument("--claim", default="all",
                    choices=list(verify.CLAIMS) + ["all"])
    sp.add_argument("--tau-steps", type=int, default=DEFAULTS["tau_steps"])
    sp.add_argument("--seed", type=int, default=DEFAULTS["seed"])

    sp = sub.add_parser("transform", help="Legendre substitution for (p, rho)")
    common(sp, 2)
    sp.add_argument("--mesh", default="1000,2000", metavar="N,2N",
                    help="finite-difference mesh pair for the flux-form reference")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        meshes = DEFAULTS["meshes"]
        if getattr(args, "mesh", None):
            try:
                parts = [int(v) for v in args.mesh.split(",")]
                meshes = (parts[0], parts[1])
            except (ValueError, IndexError) as exc:
                raise InputError(f"--mesh must be 'N,2N', got {args.mesh!r}") from exc
        cfg = RunConfig(
            command=args.command,
            densities=list(args.density),
            claim=getattr(args, "claim", "all"),
            n_max=args.nmax,
            rel_tol=args.rel_tol,
            grid=args.grid,
            meshes=meshes,
            tau_steps=getattr(args, "tau_steps", DEFAULTS["tau_steps"]),
            seed=getattr(args, "seed", DEFAULTS["seed"]),
            fmt=args.format,
            out=args.out,
        )
        cfg.validate()
        cfg.loaded = [_load_density(p) for p in cfg.densities]
        set_default_steps(cfg.grid)
        if cfg.command == "solve":
            return cmd_solve(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg)
        return cmd_transform(cfg)
    except InputError as exc:
        print(f"stringeig: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (SolverError, OracleError, DensityError) as exc:
        print(f"stringeig: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
