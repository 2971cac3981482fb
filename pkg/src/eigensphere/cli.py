"""Experiment runner: parse a run configuration, execute sweeps, write
machine-readable results.

CSV schemas (JSON mirrors each row as a flat object; column order fixed,
command-key columns first, then the value, then its uncertainty, then
diagnostics):

  constants:  q,d,value,method
  moments:    d,ell,q,value,scaled,target,rel_err
  simulate:   d,ell,resolution,seed,value,node_var,n_nodes
  clt:        d,ell,q,resolution,replicates,seed,value,stderr,ks,w1,cum4
  excursion:  d,ell,z,resolution,replicates,seed,value,stderr,variance,
              expansion_variance,target_mean,ks
  defect:     d,ell,resolution,replicates,seed,value,stderr,mean,mean_stderr,ks

``value`` is the command's headline quantity: the asymptotic constant, the
moment integral, the node mean of one simulated field, the ensemble
variance (clt), the ensemble mean (excursion), or ell^2 times the defect
variance.  Exit codes: 0 success, 2 configuration error, 3 numeric error,
4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

__all__ = ["RunConfig", "run", "main"]


@dataclass
class RunConfig:
    command: str
    d: int = 2
    q: int = 2
    truncation: int = 8
    ell_list: list[int] = field(default_factory=lambda: [8])
    z: float = 1.0
    replicates: int = 2000
    grid_resolution: int = 0  # 0 = per-degree default rule
    seed: int = 1
    output: str | None = None
    fmt: str = "csv"

    def validate(self) -> None:
        if self.command not in ("constants", "moments", "simulate", "clt", "excursion", "defect"):
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.ell_list:
            raise ConfigError("ell list must be non-empty")
        if any(b <= a for a, b in zip(self.ell_list, self.ell_list[1:])):
            raise ConfigError("ell list must be strictly increasing")
        if self.d < 2:
            raise ConfigError(f"need d >= 2, got {self.d}")
        if self.replicates < 2:
            raise ConfigError(f"need at least 2 replicates, got {self.replicates}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")


class ConfigError(ValueError):
    pass


def _var_stderr(values: np.ndarray) -> float:
    """Asymptotic standard error of the sample variance, sqrt((m4 - m2^2)/n)."""
    c = values - values.mean()
    m2 = float(np.mean(c * c))
    m4 = float(np.mean(c**4))
    return math.sqrt(max(m4 - m2 * m2, 0.0) / len(values))


def _resolution(cfg: RunConfig, kind: str, ell: int) -> int:
    from .stats import default_resolution

    if cfg.grid_resolution > 0:
        return cfg.grid_resolution
    return default_resolution(cfg.d, kind, ell, q=cfg.q)


def _rows_constants(cfg: RunConfig) -> tuple[list[str], list[list]]:
    from .moments import asymptotic_constant

    method = "closed-form" if cfg.q == 2 or (cfg.d, cfg.q) == (2, 4) else "bessel-integral"
    value = asymptotic_constant(cfg.q, cfg.d)
    return ["q", "d", "value", "method"], [[cfg.q, cfg.d, value, method]]


def _rows_moments(cfg: RunConfig) -> tuple[list[str], list[list]]:
    from .moments import moment_result

    rows = []
    for ell in cfg.ell_list:
        r = moment_result(ell, cfg.q, cfg.d)
        rows.append([cfg.d, ell, cfg.q, r.integral, r.scaled, r.target, r.rel_err])
    return ["d", "ell", "q", "value", "scaled", "target", "rel_err"], rows


def _rows_simulate(cfg: RunConfig) -> tuple[list[str], list[list]]:
    from .field import dump_field, simulate
    from .stats import shared_grid

    rows = []
    for ell in cfg.ell_list:
        res = _resolution(cfg, "projection", ell)
        grid = shared_grid(cfg.d, res)
        sample = simulate(ell, grid, cfg.seed)
        if cfg.output:
            dump_field(sample, f"{cfg.output}.l{ell}.field")
        rows.append(
            [
                cfg.d,
                ell,
                res,
                cfg.seed,
                float(np.mean(sample.values)),
                float(np.var(sample.values)),
                grid.size,
            ]
        )
    return ["d", "ell", "resolution", "seed", "value", "node_var", "n_nodes"], rows


def _rows_clt(cfg: RunConfig) -> tuple[list[str], list[list]]:
    from .stats import ExperimentSpec, run_ensemble

    rows = []
    for ell in cfg.ell_list:
        res = _resolution(cfg, "projection", ell)
        spec = ExperimentSpec(cfg.d, ell, "projection", res, q=cfg.q)
        s = run_ensemble(spec, cfg.replicates, cfg.seed)
        rows.append(
            [
                cfg.d, ell, cfg.q, res, cfg.replicates, cfg.seed,
                s.variance, _var_stderr(s.values), s.ks_to_normal, s.w1_to_normal, s.cum4,
            ]
        )
    return (
        ["d", "ell", "q", "resolution", "replicates", "seed", "value", "stderr", "ks", "w1", "cum4"],
        rows,
    )


def _expansion_variance(z: float, truncation: int, ell: int, d: int) -> float:
    """Analytic variance of the truncation-order expansion of the level-z
    indicator: sum_{q>=2} J_q^2 Var[h_q] / q!^2 (even degrees only)."""
    from .functionals import indicator_coeffs
    from .moments import projection_variance

    if ell % 2 != 0 or ell < 2:
        return math.nan
    coeffs = indicator_coeffs(z, truncation).coeffs
    return sum(
        coeffs[q] ** 2 * projection_variance(ell, q, d) / math.factorial(q) ** 2
        for q in range(2, truncation + 1)
    )


def _rows_excursion(cfg: RunConfig) -> tuple[list[str], list[list]]:
    from .specfun import gauss_pdf_cdf, sphere_measure
    from .stats import ExperimentSpec, run_ensemble

    target = sphere_measure(cfg.d) * (1.0 - gauss_pdf_cdf(cfg.z)[1])
    rows = []
    for ell in cfg.ell_list:
        res = _resolution(cfg, "excursion", ell)
        spec = ExperimentSpec(cfg.d, ell, "excursion", res, z=cfg.z)
        s = run_ensemble(spec, cfg.replicates, cfg.seed)
        stderr = math.sqrt(s.variance / s.replicates)
        rows.append(
            [cfg.d, ell, cfg.z, res, cfg.replicates, cfg.seed,
             s.mean, stderr, s.variance,
             _expansion_variance(cfg.z, cfg.truncation, ell, cfg.d),
             target, s.ks_to_normal]
        )
    return (
        ["d", "ell", "z", "resolution", "replicates", "seed", "value", "stderr",
         "variance", "expansion_variance", "target_mean", "ks"],
        rows,
    )


def _rows_defect(cfg: RunConfig) -> tuple[list[str], list[list]]:
    from .stats import ExperimentSpec, run_ensemble

    rows = []
    for ell in cfg.ell_list:
        res = _resolution(cfg, "defect", ell)
        spec = ExperimentSpec(cfg.d, ell, "defect", res)
        s = run_ensemble(spec, cfg.replicates, cfg.seed)
        scaled = ell * ell * s.variance
        scaled_se = ell * ell * _var_stderr(s.values)
        mean_se = math.sqrt(s.variance / s.replicates)
        rows.append(
            [cfg.d, ell, res, cfg.replicates, cfg.seed, scaled, scaled_se, s.mean, mean_se, s.ks_to_normal]
        )
    return (
        ["d", "ell", "resolution", "replicates", "seed", "value", "stderr", "mean", "mean_stderr", "ks"],
        rows,
    )


_RUNNERS = {
    "constants": _rows_constants,
    "moments": _rows_moments,
    "simulate": _rows_simulate,
    "clt": _rows_clt,
    "excursion": _rows_excursion,
    "defect": _rows_defect,
}


def _write(cfg: RunConfig, header: list[str], rows: list[list]) -> str:
    if cfg.fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2, allow_nan=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def run(cfg: RunConfig) -> str:
    """Execute one configuration; returns the rendered output text."""
    cfg.validate()
    header, rows = _RUNNERS[cfg.command](cfg)
    return _write(cfg, header, rows)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eigensphere",
        description="Random spherical eigenfunction experiments: moment "
        "integrals, asymptotic constants, simulation, and CLT diagnostics.",
    )
    p.add_argument("--verify", action="store_true", help="run the acceptance battery and exit")
    sub = p.add_subparsers(dest="command")
    specs = {
        "constants": "evaluate one asymptotic constant",
        "moments": "moment integrals over a degree sweep",
        "simulate": "draw one field realization per degree",
        "clt": "chaos-projection ensembles with normality diagnostics",
        "excursion": "excursion-volume ensembles at a level z",
        "defect": "defect ensembles with scaled variance",
    }
    for name, help_text in specs.items():
        q = sub.add_parser(name, help=help_text)
        q.add_argument("--d", type=int, default=2)
        q.add_argument("--q", type=int, default=2)
        q.add_argument("--Q", dest="truncation", type=int, default=8)
        q.add_argument("--ell", type=str, default="8", help="comma-separated increasing degrees")
        q.add_argument("--z", type=float, default=1.0)
        q.add_argument("--reps", dest="replicates", type=int, default=2000)
        q.add_argument("--grid-resolution", type=int, default=0, help="0 = per-degree default")
        q.add_argument("--seed", type=int, default=1)
        q.add_argument("--out", dest="output", type=str, default=None)
        q.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    return p


def main(argv=None) -> int:
    threads = os.environ.get("EIGENSPHERE_THREADS")
    if threads:
        os.environ.setdefault("OMP_NUM_THREADS", threads)
        os.environ.setdefault("OPENBLAS_NUM_THREADS", threads)
    args = _build_parser().parse_args(argv)
    if args.verify:
        from .verify import run_battery

        results = run_battery(verbose=True)
        return 0 if all(ok for _, ok, _ in results) else 1
    if args.command is None:
        _build_parser().print_help()
        return 2
    try:
        cfg = RunConfig(
            command=args.command,
            d=args.d,
            q=args.q,
            truncation=args.truncation,
            ell_list=[int(tok) for tok in args.ell.split(",") if tok],
            z=args.z,
            replicates=args.replicates,
            grid_resolution=args.grid_resolution,
            seed=args.seed,
            output=args.output,
            fmt=args.fmt,
        )
        run(cfg)
    except (ConfigError, ValueError) as exc:
        # ValueError outside RunConfig.validate means a numeric-domain error
        code = 2 if isinstance(exc, ConfigError) else 3
        print(f"error: {exc}", file=sys.stderr)
        return code
    except ArithmeticError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except RuntimeError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
