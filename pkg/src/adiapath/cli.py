"""Experiment runner: every capability as a reproducible subcommand.

All commands honor --config, --seed, --out and --format; outputs embed
the resolved configuration so a run can be reproduced from its files
alone. Exit codes: 0 success, 2 configuration or input error,
3 capacity error, 4 numerical-tolerance failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import collective, dynamics, effpot, instances, operators, spectra
from .errors import (
    AccuracyError,
    CapacityError,
    ConfigError,
    InputError,
)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _parse_config_file(path):
    config = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        config[key.strip().replace("-", "_")] = value.strip()
    return config


class _Resolver:
    """Merge CLI values, config-file values and defaults, keeping the
    resolved result for provenance."""

    def __init__(self, config_path, seed, out, fmt):
        self.file = _parse_config_file(config_path) if config_path else {}
        self.resolved = {}
        self.seed = int(self.get("seed", seed, 0, int))
        self.out = Path(self.get("out", out, ".", str))
        self.fmt = self.get("format", fmt, "csv", str)
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.fmt!r}")

    def get(self, key, cli_value, default, cast):
        if cli_value is not None:
            value = cli_value
        elif key in self.file:
            raw = self.file[key]
            try:
                if cast is bool:
                    value = raw.lower() in ("1", "true", "yes", "on")
                else:
                    value = cast(raw)
            except ValueError:
                raise ConfigError(f"bad config value {key} = {raw!r}") from None
        else:
            value = default
        if isinstance(value, Path):
            value = str(value)
        self.resolved[key] = value
        return value


def _write_table(resolver, name, header, rows):
    resolver.out.mkdir(parents=True, exist_ok=True)
    config_items = sorted(resolver.resolved.items())
    if resolver.fmt == "csv":
        path = resolver.out / f"{name}.csv"
        lines = [f"# {k} = {v}" for k, v in config_items]
        lines.append(",".join(header))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
    else:
        path = resolver.out / f"{name}.rows.json"
        payload = {
            "config": dict(config_items),
            "columns": list(header),
            "rows": [[v for v in row] for row in rows],
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return path


def _write_summary(resolver, name, payload):
    resolver.out.mkdir(parents=True, exist_ok=True)
    payload = dict(payload)
    payload["config"] = dict(sorted(resolver.resolved.items()))
    path = resolver.out / f"{name}.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return path


def _load_instance(resolver, builder, n, instance_file):
    builder = resolver.get("builder", builder, "symmetric", str)
    n = resolver.get("n", n, None, int)
    instance_file = resolver.get("instance_file", instance_file, None, str)
    if instance_file is not None:
        return instances.parse_instance(Path(instance_file).read_text())
    if builder == "symmetric":
        if n is None:
            raise ConfigError("builder 'symmetric' needs --n")
        return instances.build_symmetric_instance(n)
    raise ConfigError(f"unknown builder {builder!r}")


def _extra_matrices(resolver, inst, proposal, kind, half_width, matrix_file):
    proposal = resolver.get("proposal", proposal, "none", str)
    kind = resolver.get("kind", kind, "real-symmetric", str)
    half_width = resolver.get("half_width", half_width, 3.0, float)
    matrix_file = resolver.get("matrix_file", matrix_file, None, str)
    if matrix_file is not None:
        coupling = operators.parse_matrix(Path(matrix_file).read_text())
        return [coupling] * len(inst.clauses)
    if proposal == "none":
        return None
    config = operators.PerturbationConfig(
        proposal=proposal, kind=kind, half_width=half_width, seed=resolver.seed
    )
    return operators.sample_perturbation(inst, config)


_GLOBAL_OPTIONS = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                 help="Key = value file providing defaults for any option."),
    click.option("--seed", type=int, default=None, help="Random seed (default 0)."),
    click.option("--out", type=click.Path(), default=None,
                 help="Output directory (default '.')."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
                 help="Tabular output format (default csv)."),
]


def _with_global_options(fn):
    for option in reversed(_GLOBAL_OPTIONS):
        fn = option(fn)
    return fn


@click.group()
def cli():
    """Numerical laboratory for adiabatic interpolation paths."""


@cli.command("gap-scan")
@_with_global_options
@click.option("--builder", default=None, help="Instance builder (symmetric).")
@click.option("--n", type=int, default=None, help="Bit count for the builder.")
@click.option("--instance-file", type=click.Path(exists=True), default=None)
@click.option("--space", type=click.Choice(["full", "collective"]), default=None)
@click.option("--proposal", type=click.Choice(["none", "P1", "P2", "P3"]), default=None)
@click.option("--kind", type=click.Choice(["real-symmetric", "complex-hermitian"]),
              default=None)
@click.option("--half-width", type=float, default=None)
@click.option("--matrix-file", type=click.Path(exists=True), default=None,
              help="Inject a fixed shared coupling instead of sampling.")
@click.option("--grid", type=int, default=None, help="Number of s points (default 201).")
@click.option("--refine/--no-refine", default=None)
@click.option("--scaled/--no-scaled", default=None,
              help="Apply the (2/n)^3 scaling (collective space).")
@click.option("--include-extra/--no-include-extra", default=None,
              help="Collective space: add the built-in x-z extra term.")
def cmd_gap_scan(config_path, seed, out, fmt, builder, n, instance_file, space,
                 proposal, kind, half_width, matrix_file, grid, refine, scaled,
                 include_extra):
    """Scan the gap E1 - E0 along the path; CSV s,E0,E1,gap plus JSON."""
    r = _Resolver(config_path, seed, out, fmt)
    space = r.get("space", space, "full", str)
    grid = r.get("grid", grid, spectra.DEFAULT_GRID_POINTS, int)
    refine = r.get("refine", refine, True, bool)
    s_grid = np.linspace(0.0, 1.0, grid)
    if space == "collective":
        n_val = r.get("n", n, None, int)
        if n_val is None:
            raise ConfigError("collective space needs --n")
        scaled = r.get("scaled", scaled, False, bool)
        include_extra = r.get("include_extra", include_extra, False, bool)
        hamiltonian_at = collective.collective_path(
            n_val, include_extra=include_extra, scaled=scaled
        )
    else:
        inst = _load_instance(r, builder, n, instance_file)
        extra = _extra_matrices(r, inst, proposal, kind, half_width, matrix_file)
        path = operators.build_path(inst, extra=extra)
        hamiltonian_at = operators.dense_path(path)
    profile = spectra.gap_scan(hamiltonian_at, s_grid)
    rows = list(zip(profile.s_grid, profile.e0, profile.e1, profile.gaps))
    _write_table(r, "gap_scan", ("s", "E0", "E1", "gap"), rows)
    summary = {"min_gap": profile.min_gap, "argmin_s": profile.argmin_s}
    if refine:
        s_star, gap_star = spectra.min_gap_refine(hamiltonian_at, profile)
        summary["refined_argmin_s"] = s_star
        summary["refined_min_gap"] = gap_star
    _write_summary(r, "gap_scan", summary)
    click.echo(f"min gap {_fmt(profile.min_gap)} at s = {_fmt(profile.argmin_s)}")


@cli.command("evolve")
@_with_global_options
@click.option("--builder", default=None)
@click.option("--n", type=int, default=None)
@click.option("--instance-file", type=click.Path(exists=True), default=None)
@click.option("--space", type=click.Choice(["full", "collective"]), default=None)
@click.option("--proposal", type=click.Choice(["none", "P1", "P2", "P3"]), default=None)
@click.option("--kind", type=click.Choice(["real-symmetric", "complex-hermitian"]),
              default=None)
@click.option("--half-width", type=float, default=None)
@click.option("--matrix-file", type=click.Path(exists=True), default=None)
@click.option("--t", "t_values", type=float, multiple=True,
              help="Run time; repeat the flag to sweep.")
@click.option("--steps", type=int, default=None)
@click.option("--method", type=click.Choice(["piecewise-eigen", "rk4"]), default=None)
@click.option("--samples", type=int, default=None,
              help="Time samples recorded in the CSV (default 11).")
def cmd_evolve(config_path, seed, out, fmt, builder, n, instance_file, space,
               proposal, kind, half_width, matrix_file, t_values, steps, method,
               samples):
    """Integrate the Schroedinger evolution along the path."""
    r = _Resolver(config_path, seed, out, fmt)
    space = r.get("space", space, "full", str)
    steps = r.get("steps", steps, 1000, int)
    method = r.get("method", method, "piecewise-eigen", str)
    samples = r.get("samples", samples, 11, int)
    if t_values:
        t_list = list(t_values)
        r.resolved["T"] = ",".join(_fmt(t) for t in t_list)
    elif "T" in r.file:
        t_list = [float(tok) for tok in r.file["T"].split(",")]
        r.resolved["T"] = ",".join(_fmt(t) for t in t_list)
    else:
        raise ConfigError("evolve needs at least one --t")
    if space == "collective":
        n_val = r.get("n", n, None, int)
        if n_val is None:
            raise ConfigError("collective space needs --n")
        hamiltonian_at = collective.collective_path(n_val)
    else:
        inst = _load_instance(r, builder, n, instance_file)
        extra = _extra_matrices(r, inst, proposal, kind, half_width, matrix_file)
        path = operators.build_path(inst, extra=extra)
        hamiltonian_at = operators.dense_path(path)
    runs = []
    last_result = None
    for t_run in t_list:
        spec = dynamics.EvolutionSpec(
            T=t_run, steps=steps, method=method, sample_count=samples
        )
        last_result = dynamics.evolve(hamiltonian_at, spec)
        runs.append(
            {
                "T": t_run,
                "success_probability": last_result.success_probability,
                "norm_drift": last_result.norm_drift,
            }
        )
    if len(t_list) == 1:
        rows = [(t, o, nm) for (t, o, nm) in last_result.samples]
        _write_table(r, "evolve", ("t", "overlap_ground", "norm"), rows)
        _write_summary(r, "evolve", runs[0])
        click.echo(f"success probability {_fmt(runs[0]['success_probability'])}")
    else:
        rows = [(x["T"], x["success_probability"], x["norm_drift"]) for x in runs]
        _write_table(r, "evolve_sweep", ("T", "success_probability", "norm_drift"), rows)
        _write_summary(r, "evolve", {"runs": runs})
        click.echo(f"swept {len(runs)} run times")


@cli.command("effpot")
@_with_global_options
@click.option("--mode", type=click.Choice(["figure", "track", "mc"]), default=None)
@click.option("--matrix-file", type=click.Path(exists=True), default=None,
              help="8x8 coupling for the extra term.")
@click.option("--no-he", "no_he", is_flag=True, default=None,
              help="Drop the extra term (unperturbed potential).")
@click.option("--builtin-coupling", is_flag=True, default=None,
              help="Use the built-in x-z demonstration coupling.")
@click.option("--trials", type=int, default=None)
@click.option("--kind", type=click.Choice(["real-symmetric", "complex-hermitian"]),
              default=None)
@click.option("--half-width", type=float, default=None)
@click.option("--ds", type=float, default=None, help="Tracking step (default 1e-3).")
def cmd_effpot(config_path, seed, out, fmt, mode, matrix_file, no_he,
               builtin_coupling, trials, kind, half_width, ds):
    """Effective-potential tools: figure data, tracking, Monte Carlo."""
    r = _Resolver(config_path, seed, out, fmt)
    mode = r.get("mode", mode, None, str)
    if mode is None:
        raise ConfigError("effpot needs --mode figure|track|mc")
    ds = r.get("ds", ds, effpot.TRACK_DS, float)
    if mode == "mc":
        trials = r.get("trials", trials, 1000, int)
        kind = r.get("kind", kind, "real-symmetric", str)
        half_width = r.get("half_width", half_width, 3.0, float)
        result = effpot.mc_experiment(
            trials, r.seed, kind=kind, half_width=half_width, ds=ds
        )
        counts = {
            label: result.classifications.count(label)
            for label in ("success", "failure", "indeterminate")
        }
        _write_summary(
            r,
            "effpot_mc",
            {
                "trials": result.trials,
                "successes": result.successes,
                "fraction": result.fraction,
                "seed": result.seed,
                "dist": {"kind": result.kind, "half_width": result.half_width},
                "counts": counts,
            },
        )
        click.echo(f"{result.successes} successes in {result.trials} trials "
                   f"(fraction {_fmt(result.fraction)})")
        return
    # figure and track need a definite potential
    no_he = r.get("no_he", no_he, False, bool)
    builtin_coupling = r.get("builtin_coupling", builtin_coupling, False, bool)
    matrix_file = r.get("matrix_file", matrix_file, None, str)
    chosen = sum(bool(x) for x in (no_he, builtin_coupling, matrix_file is not None))
    if chosen != 1:
        raise ConfigError(
            "choose exactly one of --no-he, --builtin-coupling, --matrix-file"
        )
    if no_he:
        pot = effpot.EffectivePotential.base_only()
    elif builtin_coupling:
        pot = effpot.EffectivePotential.from_matrix(operators.xz_coupling_matrix())
    else:
        pot = effpot.EffectivePotential.from_matrix(
            operators.parse_matrix(Path(matrix_file).read_text())
        )
    if mode == "figure":
        rows = effpot.figure_curves(pot)
        _write_table(r, "effpot_figure", ("s", "theta", "v_phi0", "v_phi_pi"), rows)
        click.echo(f"wrote {len(rows)} figure rows")
        return
    track = effpot.track_minimum(pot, ds=ds)
    theta, phi = effpot.angles_of(track.points)
    rows = list(zip(track.s_grid, theta, phi, track.values))
    _write_table(r, "effpot_track", ("s", "theta", "phi", "V"), rows)
    _write_summary(
        r,
        "effpot_track",
        {
            "classification": track.classification,
            "endpoint": [float(x) for x in track.endpoint],
            "status": track.status,
            "diagnostic": track.diagnostic(),
        },
    )
    click.echo(f"track: {track.classification} ({track.diagnostic()})")


def _random_3sat_instance(rng, n, clause_count):
    """Distinct random 3-SAT clauses; resamples until satisfiable."""
    from math import comb

    if clause_count > comb(n, 3) * 8:
        raise ConfigError("more distinct clauses requested than exist")
    while True:
        seen = set()
        clauses = []
        while len(clauses) < clause_count:
            bits = tuple(sorted(rng.choice(n, size=3, replace=False).tolist()))
            mask = tuple(int(v) for v in rng.integers(0, 2, size=3))
            if (bits, mask) in seen:
                continue
            seen.add((bits, mask))
            clauses.append(instances.build_3sat_clause(bits, mask))
        inst = instances.Instance(n, tuple(clauses))
        if instances.min_cost_bruteforce(inst)[0] == 0:
            return inst


@cli.command("sat-gap-study")
@_with_global_options
@click.option("--n", type=int, default=None, help="Bits per instance (default 9).")
@click.option("--clause-count", type=int, default=None, help="Clauses (default 3n).")
@click.option("--instances", "instance_count", type=int, default=None,
              help="Number of random instances (default 10).")
@click.option("--proposal", type=click.Choice(["P1", "P2", "P3"]), default=None)
@click.option("--kind", type=click.Choice(["real-symmetric", "complex-hermitian"]),
              default=None)
@click.option("--half-width", type=float, default=None)
@click.option("--grid", type=int, default=None, help="s points per scan (default 101).")
def cmd_sat_gap_study(config_path, seed, out, fmt, n, clause_count, instance_count,
                      proposal, kind, half_width, grid):
    """Minimum gaps of random satisfiable 3-SAT instances, with and
    without a sampled extra term."""
    r = _Resolver(config_path, seed, out, fmt)
    n = r.get("n", n, 9, int)
    if n > operators.MATERIALIZE_MAX_BITS:
        raise CapacityError(
            f"full-space spectra capped at n={operators.MATERIALIZE_MAX_BITS}, got {n}"
        )
    clause_count = r.get("clause_count", clause_count, 3 * n, int)
    instance_count = r.get("instances", instance_count, 10, int)
    proposal = r.get("proposal", proposal, "P1", str)
    kind = r.get("kind", kind, "real-symmetric", str)
    half_width = r.get("half_width", half_width, 3.0, float)
    grid = r.get("grid", grid, 101, int)
    s_grid = np.linspace(0.0, 1.0, grid)
    rows = []
    for i in range(instance_count):
        rng = np.random.default_rng([r.seed, i])
        inst = _random_3sat_instance(rng, n, clause_count)
        plain = operators.build_path(inst)
        profile_plain = spectra.gap_scan(operators.dense_path(plain), s_grid)
        config = operators.PerturbationConfig(
            proposal=proposal, kind=kind, half_width=half_width
        )
        extra = operators.sample_perturbation(inst, config, rng=rng)
        perturbed = operators.build_path(inst, extra=extra)
        profile_pert = spectra.gap_scan(operators.dense_path(perturbed), s_grid)
        rows.append(
            (
                i,
                profile_plain.min_gap,
                profile_pert.min_gap,
                profile_plain.argmin_s,
                profile_pert.argmin_s,
            )
        )
    _write_table(
        r,
        "sat_gap_study",
        ("instance_id", "min_gap_plain", "min_gap_perturbed",
         "argmin_plain", "argmin_perturbed"),
        rows,
    )
    plain_gaps = np.array([row[1] for row in rows])
    pert_gaps = np.array([row[2] for row in rows])
    quantiles = [0.1, 0.25, 0.5, 0.75, 0.9]
    _write_summary(
        r,
        "sat_gap_study",
        {
            "instances": instance_count,
            "quantiles": quantiles,
            "min_gap_plain_quantiles": np.quantile(plain_gaps, quantiles).tolist(),
            "min_gap_perturbed_quantiles": np.quantile(pert_gaps, quantiles).tolist(),
            "perturbed_larger_count": int((pert_gaps > plain_gaps).sum()),
        },
    )
    click.echo(f"studied {instance_count} instances")


@cli.command("brute-force")
@_with_global_options
@click.option("--builder", default=None)
@click.option("--n", type=int, default=None)
@click.option("--instance-file", type=click.Path(exists=True), default=None)
def cmd_brute_force(config_path, seed, out, fmt, builder, n, instance_file):
    """Exhaustive minimum of an instance's cost function."""
    r = _Resolver(config_path, seed, out, fmt)
    inst = _load_instance(r, builder, n, instance_file)
    best, minimizers = instances.min_cost_bruteforce(inst)
    payload = {
        "min": best,
        "argmins": ["".join(str(b) for b in a) for a in minimizers],
        "count": len(minimizers),
    }
    _write_summary(r, "brute_force", payload)
    click.echo(f"min {best} with {len(minimizers)} minimizers")


def main():
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)
    except (ConfigError, InputError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except CapacityError as exc:
        click.echo(f"capacity error: {exc}", err=True)
        sys.exit(3)
    except AccuracyError as exc:
        click.echo(f"accuracy error: {exc}", err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
