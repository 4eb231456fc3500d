"""Command-line front end: halfline, fullline and validate subcommands.

Exit status: 0 success, 1 malformed input, 2 validation failure,
3 numerical degeneracy.
"""

from __future__ import annotations

import json
import sys

import click

from .config import ConfigError, config_from_mapping, load_config_file, parse_tolerance_flags
from .runner import EXIT_MALFORMED, EXIT_OK, EXIT_VALIDATION, run
from . import validation


def _common(func):
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="JSON scenario file; flags given on the command line override it."),
        click.option("--lambda", "lambda_grid", help="Energy grid min:max:count[:log]."),
        click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Output file (default stdout)."),
        click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None),
        click.option("--output", "outputs", multiple=True,
                     help="Output kind (repeatable or comma separated)."),
        click.option("--tol", "tols", multiple=True, help="Tolerance override NAME=VALUE (repeatable)."),
        click.option("--seed", type=int, default=None),
        click.option("--jobs", type=int, default=None, help="Worker processes (default: all cores)."),
    ]
    for opt in reversed(options):
        func = opt(func)
    return func


def _scenario(mode_default, overrides: dict, config_path, lambda_grid, output_format, outputs, tols,
              seed, jobs):
    data = load_config_file(config_path) if config_path else {}
    data = dict(data)
    data.setdefault("mode", mode_default)
    data.update({k: v for k, v in overrides.items() if v is not None})
    if lambda_grid is not None:
        data["lambda_grid"] = lambda_grid
    if output_format is not None:
        data["output_format"] = output_format
    if outputs:
        data["outputs"] = [o for item in outputs for o in item.split(",") if o]
    if tols:
        merged = dict(data.get("tolerances", {}))
        merged.update(parse_tolerance_flags(tols))
        data["tolerances"] = merged
    if seed is not None:
        data["seed"] = seed
    if jobs is not None:
        data["jobs"] = jobs
    return config_from_mapping(data)


def _execute(config, out_path) -> int:
    if out_path:
        with open(out_path, "w", newline="\n") as fh:
            return run(config, fh)
    return run(config, sys.stdout)


@click.group()
def cli():
    """Scattering and spectral computations for fourth-order operators."""


@cli.command()
@click.option("--bc", help="alpha=RE+IMi,alpha1=..,alpha2=..,family=..")
@click.option("--potential", help="Short-range potential on [0, a]; selects the clamped short-range problem.")
@_common
def halfline(bc, potential, config_path, lambda_grid, out_path, output_format, outputs, tols, seed, jobs):
    """Half-line problem: exact boundary-condition model or clamped short-range potential."""
    try:
        mode = "halfline_shortrange" if potential else "halfline_exact"
        overrides = {"bc": bc, "potential": potential}
        if potential:
            overrides["mode"] = mode
        config = _scenario(mode, overrides, config_path, lambda_grid, output_format, outputs, tols, seed, jobs)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_MALFORMED
    return _execute(config, out_path)


@cli.command()
@click.option("--potential", help="Potential specification, e.g. 'gaussian:amp=1,width=1'.")
@_common
def fullline(potential, config_path, lambda_grid, out_path, output_format, outputs, tols, seed, jobs):
    """Full-line scattering matrix S and decaying-mode matrix B."""
    try:
        config = _scenario("fullline", {"potential": potential, "mode": "fullline"}, config_path, lambda_grid,
                           output_format, outputs, tols, seed, jobs)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_MALFORMED
    return _execute(config, out_path)


@cli.command()
@click.argument("suite", type=click.Choice(["quick", "full"]), default="quick")
@click.option("--seed", type=int, default=1)
@click.option("--tol", "tols", multiple=True, help="Per-check tolerance override CHECK=VALUE.")
@click.option("--only", multiple=True, help="Run only the named check(s).")
@click.option("--replay", "replay_path", type=click.Path(exists=True, dir_okay=False),
              help="Re-run the failures stored in a replay file.")
@click.option("--replay-out", default="validation_failures.json", show_default=True,
              help="Where failing cases are written.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Report file (default stdout).")
def validate(suite, seed, tols, only, replay_path, replay_out, out_path):
    """Run the invariant suites; failing cases are serialised for replay."""
    if replay_path:
        rows = validation.replay(replay_path)
        report = {"replay": replay_path, "passed": all(ok for _, _, ok in rows),
                  "results": [{"check": rec["check"], "residual": r, "recorded_residual": rec["residual"],
                               "tol": rec["tol"], "passed": ok, "case": rec["case"]} for rec, r, ok in rows]}
        _emit(report, out_path)
        return EXIT_OK if report["passed"] else EXIT_VALIDATION
    try:
        overrides = {k: float(v) for k, v in parse_tolerance_flags(tols).items()}
        report = validation.validate(suite, seed, overrides, only or None)
    except (ConfigError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_MALFORMED
    payload = report.to_dict()
    if not report.passed:
        n = validation.write_replay(report, replay_out)
        payload["replay_file"] = replay_out
        click.echo(f"{n} failing case(s) written to {replay_out}", err=True)
    _emit(payload, out_path)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _emit(payload, out_path):
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        code = cli.main(args=argv, prog_name="quartic-scatter", standalone_mode=False)
    except click.exceptions.Abort:
        return EXIT_MALFORMED
    except click.ClickException as exc:
        exc.show()
        return EXIT_MALFORMED
    return code if isinstance(code, int) else EXIT_OK


def entry_point():
    sys.exit(main())
