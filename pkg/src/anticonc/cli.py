"""Command-line front end.

Subcommands parse JSON instances, dispatch to the library and emit JSON (or
flattened CSV) reports. Exit codes: 0 on success or a passing scenario, 1
when an asserted inequality fails, 2 on malformed input.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import bounds as bounds_mod
from . import chains as chains_mod
from . import geometry as geom
from . import lattice as lat
from . import perfect_graphs as pg
from . import scenarios
from .errors import DomainError, DimensionMismatch, ResourceCapExceeded, UnsupportedNorm
from .exact import as_fraction, fraction_str

_INPUT_ERRORS = (
    DomainError,
    DimensionMismatch,
    UnsupportedNorm,
    KeyError,
    TypeError,
    ValueError,
    json.JSONDecodeError,
)


def _emit(data: dict, output: str) -> None:
    if output == "json":
        click.echo(json.dumps(data, sort_keys=True, indent=2, default=str))
        return
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["key", "value"])

    def walk(prefix: str, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, (list, tuple)):
            writer.writerow([prefix, json.dumps(value, default=str)])
        else:
            writer.writerow([prefix, value])

    walk("", data)
    click.echo(buf.getvalue().rstrip("\n"))


def _load_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _parse_alphas(text: str) -> list[Fraction]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise DomainError("no alphas given")
    return [as_fraction(s) for s in items]


def _fail_input(exc: Exception) -> None:
    click.echo(f"input error: {exc}", err=True)
    sys.exit(2)


def _scenario_exit(result: scenarios.ScenarioResult, output: str) -> None:
    _emit(result.to_json(), output)
    sys.exit(0 if result.passed else 1)


@click.group()
def main() -> None:
    """Exact concentration toolkit."""


_output_option = click.option(
    "--output", type=click.Choice(["json", "csv"]), default="json", show_default=True
)


@main.command("nu-star")
@click.option("--alpha", required=True, help="rational in (0,1], e.g. 3/8")
@_output_option
def nu_star_cmd(alpha: str, output: str) -> None:
    """Extremal lattice measure with concentration exactly alpha."""
    try:
        measure = lat.extremal_measure(as_fraction(alpha))
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(measure.to_json(), output)


@main.command("t-value")
@click.option("--alphas", required=True, help="comma-separated rationals")
@click.option("--exact/--auto", default=True, show_default=True)
@_output_option
def t_value_cmd(alphas: str, exact: bool, output: str) -> None:
    """Mass of the extremal sum on {0, 1/2}."""
    try:
        fracs = _parse_alphas(alphas)
        if exact:
            t = lat.t_value(fracs)
            data = {"t": fraction_str(t), "float": float(t), "exact": True}
        else:
            res = lat.t_value_auto(fracs)
            data = {
                "t": None if res.fraction is None else fraction_str(res.fraction),
                "float": res.value,
                "exact": res.exact,
            }
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(data, output)


@main.command("concentration")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@_output_option
def concentration_cmd(input_path: str, output: str) -> None:
    """Exact concentration of a lattice or vector measure (JSON file)."""
    try:
        data = _load_json(input_path)
        if "weights" in data and "offset_index" in data:
            m = lat.LatticeMeasure.from_json(data)
            value = lat.concentration_1d(m)
            result = {"kind": "lattice", "value": fraction_str(value), "float": float(value)}
        elif "atoms" in data:
            vm = geom.VectorMeasure.from_json(data)
            res = geom.concentration_q(vm)
            result = {
                "kind": "vector",
                "value": fraction_str(res.value),
                "float": float(res.value),
                "witness": list(res.witness),
            }
        else:
            raise DomainError("input must contain 'weights'+'offset_index' or 'atoms'")
    except ResourceCapExceeded as exc:
        click.echo(f"resource cap: {exc}", err=True)
        sys.exit(2)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(result, output)


@main.command("berge-check")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--complement", is_flag=True, help="search the complement graph only")
@_output_option
def berge_cmd(input_path: str, complement: bool, output: str) -> None:
    """Odd-hole search on a point configuration or a raw graph."""
    try:
        data = _load_json(input_path)
        if "points" in data:
            g = geom.distance_graph(geom.PointConfig.from_json(data))
        else:
            g = pg.DistGraph.from_json(data)
        if complement:
            witness = pg.find_odd_hole(g, True)
            result = {
                "berge": None,
                "hole": None if witness is None else list(witness.cycle),
                "in_complement": True,
            }
        else:
            berge, witness = pg.is_berge(g)
            result = {
                "berge": berge,
                "hole": None if witness is None else list(witness.cycle),
                "in_complement": None if witness is None else witness.in_complement,
            }
    except ResourceCapExceeded as exc:
        click.echo(f"resource cap: {exc}", err=True)
        sys.exit(2)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(result, output)


@main.command("decompose")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--alpha", default=None, help="optional concentration bound")
@_output_option
def decompose_cmd(input_path: str, alpha: str | None, output: str) -> None:
    """Block decomposition of a uniform near-line vector measure."""
    try:
        vm = geom.VectorMeasure.from_json(_load_json(input_path))
        # the decomposition itself only accepts uniform multisets; clear
        # denominators here on the caller side
        uniform = all(w == vm.weights[0] for w in vm.weights)
        subject = vm if uniform else pg.to_uniform_multiset(vm)
        config = subject.config if uniform else subject
        fit = geom.near_line_fit(config)
        blocks = pg.block_decomposition(
            subject, fit.frame, None if alpha is None else as_fraction(alpha)
        )
        result = {
            "near_line_certified": fit.certified,
            "max_deviation": fit.max_deviation,
            "multiset_size": len(config.points),
            "num_blocks": len(blocks),
            "blocks": [b.to_json() for b in blocks],
        }
    except ResourceCapExceeded as exc:
        click.echo(f"resource cap: {exc}", err=True)
        sys.exit(2)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(result, output)


def _blocks_from_json(data: dict) -> list:
    norm = geom.NormSpec.from_json(data["norm"], int(data["dim"]))
    frame = geom.supporting_functional(norm, data["direction"])
    return [
        chains_mod.Block.from_points([tuple(p) for p in blk], frame)
        for blk in data["blocks"]
    ]


@main.command("btk-chains")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@_output_option
def btk_cmd(input_path: str, output: str) -> None:
    """Chain decomposition of a product of blocks.

    Input: {"norm": ..., "dim": d, "direction": [...], "blocks": [[...]]}.
    """
    try:
        blocks = _blocks_from_json(_load_json(input_path))
        decomp = chains_mod.iterated_decompose(blocks)
        result = {
            "num_chains": len(decomp.chains),
            "sizes": sorted(decomp.sizes),
            "chains": decomp.to_json(),
        }
    except ResourceCapExceeded as exc:
        click.echo(f"resource cap: {exc}", err=True)
        sys.exit(2)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(result, output)


@main.command("jones-bound")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@_output_option
def jones_cmd(input_path: str, output: str) -> None:
    """Middle-layer bound for a product of blocks, with the exact check."""
    try:
        blocks = _blocks_from_json(_load_json(input_path))
        res = chains_mod.jones_bound(blocks)
        result = {
            "bound": fraction_str(res.bound),
            "t_exact": fraction_str(res.t_exact),
            "q_exact": None if res.q_exact is None else fraction_str(res.q_exact),
            "ok": res.ok,
        }
    except ResourceCapExceeded as exc:
        click.echo(f"resource cap: {exc}", err=True)
        sys.exit(2)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(result, output)
    sys.exit(0 if res.ok else 1)


@main.command("clt-window")
@click.option("--alphas", required=True, help="comma-separated rationals")
@click.option("--c", "c_param", default="1/4", show_default=True)
@click.option("--delta-prime", type=float, default=None, help="defaults to minimal feasible")
@_output_option
def clt_cmd(alphas: str, c_param: str, delta_prime: float | None, output: str) -> None:
    """Normal window for the t-value with exact condition checks."""
    try:
        fracs = _parse_alphas(alphas)
        if delta_prime is None:
            delta_prime = bounds_mod.minimal_delta_prime(fracs)
        report = bounds_mod.clt_window(fracs, as_fraction(c_param), delta_prime)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(report.to_json(), output)
    sys.exit(0 if report.extras.get("t_in_window", False) else 1)


@main.command("main-bound")
@click.option("--alphas", required=True, help="comma-separated rationals")
@click.option("--d", type=int, default=2, show_default=True)
@click.option("--big-c", type=float, required=True, help="norm-dependent constant C")
@click.option("--c", "c_param", default="1/4", show_default=True)
@click.option("--delta-prime", type=float, default=None)
@click.option("--gamma", type=float, default=None)
@_output_option
def main_bound_cmd(alphas, d, big_c, c_param, delta_prime, gamma, output) -> None:
    """Master bound evaluation; reports every side condition."""
    try:
        params = bounds_mod.make_main_bound_params(
            _parse_alphas(alphas), d, big_c, as_fraction(c_param), delta_prime, gamma
        )
        report = bounds_mod.main_bound(params)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(report.to_json(), output)
    sys.exit(0 if report.all_hold else 1)


@main.command("halasz")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--direction-samples", type=int, default=180, show_default=True)
@click.option("--center-samples", type=int, default=256, show_default=True)
@_output_option
def halasz_cmd(input_path, direction_samples, center_samples, output) -> None:
    """Direction/shift diagnostics for a JSON list of plane measures."""
    try:
        data = _load_json(input_path)
        measures = [geom.VectorMeasure.from_json(m) for m in data["measures"]]
        diag = geom.halasz_diagnostics(measures, direction_samples, center_samples)
        result = {
            "D": diag.D,
            "mu": diag.mu,
            "best_direction": list(diag.best_direction),
            "shifts": [list(s) for s in diag.shifts],
            "best_center": None if diag.best_center is None else list(diag.best_center),
        }
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(result, output)


@main.command("octagon")
@_output_option
def octagon_cmd(output: str) -> None:
    """Run the octagon counterexample scenario."""
    _scenario_exit(scenarios.run_octagon_scenario(), output)


@main.command("sharpness")
@click.option("--epsilon", default="1/1000", show_default=True)
@click.option("--strip-samples", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_output_option
def sharpness_cmd(epsilon: str, strip_samples: int, seed: int, output: str) -> None:
    """Run the strip-threshold sharpness scenario."""
    try:
        result = scenarios.run_sharpness_scenario(
            as_fraction(epsilon), strip_samples=strip_samples, seed=seed
        )
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _scenario_exit(result, output)


@main.command("verify-theorem22")
@click.option("--input", "input_path", default=None, type=click.Path(exists=True))
@click.option("--count", type=int, default=None, help="override instance count")
@click.option("--seed", type=int, default=None, help="overrides the config seed")
@_output_option
def verify22_cmd(input_path, count, seed, output) -> None:
    """Randomized near-line verification of the sum/t-value inequality."""
    try:
        gen = _load_json(input_path) if input_path else {}
        if count is not None:
            gen["count"] = count
        result = scenarios.run_verify_theorem22(gen, seed=seed)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _scenario_exit(result, output)


@main.command("empirical")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--n", type=int, required=True)
@click.option("--delta", default="1/100", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_output_option
def empirical_cmd(input_path, n, delta, seed, output) -> None:
    """Empirical measure of n draws from the dilated input measure."""
    try:
        vm = geom.VectorMeasure.from_json(_load_json(input_path))
        emp = geom.empirical_measure(vm, n, as_fraction(delta), seed)
    except _INPUT_ERRORS as exc:
        _fail_input(exc)
    _emit(emp.to_json(), output)


if __name__ == "__main__":
    main()
