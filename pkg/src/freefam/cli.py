"""Typer CLI for freefam."""

import csv
import io
import json
import logging
import math
import sys
from collections.abc import Iterable, Sequence
from contextlib import redirect_stdout
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Annotated, Any

import typer
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from .config import CONFIG, CONFIG_ERROR
from .cumulants import (
    CumulantAction,
    CumulantSequence,
    RationalVarianceFunction,
    admissibility_report,
    cumulants_from_variance,
    transform_cumulants,
    variance_from_cumulants,
)
from .freeconv import clt_cumulants, mora_check, mp_approximation, reproductive_family
from .measures import (
    Measure,
    MeixnerParams,
    atoms_payload,
    density_table,
    family_member,
    meixner_measure,
    semicircle_measure,
)
from .moments import MomentSequence, cumulants_from_moments, moments_from_cumulants
from .schemas import (
    AtomsOutput,
    CheckOutput,
    ConvergenceOutput,
    FamilyOutput,
    FormalSequenceOutput,
    SequenceOutput,
    output_schema,
)

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="freefam",
    help="Free exponential families: variance functions, free cumulants and free Meixner laws",
    no_args_is_help=True,
)
console = Console(stderr=True)


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class Generator(str, Enum):
    SEMICIRCLE = "semicircle"
    MEIXNER = "meixner"


class CliConfig(BaseModel):
    """Per-invocation settings; unset flags fall back to the global config."""

    order: Annotated[int, Field(ge=4)] = Field(default_factory=lambda: CONFIG.order)
    quad_nodes: Annotated[int, Field(ge=64)] = Field(default_factory=lambda: CONFIG.quad_nodes)
    tol: Annotated[float, Field(gt=0)] = Field(default_factory=lambda: CONFIG.tol)
    output: OutputFormat = OutputFormat.JSON
    m0: float = 0.0


@dataclass(frozen=True)
class CliResult:
    exit_code: int
    stdout: str


def _cli_config(**overrides: Any) -> CliConfig:
    return CliConfig(**{k: v for k, v in overrides.items() if v is not None})


def _parse_list(text: str, flag: str) -> list[float]:
    """Parse a comma-separated list of finite floats."""
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"malformed coefficient list for {flag}: {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"non-finite coefficient in {flag}: {text!r}")
    return values


def _variance(num: str, den: str, m0: float) -> RationalVarianceFunction:
    return RationalVarianceFunction(
        tuple(_parse_list(num, "--num")), tuple(_parse_list(den, "--den")), m0
    )


def _json_ready(value: Any) -> Any:
    """Integral floats become ints so `1.0` prints as `1`."""
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 2**53:
            return int(value)
        return value
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_ready(v) for v in value]
    return value


def _format_number(value: float) -> str:
    return json.dumps(_json_ready(float(value)))


def _render_json(model: BaseModel) -> str:
    payload = _json_ready(model.model_dump(mode="json"))
    return json.dumps(payload, separators=(",", ":"), allow_nan=False, ensure_ascii=False)


def _render_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_number(v) for v in row])
    return buffer.getvalue()


def _emit_sequence(values: Sequence[float], output: OutputFormat) -> None:
    if output is OutputFormat.CSV:
        typer.echo(_render_csv(("k", "value"), enumerate(values, start=1)), nl=False)
    else:
        typer.echo(_render_json(SequenceOutput(list(values))))


def _setup_logging(verbose: bool) -> None:
    if not verbose:
        return
    logging.basicConfig(
        level=logging.DEBUG,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


@app.callback()
def root(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log diagnostics to stderr"),
) -> None:
    """Free exponential families: variance functions, free cumulants and free Meixner laws."""
    _setup_logging(verbose)


@app.command()
def cumulants(
    num: str = typer.Option(..., "--num", help="Numerator coefficients of V, c0,c1,..."),
    den: str = typer.Option("1", "--den", help="Denominator coefficients of V"),
    m0: float = typer.Option(0.0, "--m0", help="Anchor mean"),
    order: int | None = typer.Option(None, "--order", "-N", help="Number of cumulants"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Free cumulants c_1..c_N of the measure generating (V, m0)."""
    cfg = _cli_config(order=order, output=output, m0=m0)
    c = cumulants_from_variance(_variance(num, den, cfg.m0), cfg.order)
    _emit_sequence(c.values, cfg.output)


@app.command()
def variance(
    values: str = typer.Option(..., "--cumulants", "-c", help="Cumulants c1,c2,..."),
    order: int | None = typer.Option(None, "--order", "-N", help="Taylor order (default N-2)"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Taylor coefficients of V about m0 = c_1."""
    series = variance_from_cumulants(
        CumulantSequence(tuple(_parse_list(values, "--cumulants"))), order
    )
    _emit_sequence(series.to_list(), output)


@app.command()
def moments(
    values: str = typer.Option(..., "--values", help="Cumulants (or moments with --inverse)"),
    inverse: bool = typer.Option(False, "--inverse", help="Convert moments to cumulants"),
    order: int | None = typer.Option(None, "--order", "-N", help="Output length"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Moments from free cumulants, or cumulants from moments with --inverse."""
    parsed = tuple(_parse_list(values, "--values"))
    if inverse:
        result = cumulants_from_moments(MomentSequence(parsed), order).values
    else:
        result = moments_from_cumulants(CumulantSequence(parsed), order).values
    _emit_sequence(result, output)


def _report_table(report: CheckOutput) -> Table:
    table = Table(show_header=True, header_style="bold")
    table.add_column("Check")
    table.add_column("Scope")
    table.add_column("Result")
    table.add_column("Witness")
    for check in report.checks:
        result = "[green]pass[/green]" if check.passed else "[red]fail[/red]"
        witness = ", ".join(f"{k}={v}" for k, v in check.witness.items())
        table.add_row(check.name.value, check.scope.value, result, witness)
    return table


@app.command()
def check(
    num: str = typer.Option(..., "--num", help="Numerator coefficients of V"),
    den: str = typer.Option("1", "--den", help="Denominator coefficients of V"),
    m0: float = typer.Option(0.0, "--m0", help="Anchor mean"),
    order: int = typer.Option(8, "--order", "-K", help="Hankel size"),
    window: float | None = typer.Option(None, "--window", help="z-map half window"),
    samples: int | None = typer.Option(None, "--samples", help="z-map samples per side"),
    table: bool = typer.Option(False, "--table", help="Render a table instead of JSON"),
) -> None:
    """Run the admissibility checks on a candidate variance function."""
    cfg = _cli_config(order=order, m0=m0)
    report = admissibility_report(_variance(num, den, cfg.m0), cfg.order, window, samples)
    payload = CheckOutput.model_validate(report.to_json())
    if not table:
        typer.echo(_render_json(payload))
        return
    out = Console(file=sys.stdout)
    out.print(_report_table(payload))
    verdict = "[green]admissible[/green]" if payload.overall else "[red]rejected[/red]"
    out.print(f"Overall: {verdict}")
    out.print(f"Free infinitely divisible generator: {payload.infinitely_divisible}")


def _density_csv(measure: Measure, points: int | None) -> str:
    return _render_csv(("x", "density"), density_table(measure, points))


@app.command()
def meixner(
    a: float = typer.Option(..., "--a", help="Linear coefficient of V = 1 + a m + b m^2"),
    b: float = typer.Option(..., "--b", help="Quadratic coefficient (b >= -1)"),
    output: OutputFormat = typer.Option(
        OutputFormat.JSON, "--output", "-o", help="json: atoms, csv: density"
    ),
    density: Path | None = typer.Option(None, "--density", help="Also write density CSV here"),
    points: int | None = typer.Option(None, "--points", help="Density grid size"),
    nodes: int | None = typer.Option(None, "--nodes", help="Quadrature nodes"),
) -> None:
    """Atoms (JSON) and density (CSV) of the free Meixner law with parameters (a, b)."""
    cfg = _cli_config(quad_nodes=nodes, output=output)
    measure = meixner_measure(MeixnerParams(a, b), nodes=cfg.quad_nodes)
    if density is not None:
        density.write_text(_density_csv(measure, points))
        logger.info("Wrote density to %s", density)
    if cfg.output is OutputFormat.CSV:
        typer.echo(_density_csv(measure, points), nl=False)
    else:
        typer.echo(_render_json(AtomsOutput.model_validate(atoms_payload(measure))))


@app.command()
def family(
    m: float = typer.Option(..., "--m", help="Mean of the family member"),
    generator: Generator = typer.Option(Generator.SEMICIRCLE, "--generator", "-g"),
    mean: float = typer.Option(0.0, "--mean", help="Semicircle mean"),
    sigma: float = typer.Option(1.0, "--sigma", help="Semicircle standard deviation"),
    a: float = typer.Option(0.0, "--a", help="Free Meixner a"),
    b: float = typer.Option(0.0, "--b", help="Free Meixner b"),
    num: str | None = typer.Option(None, "--num", help="Override V numerator"),
    den: str = typer.Option("1", "--den", help="Override V denominator"),
    m0: float | None = typer.Option(None, "--m0", help="Override anchor mean"),
    output: OutputFormat = typer.Option(OutputFormat.CSV, "--output", "-o"),
    points: int | None = typer.Option(None, "--points", help="Density grid size"),
    nodes: int | None = typer.Option(None, "--nodes", help="Quadrature nodes"),
) -> None:
    """Density of the member Q_m of the free exponential family of a generator."""
    cfg = _cli_config(quad_nodes=nodes, output=output)
    if generator is Generator.SEMICIRCLE:
        nu = semicircle_measure(mean, sigma, nodes=cfg.quad_nodes)
        natural = RationalVarianceFunction.constant(sigma * sigma, mean)
    else:
        params = MeixnerParams(a, b)
        nu = meixner_measure(params, nodes=cfg.quad_nodes)
        natural = params.variance_function()
    if num is not None:
        v = _variance(num, den, natural.m0 if m0 is None else m0)
    else:
        v = natural
    member = family_member(nu, v, m)
    if cfg.output is OutputFormat.CSV:
        typer.echo(_density_csv(member, points), nl=False)
        return
    payload = FamilyOutput.model_validate(
        {
            "description": member.description,
            "mass": member.total_mass(),
            "mean": member.mean(),
            "variance": member.variance(),
            "atoms": atoms_payload(member),
            "density": [{"x": x, "density": y} for x, y in density_table(member, points)],
        }
    )
    typer.echo(_render_json(payload))


@app.command()
def power(
    num: str = typer.Option(..., "--num", help="Numerator coefficients of V"),
    den: str = typer.Option("1", "--den", help="Denominator coefficients of V"),
    m0: float = typer.Option(0.0, "--m0", help="Anchor mean"),
    lam: float = typer.Option(..., "--lam", help="Free convolution power"),
    formal: bool = typer.Option(False, "--formal", help="Allow powers below 1"),
    order: int | None = typer.Option(None, "--order", "-N", help="Number of cumulants"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Cumulants of the dilated free convolution power generating V/lam."""
    cfg = _cli_config(order=order, output=output, m0=m0)
    c = reproductive_family(_variance(num, den, cfg.m0), lam, cfg.order, formal=formal)
    if cfg.output is OutputFormat.CSV:
        _emit_sequence(c.values, cfg.output)
        return
    typer.echo(_render_json(FormalSequenceOutput(cumulants=list(c.values), formal=c.formal)))


@app.command()
def convolve(
    left: str = typer.Option(..., "--left", help="Cumulants of the first law"),
    right: str = typer.Option(..., "--right", help="Cumulants of the second law"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Free convolution: cumulants add."""
    c = transform_cumulants(
        CumulantSequence(tuple(_parse_list(left, "--left"))),
        CumulantAction.CONVOLVE,
        other=CumulantSequence(tuple(_parse_list(right, "--right"))),
    )
    _emit_sequence(c.values, output)


@app.command()
def clt(
    values: str = typer.Option(..., "--values", help="Cumulants of a centered generator"),
    n: int = typer.Option(..., "--n", help="Number of free convolution factors"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Cumulants of the normalized n-fold free convolution."""
    c = clt_cumulants(CumulantSequence(tuple(_parse_list(values, "--values"))), n)
    _emit_sequence(c.values, output)


def _emit_convergence(report_dict: dict[str, Any], output: OutputFormat) -> None:
    payload = ConvergenceOutput.model_validate(report_dict)
    if output is OutputFormat.CSV:
        rows = zip(payload.grid, payload.distances, strict=True)
        typer.echo(_render_csv(("lambda", "distance"), rows), nl=False)
    else:
        typer.echo(_render_json(payload))


@app.command("mp-approx")
def mp_approx(
    num: str = typer.Option(..., "--num", help="Numerator coefficients of V"),
    den: str = typer.Option("1", "--den", help="Denominator coefficients of V"),
    m0: float = typer.Option(0.0, "--m0", help="Anchor mean"),
    m: float = typer.Option(..., "--m", help="Rescaled mean"),
    lam: str = typer.Option("100,1000,10000", "--lam", help="Increasing lambda grid"),
    order: int = typer.Option(8, "--order", "-K", help="Highest compared moment"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Moment distance to the Marchenko-Pastur member along a lambda grid."""
    cfg = _cli_config(order=order, output=output, m0=m0)
    report = mp_approximation(
        _variance(num, den, cfg.m0), _parse_list(lam, "--lam"), m, cfg.order
    )
    _emit_convergence(report.to_dict(), cfg.output)


@app.command()
def mora(
    num: str = typer.Option(..., "--num", help="Numerator coefficients of V"),
    den: str = typer.Option("1", "--den", help="Denominator coefficients of V"),
    m0: float = typer.Option(0.0, "--m0", help="Anchor mean"),
    lam: str = typer.Option("100,1000,10000", "--lam", help="Increasing lambda grid"),
    order: int | None = typer.Option(None, "--order", "-N", help="Number of cumulants"),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o"),
) -> None:
    """Cumulant distance from the zoomed V to its constant limit."""
    cfg = _cli_config(order=order, output=output, m0=m0)
    report = mora_check(_variance(num, den, cfg.m0), _parse_list(lam, "--lam"), cfg.order)
    _emit_convergence(report.to_dict(), cfg.output)


@app.command()
def schema(
    command: str = typer.Argument(..., help="Subcommand whose JSON output to describe"),
) -> None:
    """Print the JSON Schema of a subcommand's JSON output."""
    typer.echo(json.dumps(output_schema(command), separators=(",", ":"), sort_keys=True))


def _one_line(error: Exception) -> str:
    if isinstance(error, ValidationError):
        return "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'value'}: {err['msg']}"
            for err in error.errors()
        )
    return str(error).splitlines()[0] if str(error) else type(error).__name__


def _usage_error(error: Exception) -> tuple[int, str] | None:
    """Exit code and message of a click usage error, from whichever click build typer runs on."""
    code = getattr(error, "exit_code", None)
    format_message = getattr(error, "format_message", None)
    if isinstance(code, int) and callable(format_message):
        return code, str(format_message())
    return None


def _invoke(args: list[str]) -> int:
    """Run the app without click's standalone handling and map failures to exit codes."""
    if CONFIG_ERROR is not None:
        console.print(f"[red]Error:[/red] {escape(_one_line(CONFIG_ERROR))}")
        return 2
    command = typer.main.get_command(app)
    try:
        result = command.main(args=args, prog_name="freefam", standalone_mode=False)
    except typer.Abort:
        console.print("[red]Aborted[/red]")
        return 1
    except ValueError as e:
        # pydantic's ValidationError is a ValueError too
        console.print(f"[red]Error:[/red] {escape(_one_line(e))}")
        return 2
    except Exception as e:
        usage = _usage_error(e)
        if usage is not None:
            console.print(f"[red]Error:[/red] {escape(usage[1])}")
            return usage[0]
        logger.debug("Internal error", exc_info=True)
        console.print(f"[red]Error:[/red] {escape(_one_line(e))}")
        return 1
    return result if isinstance(result, int) else 0


def cli_run(argv: Sequence[str]) -> CliResult:
    """Run one command line and capture its stdout."""
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = _invoke(list(argv))
    return CliResult(exit_code=code, stdout=buffer.getvalue())


def main() -> None:
    sys.exit(_invoke(sys.argv[1:]))


if __name__ == "__main__":
    main()
