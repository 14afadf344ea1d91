from typing import Optional

import click

from qhier_app.dependencies import apply_tolerances, bind_input, emit, load_model
from qhier_app.models import Suite
from qhier_app.verify.schemas import SVerifyReport
from qhier_app.verify.suites import run_suite


@click.command('verify')
@click.argument('source', required=False)
@click.option('--suite', type=click.Choice([s.value for s in Suite]), default=Suite.all.value, show_default=True)
@click.option('--seed', type=int, default=None, help='Overrides the global --seed for this run.')
@click.pass_context
def verify(ctx: click.Context, source: Optional[str], suite: str, seed: Optional[int]):
    """
    Runs a verification battery and prints its JSON report.

    SOURCE (an HSPEC path or a builtin such as heisenberg:4) adds model-specific checks.
    Exits 0 only if every check passes; failing check names go to stderr.
    """
    config = bind_input(ctx, source)
    seed = config.seed if seed is None else seed
    model = load_model(source) if source else None
    residuals = apply_tolerances(config, run_suite(Suite(suite), seed, model))
    report = SVerifyReport.of(suite, seed, source, residuals)
    emit(config, report.dump())
    for name in report.failures:
        click.echo(f'failed: {name}', err=True)
    if not report.passed:
        ctx.exit(1)
