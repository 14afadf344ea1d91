import click

from qhier_app.dependencies import RunConfig, apply_tolerances, emit
from qhier_app.exceptions import ArgumentError
from qhier_app.hierarchy.demos import oscillator_demo, potential_demo, qubit_demo
from qhier_app.models import Statistics


def _coefficients(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(',') if tok.strip()]
    except ValueError:
        raise ArgumentError(f'--potential expects comma separated numbers, got {text!r}')


def spectrum_line(report) -> str:
    level = next(lv for lv in report.levels if lv.kind == 'hilbert' and lv.index == 1)
    return 'spectrum: ' + ' '.join(format(round(v, 9) + 0.0, 'g') for v in level.spectrum)


@click.command('hierarchy')
@click.argument('example', type=click.Choice(['oscillator', 'potential', 'qubit']))
@click.option('--cutoff', 'cutoffs', type=int, multiple=True,
              help='N_tot per quantization step; repeat for later levels.')
@click.option('--omega', type=float, default=1.0, show_default=True)
@click.option('--potential', 'potential', default='0,0,1', show_default=True,
              help='Coefficients c0,c1,... of V(x) = sum c_k x^k.')
@click.option('--statistics', type=click.Choice([s.value for s in Statistics]), default='boson')
@click.pass_context
def hierarchy(ctx: click.Context, example: str, cutoffs: tuple[int, ...], omega: float, potential: str,
              statistics: str):
    """
    Runs a quantization-hierarchy demo and prints its JSON report.

    Exits 1 when a residual exceeds its tolerance.
    """
    config: RunConfig = ctx.obj
    rng = config.rng(f'hierarchy.{example}')
    if example == 'oscillator':
        report = oscillator_demo(omega, *(cutoffs[:2] or (5,)), rng=rng)
    elif example == 'potential':
        kwargs = {'cutoff': cutoffs[0]} if cutoffs else {}
        report = potential_demo(_coefficients(potential), rng=rng, **kwargs)
    else:
        report = qubit_demo(cutoff=cutoffs[0] if cutoffs else 2, statistics=Statistics(statistics), rng=rng)
    report = report.model_copy(update={'residuals': apply_tolerances(config, report.residuals)})
    click.echo(spectrum_line(report), err=True)
    emit(config, report.dump())
    if not report.passed:
        ctx.exit(1)
