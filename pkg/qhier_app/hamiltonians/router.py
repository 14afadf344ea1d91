import click

from qhier_app.dependencies import bind_input, emit, load_model
from qhier_app.exceptions import SpecParseError
from qhier_app.hamiltonians.hspec import render_spec, summary_table
from qhier_app.hamiltonians.schemas import SModelSummary


@click.command('parse')
@click.argument('source')
@click.option('--render', is_flag=True, help='Print the canonical HSPEC rendering instead of the summary.')
@click.option('--json', 'as_json', is_flag=True, help='Print the summary as a JSON report.')
@click.pass_context
def parse(ctx: click.Context, source: str, render: bool, as_json: bool):
    """
    Parses an HSPEC file (or a builtin model) and prints n, d, k, m and the m_k' table.

    Diagnostics go to stderr, one per line, and the command exits 1.
    """
    config = bind_input(ctx, source)
    try:
        model = load_model(source)
    except SpecParseError as error:
        for diagnostic in error.diagnostics:
            click.echo(f'{source}:{diagnostic}', err=True)
        ctx.exit(1)
    if render:
        emit(config, render_spec(model))
    elif as_json:
        emit(config, SModelSummary.of(model).dump())
    else:
        emit(config, summary_table(model))
