from typing import Optional

import click

from qhier_app.dependencies import QhierGroup, cap_override, get_run_config
from qhier_app.eclectic.router import eclectic
from qhier_app.evolve.router import evolve
from qhier_app.hamiltonians.router import parse
from qhier_app.hierarchy.router import hierarchy
from qhier_app.logger import configure_logging
from qhier_app.models import Layout
from qhier_app.verify.router import verify


@click.group(cls=QhierGroup)
@click.option('--seed', type=int, default=None, help='Root seed of every random stream (default QHIER_SEED).')
@click.option('--tol', multiple=True, metavar='PATTERN=VALUE',
              help='Tolerance override for checks matching a shell-style pattern; repeatable.')
@click.option('--cap', type=int, default=None, help='Dimension cap (default QHIER_CAP).')
@click.option('--layout', type=click.Choice([layout.value for layout in Layout]), default=Layout.padded_tensor.value,
              show_default=True, help='Eclectic layout.')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None,
              help='Write the report here instead of stdout.')
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default=None,
              help='Output format where a command offers both.')
@click.option('--log-level', default=None, help='Logging level (default QHIER_LOG_LEVEL).')
@click.pass_context
def app(ctx: click.Context, seed: Optional[int], tol: tuple[str, ...], cap: Optional[int], layout: str,
        out: Optional[str], fmt: Optional[str], log_level: Optional[str]):
    """Quantization workbench: Fock lifts, hierarchies, eclectic models and open dynamics."""
    configure_logging(log_level)
    config = get_run_config(seed, tol, cap, layout, out, fmt)
    ctx.obj = config.model_copy(update={'command': ctx.invoked_subcommand or ''})
    ctx.with_resource(cap_override(config.cap))


app.add_command(parse)
app.add_command(hierarchy)
app.add_command(eclectic)
app.add_command(verify)
app.add_command(evolve)


if __name__ == '__main__':
    app()
