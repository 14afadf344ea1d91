import click

from qhier_app.dependencies import bind_input, csv_text, emit
from qhier_app.evolve.engines import initial_state, resolve_source, run_exact, run_lindblad, run_sse, run_symplectic
from qhier_app.evolve.schemas import SEvolveReport
from qhier_app.models import Engine, IntegrationMethod


@click.command('evolve')
@click.argument('source')
@click.option('--engine', type=click.Choice([e.value for e in Engine]), default='exact', show_default=True)
@click.option('--t', 't', type=float, default=1.0, show_default=True, help='Final time.')
@click.option('--dt', type=float, default=None,
              help='Step for symplectic (default 1e-3), sse (default 1e-3) and lindblad (default t/2000).')
@click.option('--points', type=int, default=20, show_default=True,
              help='Output intervals for exact and lindblad; checkpoints for sse.')
@click.option('--method', type=click.Choice([m.value for m in IntegrationMethod]), default='implicit_midpoint',
              show_default=True)
@click.option('--stride', type=int, default=1, show_default=True, help='Write every stride-th symplectic step.')
@click.option('--init', 'init', default='random', show_default=True, help='random | basis:<i>.')
@click.option('--omega', type=float, default=1.0, show_default=True, help='Frequency of the oscillator source.')
@click.option('--gamma', type=float, default=1.0, show_default=True, help='Damping rate of every sigma^- channel.')
@click.option('--n-traj', 'n_traj', type=int, default=1000, show_default=True)
@click.pass_context
def evolve(ctx: click.Context, source: str, engine: str, t: float, dt: float, points: int, method: str,
           stride: int, init: str, omega: float, gamma: float, n_traj: int):
    """
    Writes a trajectory of SOURCE as CSV (or a JSON report with --format json).

    SOURCE is an HSPEC path, heisenberg:<n>, heisenberg-ring:<n>, oscillator[:N] or damping.
    """
    config = bind_input(ctx, source)
    engine = Engine(engine)
    src = resolve_source(source, omega, config.cap)
    psi0 = initial_state(init, src.dim, config.rng('evolve.init'))
    if engine is Engine.exact:
        series = run_exact(src, psi0, t, points)
    elif engine is Engine.symplectic:
        dt = 1e-3 if dt is None else dt
        series = run_symplectic(src, psi0, t, dt, IntegrationMethod(method), stride)
    elif engine is Engine.lindblad:
        series = run_lindblad(src.lindblad(gamma), psi0, t, points, dt, config.cap)
    else:
        dt = 1e-3 if dt is None else dt
        series = run_sse(src.lindblad(gamma), psi0, t, dt, n_traj, config.seed, points)
    if (config.format or 'csv') == 'csv':
        emit(config, csv_text(series.header, series.rows))
    else:
        emit(config, SEvolveReport.of(engine.value, source, series, dt).dump())
