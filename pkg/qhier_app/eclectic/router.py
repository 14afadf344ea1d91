from pathlib import Path

import click
import numpy as np
import scipy.linalg

from qhier_app.config import settings
from qhier_app.dependencies import RunConfig, bind_input, emit, load_model, stream
from qhier_app.eclectic.schemas import SEclecticReport
from qhier_app.eclectic.system import (
    build_eclectic,
    dimension_report,
    eclectic_state,
    format_dimension_table,
    verify_energy_identity,
)
from qhier_app.exceptions import ArgumentError
from qhier_app.hamiltonians.model import KLocalHamiltonian, assemble_full
from qhier_app.hamiltonians.utils import parse_complex
from qhier_app.hilbert.core import StateVector, random_state


def parse_sweep(text: str) -> range:
    lo, sep, hi = text.partition(':')
    try:
        return range(int(lo), int(hi) + 1) if sep else range(int(lo), int(lo) + 1)
    except ValueError:
        raise ArgumentError(f'--sweep expects <lo>:<hi>, got {text!r}')


def resolve_state(spec: str, h: KLocalHamiltonian, config: RunConfig) -> tuple[np.ndarray, str]:
    """``random[:seed]``, ``groundstate`` or a file of whitespace separated complex amplitudes."""
    if spec == 'random' or spec.startswith('random:'):
        _, _, seed = spec.partition(':')
        try:
            rng = stream(int(seed), 'eclectic.state') if seed else config.rng('eclectic.state')
        except ValueError:
            raise ArgumentError(f'bad random seed in {spec!r}')
        return random_state(rng, h.full_dim), spec
    if spec == 'groundstate':
        _, vecs = scipy.linalg.eigh(assemble_full(h).matrix)
        return vecs[:, 0], spec
    try:
        tokens = Path(spec).read_text(encoding='utf-8').split()
    except OSError as exc:
        raise ArgumentError(f'cannot read state file {spec}: {exc.strerror}')
    try:
        amplitudes = np.array([parse_complex(tok) for tok in tokens], dtype=complex)
    except ValueError as exc:
        raise ArgumentError(f'bad amplitude in {spec}: {exc}')
    psi = StateVector(amplitudes)
    if psi.dim != h.full_dim:
        raise ArgumentError(f'state file has {psi.dim} amplitudes, model needs {h.full_dim}')
    return psi.unit().amplitudes, 'file'


@click.command('eclectic')
@click.argument('source')
@click.option('--state', 'state_spec', default='random', show_default=True,
              help='random[:seed] | groundstate | path to a file of amplitudes a+bi.')
@click.option('--sweep', default=None, help='Add Heisenberg chain rows for n in lo:hi to the dimension table.')
@click.pass_context
def eclectic(ctx: click.Context, source: str, state_spec: str, sweep: str):
    """
    Checks the eclectic energy identity for one state and prints the dimension table.

    The JSON report goes to stdout (or --out), the table to stderr. Exits 1 if |E_full - E_eclectic|
    exceeds its tolerance.
    """
    config = bind_input(ctx, source)
    h = load_model(source)
    psi, label = resolve_state(state_spec, h, config)
    system = build_eclectic(h, config.layout, config.cap)
    state = eclectic_state(psi, system, h)
    identity = verify_energy_identity(psi, system, h, state)
    rows = dimension_report(h, parse_sweep(sweep) if sweep else ())
    report = SEclecticReport.build(identity, system, label, [local.method for local in state.locals], rows)
    report.total.passed = identity.delta <= config.tolerance('eclectic.energy', settings.TOLERANCES.eclectic_energy)
    click.echo(format_dimension_table(rows), err=True)
    emit(config, report.dump())
    if not report.total.passed:
        ctx.exit(1)
