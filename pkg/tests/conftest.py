import os

os.environ['MODE'] = 'TEST'

import numpy as np
import pytest
from click.testing import CliRunner

from qhier_app.config import settings
from qhier_app.dependencies import stream


@pytest.fixture
def rng() -> np.random.Generator:
    assert settings.MODE == 'TEST'
    return stream(settings.QHIER_SEED, 'tests')


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner(mix_stderr=False)


HEISENBERG_3 = """\
# three-site open chain
sites 3 2
term [0,1] XX 1.0
term [0,1] YY 1.0
term [0,1] ZZ 1.0
term [1,2] XX
term [1,2] YY
term [1,2] ZZ
"""


@pytest.fixture
def heisenberg_text() -> str:
    return HEISENBERG_3


@pytest.fixture
def heisenberg_file(tmp_path, heisenberg_text):
    path = tmp_path / 'chain.hspec'
    path.write_text(heisenberg_text, encoding='utf-8')
    return path
