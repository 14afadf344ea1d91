"""
HSPEC: line-oriented text format for k-local qudit Hamiltonians.

    sites <n> <d>
    term [<i>,<j>,...] <PAULI-STRING> [<coeff>]      # d = 2 only
    term [<i>,<j>,...] mat [<coeff>]
      <d^k' lines of d^k' complex entries a+bi>

``#`` starts a comment. LF and CRLF line endings are accepted.
"""
import re

import numpy as np

from qhier_app.exceptions import Diagnostic, SpecParseError
from qhier_app.hamiltonians.model import KLocalHamiltonian, LocalTerm, validate
from qhier_app.hamiltonians.utils import format_complex, parse_complex
from qhier_app.hilbert.core import pauli_string

HEADER_RE = re.compile(r'^sites\s+(\S+)\s+(\S+)\s*$')
TERM_RE = re.compile(r'^term\s*\[([^\]]*)\]\s*(\S+)(?:\s+(\S+))?\s*$')
PAULI_RE = re.compile(r'^[IXYZ]+$')


def _strip(raw: str) -> str:
    return raw.split('#', 1)[0].rstrip('\r').rstrip()


def _column(raw: str, fragment: str) -> int:
    return raw.find(fragment) + 1 if fragment and fragment in raw else 1


class _Reader:
    def __init__(self, text: str):
        self.lines = text.replace('\r\n', '\n').split('\n')
        self.pos = 0

    def next_content(self):
        while self.pos < len(self.lines):
            number, raw = self.pos + 1, self.lines[self.pos]
            self.pos += 1
            content = _strip(raw)
            if content.strip():
                return number, raw, content.strip()
        return None


def _parse_header(number, raw, content, diagnostics):
    match = HEADER_RE.match(content)
    if not match:
        diagnostics.append(Diagnostic(number, _column(raw, content), 'missing sites header (expected "sites <n> <d>")'))
        return None
    values = []
    for token in match.groups():
        try:
            value = int(token)
        except ValueError:
            diagnostics.append(Diagnostic(number, _column(raw, token), f'expected a positive integer, got {token!r}'))
            return None
        if value < 1:
            diagnostics.append(Diagnostic(number, _column(raw, token), f'expected a positive integer, got {value}'))
            return None
        values.append(value)
    return tuple(values)


def _parse_sites(number, raw, body, diagnostics):
    tokens = [tok.strip() for tok in body.split(',')]
    if tokens == ['']:
        diagnostics.append(Diagnostic(number, _column(raw, '['), 'empty site list'))
        return None
    sites = []
    for token in tokens:
        try:
            sites.append(int(token))
        except ValueError:
            diagnostics.append(Diagnostic(number, _column(raw, token), f'bad site index {token!r}'))
            return None
    return tuple(sites)


def _parse_matrix(reader, size, diagnostics):
    rows = []
    for _ in range(size):
        entry = reader.next_content()
        if entry is None:
            diagnostics.append(Diagnostic(len(reader.lines), 1, f'matrix ended after {len(rows)} of {size} rows'))
            return None
        number, raw, content = entry
        tokens = content.split()
        if len(tokens) != size:
            diagnostics.append(Diagnostic(number, 1, f'expected {size} entries, got {len(tokens)}'))
            return None
        row = []
        for token in tokens:
            try:
                row.append(parse_complex(token))
            except ValueError:
                diagnostics.append(Diagnostic(number, _column(raw, token), f'bad complex entry {token!r}'))
                return None
        rows.append(row)
    return np.array(rows, dtype=complex)


def parse_spec(text: str) -> KLocalHamiltonian:
    """
    Parses HSPEC text into a model.

    Args:
        text: HSPEC document.

    Returns:
        KLocalHamiltonian: The parsed and validated model.

    Raises:
        SpecParseError: With every diagnostic found (line/column annotated).
    """
    reader = _Reader(text)
    diagnostics: list[Diagnostic] = []
    first = reader.next_content()
    if first is None:
        raise SpecParseError([Diagnostic(1, 1, 'missing sites header')])
    header = _parse_header(*first, diagnostics)
    if header is None:
        raise SpecParseError(diagnostics)
    n, d = header

    terms = []
    while (entry := reader.next_content()) is not None:
        number, raw, content = entry
        match = TERM_RE.match(content)
        if not match:
            diagnostics.append(Diagnostic(number, 1, f'syntax error: expected "term [sites] OP [coeff]", got {content!r}'))
            continue
        body, op_name, coeff_token = match.groups()
        sites = _parse_sites(number, raw, body, diagnostics)
        if sites is None:
            continue
        coeff = 1.0
        if coeff_token is not None:
            try:
                coeff = float(coeff_token)
            except ValueError:
                diagnostics.append(Diagnostic(number, _column(raw, coeff_token),
                                              f'coefficient must be real, got {coeff_token!r}'))
                continue
        if op_name == 'mat':
            matrix = _parse_matrix(reader, d ** len(sites), diagnostics)
            if matrix is None:
                continue
        elif PAULI_RE.match(op_name):
            if d != 2:
                diagnostics.append(Diagnostic(number, _column(raw, op_name),
                                              f'Pauli strings need d = 2, model has d = {d}'))
                continue
            if len(op_name) != len(sites):
                diagnostics.append(Diagnostic(number, _column(raw, op_name),
                                              f'Pauli string {op_name!r} has length {len(op_name)}, sites {len(sites)}'))
                continue
            matrix = pauli_string(op_name)
        else:
            diagnostics.append(Diagnostic(number, _column(raw, op_name), f'unknown operator {op_name!r}'))
            continue
        terms.append(LocalTerm(sites, coeff * matrix, label=op_name, line=number))

    model = KLocalHamiltonian(n=n, d=d, terms=tuple(terms))
    diagnostics.extend(validate(model))
    if diagnostics:
        raise SpecParseError(sorted(diagnostics, key=lambda diag: (diag.line, diag.column)))
    return model


def render_spec(h: KLocalHamiltonian) -> str:
    """Canonical HSPEC text; every term is written as an explicit matrix."""
    lines = [f'sites {h.n} {h.d}']
    for term in h.terms:
        sites = ','.join(str(s) for s in term.sites)
        lines.append(f'term [{sites}] mat' + (f'  # {term.label}' if term.label else ''))
        for row in term.matrix:
            lines.append(' '.join(format_complex(z) for z in row))
    return '\n'.join(lines) + '\n'


def summary_table(h: KLocalHamiltonian) -> str:
    counts = h.class_counts()
    lines = [f'n = {h.n}', f'd = {h.d}', f'k = {h.k}', f'm = {h.m}', "k'  m_k'"]
    lines += [f'{k:<3} {count}' for k, count in counts.items()]
    lines.append(f'full dim = {h.d ** h.n}')
    return '\n'.join(lines)
