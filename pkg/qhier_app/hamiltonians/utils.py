import math


def parse_complex(token: str) -> complex:
    """
    Parses an HSPEC complex entry such as ``1``, ``-0.5i``, ``0.25-1e-3i``.

    Raises:
        ValueError: If the token is not a finite complex literal.
    """
    if 'j' in token or 'J' in token:
        raise ValueError(token)
    value = complex(token.replace('i', 'j'))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(token)
    return value


def format_complex(z: complex) -> str:
    """Shortest round-trip text of ``z`` in the ``a+bi`` form; keeps the sign of zero."""
    z = complex(z)
    sign = '-' if math.copysign(1.0, z.imag) < 0 else '+'
    return f'{z.real!r}{sign}{abs(z.imag)!r}i'
