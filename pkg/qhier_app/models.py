from enum import Enum as PyEnum


class Statistics(PyEnum):
    boson = "boson"
    fermion = "fermion"


class LadderKind(PyEnum):
    annihilate = "annihilate"
    create = "create"


class IntegrationMethod(PyEnum):
    implicit_midpoint = "implicit_midpoint"
    leapfrog_reim = "leapfrog_reim"


class LevelKind(PyEnum):
    phase_space = "phase_space"
    hilbert = "hilbert"


class Layout(PyEnum):
    padded_tensor = "padded"
    per_term_direct_sum = "directsum"


class Suite(PyEnum):
    phase = "phase"
    fock = "fock"
    hierarchy = "hierarchy"
    eclectic = "eclectic"
    open = "open"
    all = "all"


class Engine(PyEnum):
    exact = "exact"
    symplectic = "symplectic"
    lindblad = "lindblad"
    sse = "sse"


class Picture(PyEnum):
    schrodinger = "schrodinger"
    heisenberg = "heisenberg"


class ExtractionMethod(PyEnum):
    pure_reduced_state = "pure_reduced_state"
    eigenvector_interpolation = "eigenvector_interpolation"
