"""Exception types.

Singularities here are mostly physical (bound-state poles, wavefunction
nodes, band edges), so each gets its own class and callers can decide whether
to nudge the energy or give up.
"""


class QWImpedanceError(Exception):
    pass


class ProfileError(QWImpedanceError, ValueError):
    pass


class ProfileSyntaxError(ProfileError):
    def __init__(self, msg, line, column):
        super().__init__(f"{msg} (line {line}, column {column})")
        self.line = line
        self.column = column


class ProfileSemanticError(ProfileError):
    pass


class SingularInputError(QWImpedanceError, ValueError):
    """Zero wavenumber or impedance where a formula divides by it (E == U)."""


class ImpedanceMismatchError(QWImpedanceError, ValueError):
    pass


class ResonanceSingularityError(QWImpedanceError, ArithmeticError):
    """T11 == 0: a bound-state condition, not a scattering state."""


class ZeroTransmissionError(QWImpedanceError, ArithmeticError):
    pass


class NodeSingularityError(QWImpedanceError, ArithmeticError):
    """Impedance diverges: the wavefunction has a node at the evaluation point."""


class BoundStatePoleError(QWImpedanceError, ArithmeticError):
    """Z == -z_lead, the reflection amplitude has a pole."""


class NonUnimodularError(QWImpedanceError, ValueError):
    pass
