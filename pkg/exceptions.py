"""Error hierarchy for the damped oscillator toolkit."""


class DampedOscillatorError(Exception):
    """Root of every error raised by this package."""


class ParameterError(DampedOscillatorError, ValueError):
    """Invalid physical constants."""


class CriticalDampingError(ParameterError):
    """omega == gamma: the critically damped branch is not treated."""

    def __init__(self, omega: float):
        super().__init__(
            f"critically damped case omega == gamma ({omega}) is not treated; "
            f"require omega > gamma"
        )


class OverdampedError(ParameterError):
    """omega < gamma."""

    def __init__(self, omega: float, gamma: float):
        super().__init__(
            f"overdamped parameters omega={omega} < gamma={gamma}; require omega > gamma"
        )


class SteppingError(DampedOscillatorError, ValueError):
    """Invalid integration horizon or step."""


class ModePairError(DampedOscillatorError, ValueError):
    """A mode pair whose partner is not the conjugate of z."""


class StateError(DampedOscillatorError, ValueError):
    """Malformed Fock state."""


class DimensionMismatchError(StateError):
    """Two Fock states truncated at different dimensions."""


class BackwardEvolutionError(DampedOscillatorError, ValueError):
    """Negative time handed to a forward-only evolution."""


class ExtinctStateError(DampedOscillatorError, ArithmeticError):
    """Norm of an evolved state underflowed."""


class SettlingUndefinedError(DampedOscillatorError, ValueError):
    """Asymptotic settling requested for an undamped system."""


class SignalError(DampedOscillatorError, ValueError):
    """Malformed control signal."""


class VerificationFailure(DampedOscillatorError):
    """At least one invariant check exceeded its tolerance."""
