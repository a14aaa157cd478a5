"""Signal types shared across the workbench modules."""


class NearSingular(Exception):
    """Raised when an evaluation lands on (or numerically at) the singular set.

    Carries the offending point and denominator value so callers can decide
    whether to mask, refine, or abort.
    """

    def __init__(self, alpha, t, denominator):
        self.alpha = alpha
        self.t = t
        self.denominator = denominator
        super().__init__(
            f"denominator {denominator:.3e} at (alpha={alpha!r}, t={t!r}) "
            "is within the singular guard"
        )


class NoFiniteTime(Exception):
    """Raised when a G-inversion target is not reached in finite time.

    This is the numerical counterpart of global existence: the accumulated
    boundary integral never grows past the requested level.
    """

    def __init__(self, target, g_infinity):
        self.target = target
        self.g_infinity = g_infinity
        super().__init__(
            f"G never reaches {target!r} (limit {g_infinity!r}); no finite time exists"
        )


class EmptyCurve(Exception):
    """Raised when a singular curve is requested but psi0 <= 0 everywhere."""
