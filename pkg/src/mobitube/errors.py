class DegenerateFrame(ValueError):
    """The Frenet frame is undefined (vanishing curvature or speed)."""


class ClosureViolation(ValueError):
    """A curve submitted as closed does not match at the seam."""

    def __init__(self, quantity, residual):
        self.quantity = quantity
        self.residual = residual
        super().__init__(f"closure violated for {quantity}: residual {residual:.3e}")


class SelfContactSingular(ArithmeticError):
    """Two distinct surface coordinates map to the same point; the energy diverges."""

    def __init__(self, pair, chord_squared, dstar_squared):
        self.pair = pair
        self.chord_squared = chord_squared
        self.dstar_squared = dstar_squared
        super().__init__(
            f"self-contact at {pair}: |X-Y|^2={chord_squared:.3e}, d*^2={dstar_squared:.3e}"
        )


class SpecError(ValueError):
    """A configuration document failed to parse or validate."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
