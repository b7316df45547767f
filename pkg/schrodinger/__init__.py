from fractions import Fraction

DEFAULT_SYMBOLS = ("a", "nu", "omega", "u", "b")

# Dimensions with [t] = -1, [x] = -1/2; u shifts the potential, b shifts x.
SYMBOL_GRADES = {
    "a": Fraction(0),
    "nu": Fraction(1),
    "omega": Fraction(3, 2),
    "u": Fraction(1),
    "b": Fraction(-1, 2),
}

# Instantiation used by the numeric oracles.
SAMPLE_VALUES = {
    "a": Fraction(-1),
    "nu": Fraction(1, 2),
    "omega": Fraction(3),
    "u": Fraction(2),
    "b": Fraction(1, 4),
}

RESERVED_NAMES = frozenset({"t", "x", "Dt", "Dx", "exp"})

DEFAULT_SEED = 0
