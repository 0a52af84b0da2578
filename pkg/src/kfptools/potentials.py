"""The worked potentials used throughout the toolkit's checks."""
from .polynomial import Polynomial


def example1() -> Polynomial:
    """V = -q1^2 q2^2."""
    return Polynomial(2, {(2, 2): -1})


def example2(n: int) -> Polynomial:
    """V = -q1^2 (q1^2 + q2^2)^n."""
    q1, q2 = Polynomial.variables(2)
    return -(q1 ** 2) * (q1 ** 2 + q2 ** 2) ** n


def example3(eps: float) -> Polynomial:
    """V = (q1^2 - q2)^2 + eps q2^2."""
    q1, q2 = Polynomial.variables(2)
    return (q1 ** 2 - q2) ** 2 + eps * q2 ** 2


def harmonic(d: int = 1) -> Polynomial:
    """V = |q|^2 / 2."""
    return sum((Polynomial.variable(i, d) ** 2 for i in range(d)), Polynomial(d)) * 0.5


def quartic(d: int = 1) -> Polynomial:
    """V = |q|^4 / 4 in d = 1 (sum of q_i^4 / 4 otherwise)."""
    return sum((Polynomial.variable(i, d) ** 4 for i in range(d)), Polynomial(d)) * 0.25
