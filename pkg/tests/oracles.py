"""Independent brute-force oracles."""

from fractions import Fraction


def brute_merge(axes, K):
    """First K of all multiples (j*a_i, i, j), sorted, for rational axes.

    The first axis alone has K multiples up to K * min(axes), so nothing
    beyond that cutoff can be among the first K.
    """
    axes = sorted(Fraction(a) for a in axes)
    cut = K * axes[0]
    vals = []
    for i, a in enumerate(axes):
        j = 1
        while j * a <= cut:
            vals.append((j * a, i + 1, j))
            j += 1
    vals.sort()
    return vals[:K]


def brute_lcm(x: Fraction, y: Fraction) -> Fraction:
    """Smallest positive L that is an integer multiple of both, by scanning."""
    k = 1
    while True:
        L = k * x
        if (L / y).denominator == 1:
            return L
        k += 1
