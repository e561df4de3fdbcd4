"""Continued fractions of reciprocal sums: exact sums, expansions and statistics."""

from fractions import Fraction

from ._core import (
    __version__,
    catalog_exponents,
    cf_expand,
    from_cf,
    khinchin_constant,
    levy_constant,
    reciprocal_sum,
    run_cli,
    running_khinchin,
    running_levy,
    to_decimal,
)

__all__ = [
    "__version__",
    "catalog_exponents",
    "cf_expand",
    "cf_of",
    "from_cf",
    "khinchin_constant",
    "levy_constant",
    "reciprocal_sum",
    "run_cli",
    "running_khinchin",
    "running_levy",
    "sum_fraction",
    "to_decimal",
]


def sum_fraction(kind="mersenne", count=12, exponents=()):
    p, q = reciprocal_sum(kind, count, list(exponents))
    return Fraction(p, q)


def cf_of(x):
    x = Fraction(x)
    return cf_expand(x.numerator, x.denominator)
