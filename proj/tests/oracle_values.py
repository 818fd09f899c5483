#!/usr/bin/env python3
"""Arbitrary-precision oracle for the frozen constants in test_bounds.cpp.

Evaluates every bound's closed form with mpmath at 50 decimal digits and
prints the anchor values that the C++ tests assert against. Rerun after any
change to a closed form and re-freeze the affected constants:

    python3 tests/oracle_values.py
"""

import mpmath as mp

mp.mp.dps = 50


def f_of_t(t):
    c = 2 + 3 * t + 2 * t * t
    return (c * c + 4 * t + 5) / (2 - 2 * t)


def thm1i(t):
    return t * f_of_t(t)


def gap_improved(t):
    # 1 - sqrt(1 - t^2); safe to write directly at 50 digits.
    return 1 - mp.sqrt(1 - t * t)


def thm1ii(t):
    g = gap_improved(t)
    h = t + (t + g) * (1 + t)
    return (t * t / 2 + h * h / 2 + g * (1 + t)) / (t * (1 - t))


def amenta_dey(t):
    return t / (1 - t)


def nsw(t):
    return 2 * mp.sqrt(t * (1 - t))


def bsw(t):
    return 2 * t * mp.sqrt(1 - t * t)


def lem1(t):
    return t * t / 2


def lem2(t):
    return 2 * t * t


def lem2imp(t):
    return gap_improved(t)


def sphere_lower(t):
    return t * mp.sqrt(1 - t * t / 4)


ANCHORS = [
    ("f_of_t", f_of_t, ["0.1", "0.2", "0.25"]),
    ("thm1i", thm1i, ["0.1", "0.25"]),
    ("thm1ii", thm1ii, ["0.01", "0.05", "0.095"]),
    ("amenta_dey", amenta_dey, ["0.25"]),
    ("nsw", nsw, ["0.3", "0.5"]),
    ("bsw", bsw, ["0.25"]),
    ("lem1", lem1, ["0.5"]),
    ("lem2", lem2, ["0.2"]),
    ("lem2imp", lem2imp, ["0.05", "0.095"]),
    ("sphere_lower", sphere_lower, ["1.0", "2.0"]),
]


def main():
    for name, fn, args in ANCHORS:
        for arg in args:
            value = fn(mp.mpf(arg))
            print(f"{name}({arg}) = {mp.nstr(value, 22)}")
    # Small-t slope ratios asserted to 1e-12 relative.
    for name, fn in [("thm1i", thm1i), ("thm1ii", thm1ii)]:
        t = mp.mpf("1e-6")
        print(f"{name}(1e-6)/1e-6 = {mp.nstr(fn(t) / t, 22)}")


if __name__ == "__main__":
    main()
