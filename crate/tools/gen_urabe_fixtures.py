#!/usr/bin/env python3
"""Regenerate the closed-form Urabe series fixtures for the ST26 family.

Each fixture lists the odd Taylor coefficients c1, c3, ... of h(xi) as exact
rationals. sympy does the expansion; the Rust core never sees the radicals.
"""
import json
import pathlib
import sys

import sympy as sp

xi = sp.symbols("xi")
ORDER = 41  # highest odd power kept



def closed_forms():
    s = sp.sqrt(4 + 2 * xi**2)
    yield "st26_b22_1_16", sp.sqrt(2) * xi * sp.sqrt(2 * xi**2 + 32) * (xi**2 + 12) / (
        2 * (xi**2 + 4) * (xi**2 + 16)
    )
    yield "st26_b22_0", sp.sqrt(2) * sp.sqrt((-4 + xi**2 + 2 * s) / xi**2) * xi * (xi**2 + 2 * s + 2) / (
        (2 + xi**2) * (s + 6)
    )


def main(out_dir):
    out = pathlib.Path(out_dir)
    for name, expr in closed_forms():
        ser = sp.series(expr, xi, 0, ORDER + 1).removeO()
        coeffs = [sp.Rational(ser.coeff(xi, i)) for i in range(ORDER + 1)]
        assert all(c == 0 for c in coeffs[0::2]), name
        odd = [str(c) for c in coeffs[1::2]]
        (out / f"{name}.json").write_text(json.dumps({"var": "xi", "odd_coeffs": odd}, indent=2) + "\n")
        print(name, odd[:4])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "fixtures")
