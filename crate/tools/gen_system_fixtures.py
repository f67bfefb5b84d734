#!/usr/bin/env python3
"""Write the system-definition fixtures used by the tests and examples."""
import json
import pathlib
import sys

import sympy as sp

x = sp.symbols("x")
R = sp.Rational


def terms(expr, params):
    poly = sp.Poly(sp.expand(expr), x, *params)
    out = []
    for monom, coeff in sorted(poly.terms(), key=lambda t: t[0]):
        ps = {str(p): e for p, e in zip(params, monom[1:]) if e}
        if coeff == 0:
            continue
        out.append({"coeff": str(sp.Rational(coeff)), "x": monom[0], "params": ps})
    return out


def planar(name, params, p1, q0, q2, q1=0, p0=0):
    body = {"p1": terms(p1, params), "q0": terms(q0, params), "q2": terms(q2, params)}
    if q1 != 0:
        body["q1"] = terms(q1, params)
    if p0 != 0:
        body["p0"] = terms(p0, params)
    return {"name": name, "parameters": [str(p) for p in params], "planar": body}


def lienard(name, params, f_num, f_den, g_num, g_den=1):
    rt = lambda n, d: {"num": terms(n, params), "den": terms(d, params)}
    return {
        "name": name,
        "parameters": [str(p) for p in params],
        "lienard": {"f": rt(f_num, f_den), "g": rt(g_num, g_den)},
    }


def systems():
    a11, a21, a31, b20, b30, b40, b02, b12, b22 = ps = sp.symbols("a11 a21 a31 b20 b30 b40 b02 b12 b22")
    yield "quartic", planar(
        "quartic perturbation of the linear center",
        list(ps),
        -1 + a11 * x + a21 * x**2 + a31 * x**3,
        x + b20 * x**2 + b30 * x**3 + b40 * x**4,
        b02 + b12 * x + b22 * x**2,
    )
    yield "st26", planar(
        "quartic family st26",
        [b22],
        -1 + x + (-R(3, 8) - 2 * b22) * x**2 + (R(1, 16) + b22) * x**3,
        x - R(3, 4) * x**2 + R(3, 8) * x**3 - x**4 / 16,
        R(1, 4) - 2 * b22 * x + b22 * x**2,
    )
    # Reduced by hand with z = y - x^2, which removes p0 and q1.
    yield "cub1", lienard("cubic family cub1", [b20], -6 * b20, 1 + 2 * b20 * x, x * (1 + 2 * b20 * x) * (1 + b20 * x))
    yield "cub2", lienard("cubic family cub2", [b20], -3 * b20 / 2, 1 + b20 * x / 2, x * (1 + b20 * x / 2) ** 3)
    yield "linear_center", lienard("linear center", [], 0, 1, x)
    yield "linear_center_planar", planar("linear center", [], -1, x, 0)
    yield "quadratic_g", lienard("quadratic restoring force", [b20], 0, 1, x + b20 * x**2)
    yield "not_reducible", planar("planar system with a linear y term", [], -1, x, 0, q1=x)


def main(out_dir):
    out = pathlib.Path(out_dir)
    for stem, data in systems():
        (out / f"{stem}.json").write_text(json.dumps(data, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "fixtures")
