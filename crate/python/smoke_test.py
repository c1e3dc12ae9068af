"""Smoke test for the dirac_nu_py extension.

Build and install first:  cd crates/python && maturin develop --release
"""

import math

import dirac_nu_py as dn


def main():
    hellmann = dn.Potential.hellmann(0.25, 0.20, 0.02)
    spin = dn.Symmetry.spin(10.0, 10.0)

    level = dn.energy_closed_form(hellmann, spin, 0, -2)
    assert f"{level.selected:.7f}" == "9.9995294", level
    assert level.method == "closed_form"

    # the reference spin parameters only reach a non-normalizable NU root
    roots = dn.energy_nu(hellmann, spin, 0, -2)
    assert roots and all(r.normalizable is False for r in roots), roots

    deep = dn.Potential.hellmann(1.0, 0.2, 0.02)
    nu = next(r for r in dn.energy_nu(deep, spin, 0, -2) if r.normalizable)
    oracle = dn.energy_oracle(deep, spin, 0, -2)
    assert abs(nu.eps - oracle.eps) < 1e-6 * abs(oracle.eps), (nu, oracle)

    r, f, g = dn.wavefunction(deep, spin, 1, -2, 0.05, 1500.0, points=4000)
    assert len(r) == len(f) == len(g) == 4000
    nodes = sum(1 for a, b in zip(f, f[1:]) if a * b < 0)
    assert nodes == 1, nodes
    norm = sum(0.5 * (r[i + 1] - r[i]) * (f[i] ** 2 + g[i] ** 2 + f[i + 1] ** 2 + g[i + 1] ** 2) for i in range(len(r) - 1))
    assert math.isclose(norm, 1.0, rel_tol=1e-9), norm

    assert math.isclose(dn.jacobi(1, 0.5, 1.5, 0.3), 0.5 * (0.5 - 1.5) + 0.5 * (0.5 + 1.5 + 2) * 0.3)
    assert math.isclose(dn.jacobi_derivative(1, 0.5, 1.5, 0.3), 0.5 * (0.5 + 1.5 + 2))

    rows = dn.table(6)
    assert len(rows) == 16 and f"{rows[0][3]:.7f}" == "5.0000001"

    assert dn.Potential.varshni(0.15, 0.15, 0.001)(1e9) > 0.149
    for bad in (lambda: dn.Potential.hellmann(0.25, 0.2, -1.0), lambda: dn.energy_closed_form(hellmann, spin, 0, 0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
