"""Smoke test for the bergman_hs Python extension.

Build and install first, e.g. `maturin develop --release -m crates/py/Cargo.toml`.
"""

import math

import bergman_hs as bh


def close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(abs(a), abs(b))


def main():
    ball = bh.Domain.ellipsoid([1.0, 1.0])
    assert ball.key == "ellipsoid:1,1" and ball.dimension == 2
    assert bh.Domain("polydisc:3").dimension == 3
    assert close(bh.log_c_squared(ball, [0, 0]), math.log(math.pi**2 / 2))
    assert close(bh.c_squared("disc", [4]), math.pi / 5)

    # Telescoping on the disc: S_α(N) → α from below.
    s = bh.s_alpha("disc", [2], 100_000)
    assert 2 - 1e-3 <= s <= 2, s

    # Diagonal lower bound on the bidisc grows linearly.
    trace = bh.series_trace("polydisc:2", [1, 1], [100, 200, 400], kind="diagonal")
    assert [n for n, _ in trace] == [100, 200, 400]
    assert trace[0][1] < trace[1][1] < trace[2][1]

    grid = [round(200 * 2 ** (k / 2)) for k in range(11)]
    report = bh.divergence_fit("ellipsoid:2,3", [1, 0], grid)
    assert report.verdict == "DivergesLinearly" and report.r_squared >= 0.99, report

    quad = bh.quadrature("ellipsoid:0.5,2", [3, 1], tol=1e-10)
    exact = bh.c_squared("ellipsoid:0.5,2", [3, 1])
    assert quad.method == "RadialQuadrature" and close(quad.value, exact, 1e-8), quad

    mc = bh.monte_carlo("ellipsoid:1,1,1", [0, 0, 0], samples=1_000_000, seed=7)
    assert mc.covers(math.pi**3 / 6), mc
    assert mc.sample_count == 1_000_000 and mc.seed == 7

    value, err = bh.gram_oracle_row_norm_squared("disc", [3], [1])
    assert abs(value - bh.row_norm_squared("disc", [3], [1])) <= err

    hs, dirichlet = bh.disc_dirichlet_check({1: 1.0, 3: 2j})
    assert close(hs, 13.0) and close(dirichlet, 13.0, 1e-10)
    assert bh.hs_norm_squared("disc", {1: 1.0, 3: 2j}, 1000) < 13.0

    assert len(bh.enumerate_order(3, 4)) == 15
    assert [j for j, _ in bh.dbar_diagnostic("ellipsoid:1,2", 30)] == [1, 2]
    lg, bound = bh.log_gamma(0.5)
    assert abs(lg - 0.5 * math.log(math.pi)) <= bound + 1e-15

    for bad in (lambda: bh.Domain("blob"), lambda: bh.s_alpha("disc", [1, 1], 5)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        bh.quadrature("polydisc:3", [0, 0, 0])
    except NotImplementedError as e:
        assert "polydisc:3" in str(e)
    else:
        raise AssertionError("expected NotImplementedError")

    print(f"bergman_hs {bh.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
