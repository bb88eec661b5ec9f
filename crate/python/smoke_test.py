"""Smoke test for the contracta extension module.

Build and install first:

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import math

import contracta


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def unstable_1d():
    x = contracta.CSet.hypercube(1, 10.0)
    u = contracta.CSet.hypercube(1, 1.0)
    return contracta.System([[1.1]], [[1.0]], x, u)


def main():
    sys1 = unstable_1d()
    c = contracta.CSet.hypercube(1, 2.0)

    cert = contracta.compute_certificate(sys1, 0.8)
    close(cert["eta"], 1 / 1.1, 1e-12)

    assert contracta.iteration_bound(1 / 1.1, math.log(1.05), math.log(5.0), 1) == 37
    assert contracta.exact_k_oracle_1d(1.0, 0.01) == 47

    plan = contracta.epsilon_plan(sys1, 0.8, c, 0.05)
    assert plan["k"] == 37, plan["k"]

    summary, terminal = contracta.approximate_cmax1(sys1, 1.0, c, 0.01)
    assert summary["k_star"] == 47, summary["k_star"]
    assert contracta.CSet.hypercube(1, 10.0).scale(1 / 1.01).is_subset_of(terminal)

    sel = contracta.select_lambda(sys1, 0.98, c, 5 / 6)
    close(sel["lambda"], 0.9971, 5e-4)
    assert sel["k"] == 30

    qs = sys1.iterate(0.8, 3)
    assert len(qs) == 4
    half = 0.8 / 1.1
    close(qs[1].support([1.0]), 10 * half + 1 / 1.1, 1e-9)

    rot = contracta.System(
        [[0.0, 1.0], [-1.0, 0.0]],
        [[0.0], [1.0]],
        contracta.CSet.hypercube(2, 5.0),
        contracta.CSet.hypercube(1, 1.0),
    )
    a = contracta.CSet.hypercube(2, 1.0)
    b = contracta.CSet.symmetric_box([2.0, 1.0])
    d = contracta.set_distance(a, b)
    close(d["distance"], math.log(2.0), 1e-12)
    d2 = contracta.set_distance(rot.one_step(0.9, a), rot.one_step(0.9, b))
    close(d2["distance"], math.log(2.0), 1e-9)
    assert len(a.vertices()) == 4

    cert = rot.membership_certificate(0.9, a, [0.5, 0.5], 1)
    assert cert is not None and len(cert["inputs"]) == 2

    seed, rate = contracta.ellipsoid_seed(sys1, [[-0.5]], [[1.0]], 4.0, 0.7)
    assert seed.contains([1.9]) and not seed.contains([2.1])
    close(rate, 0.7, 1e-12)

    try:
        contracta.CSet([[1.0], [-1.0]], [1.0, -0.5])
    except ValueError:
        pass
    else:
        raise AssertionError("origin outside the set should be rejected")

    report = contracta.reproduce("stabilizable")
    assert report["checks"]["constant_ln2_within_1e-9"]
    assert not report["checks"]["controllable"]

    print(f"contracta {contracta.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
