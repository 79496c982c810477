"""Smoke test for the acqudit extension module.

Build and install first:
    cd crates/py && maturin build --release -o dist && pip install dist/acqudit-*.whl
"""
import cmath
import json
import math
import os
import tempfile

import acqudit


def main():
    g = acqudit.complex_gamma(complex(1.0, 1.0))
    assert abs(abs(g) ** 2 - math.pi / math.sinh(math.pi)) < 1e-12
    assert abs(acqudit.abs_gamma_sq(2.0 + 0j) - 1.0) < 1e-13
    try:
        acqudit.complex_gamma(-2 + 0j)
    except RuntimeError:
        pass
    else:
        raise AssertionError("pole not rejected")

    try:
        acqudit.Model(2.0, 1.0, 2.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("trap with two bound states accepted")

    m = acqudit.Model(2.0, 1.0, 0.5, 1.0, n_eps=40, n_k=40)
    assert abs(m.n_param - (math.sqrt(2.0) - 0.5)) < 1e-12

    traj = m.solve(1.0, 1.5, n_t=64)
    assert len(traj) == 64 and traj.v[0] == 0.0
    assert abs(traj.v[-1] - 1.5 * acqudit.C_SOUND) < 1e-14
    opt = m.survival(traj)
    const = m.survival(m.constant_speed(1.0, 1.5, 64))
    cdf = m.survival_cdf(traj)
    assert 0.0 < const.survival <= opt.survival <= 1.0
    print(f"P_opt={opt.survival:.6f} P_const={const.survival:.6f} P_cdf={cdf.survival:.6f}")

    back = m.solve_position(1.0, traj.x_final, n_t=64, tol=1e-12)
    assert abs(back.x_final - traj.x_final) < 1e-9

    rest = acqudit.Trajectory(1.0, [0.0] * 64)
    vac = acqudit.Model(2.0, 1.0, 0.5, 0.0, n_eps=40, n_k=40)
    assert vac.survival(rest).survival == 1.0
    assert all(cmath.isfinite(v) for v in m.solve(1.0, 1.5, protocol="picard", n_t=64).v)

    cfg = {
        "trap": {"depth_d": 2.0, "width_a": 1.0, "mass_m": 0.5},
        "bath": {"g_tilde": 1.0, "n_eps": 24, "n_k": 24},
        "grid": {"t_f": 1.0, "n_t": 48},
        "protocol": "acqudit_linear",
        "bc": {"kind": "velocity", "vf_c": 1.5},
    }
    with tempfile.TemporaryDirectory() as d:
        h = acqudit.run_config(json.dumps(cfg), d)
        assert len(h) == 64
        assert sorted(os.listdir(d)) == ["comparison.csv", "manifest.json", "trajectory.csv"]
    print("smoke test ok")


if __name__ == "__main__":
    main()
