"""Smoke test for the qfc Python extension.

Build and install first:

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/qfc-*.whl
"""

import math

import qfc


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    bell = qfc.State.from_spec('{"kind": "max_entangled", "dims": [2, 2]}')
    assert bell.dims == (2, 2)
    close(bell.purity(), 1.0, 1e-12)

    close(qfc.q_pure(bell), 0.5, 1e-12)
    close(qfc.q_ah(bell).value, 0.5, 1e-4)
    close(qfc.q_api(bell, restarts=4, seed=3).value, 0.5, 1e-4)

    dq = qfc.entropic_discord(bell)
    close(dq.value, math.log(2), 1e-4)
    assert dq.method == "optimized" and dq.converged
    dg = qfc.geometric_discord(bell)
    assert dg.method == "closed_form" and dg.argopt is None

    f, v = qfc.qfi(bell, '{"kind": "pauli", "axis": "z", "party": "a"}')
    close(f, 1.0, 1e-12)
    close(v, 1.0, 1e-12)
    close(qfc.qfi_matrix([[0.75, 0], [0, 0.25]], [[0, 1], [1, 0]]), 0.25, 1e-12)

    cc = qfc.State.from_spec('{"kind": "cc", "probs": [0.4, 0.6], "dims": [2, 3]}')
    assert qfc.q_ah(cc).value <= 1e-6

    rho = [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]
    same = qfc.State.from_matrix(rho, (2, 2))
    close(qfc.q_pure(same), 0.5, 1e-12)
    noisy = same.with_white_noise(0.2)
    assert noisy.purity() < 1.0
    reduced = noisy.reduced("a")
    close(reduced[0][0].real, 0.5, 1e-12)

    try:
        qfc.State.from_spec('{"kind": "pure_schmidt", "coeffs": [0.8, 0.3], "dims": [2, 2]}')
    except ValueError as e:
        assert "sum" in str(e)
    else:
        raise AssertionError("invalid spec accepted")

    passed, measured, threshold, _ = qfc.verify(2)
    assert passed and measured <= threshold

    print("python smoke test passed")


if __name__ == "__main__":
    main()
