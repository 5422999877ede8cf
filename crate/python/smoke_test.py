"""Smoke test for the nonunitary_lab Python extension.

Build and install first:

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml
    python python/smoke_test.py
"""

import math

import nonunitary_lab as nl


def main():
    spec = nl.ChainSpec.ring(32, 1.0)
    assert spec.dim == 64
    assert spec.boundary == "PBC"
    assert len(spec.spec_hash()) == 16
    again = nl.ChainSpec.from_json(spec.to_json())
    assert again.spec_hash() == spec.spec_hash()

    ev = nl.spectrum(spec)
    assert len(ev) == 64
    assert max(abs(z.imag) for z in ev) < 1e-6
    assert abs(sum(ev)) < 1e-9

    ep = nl.check_ep(spec)
    assert ep["exists"], ep
    assert not nl.check_ep(nl.ChainSpec.twisted(32, 1.0, math.pi / 2))["exists"]

    gs = nl.ground_state(spec)
    assert gs["ep_approached"]

    clean = nl.entropy_profile(nl.ChainSpec.ring(64, 0.0))
    assert len(clean) == 63
    fit = clean.fit()
    assert abs(fit.c - 1.0) < 0.1, fit
    print("clean ring:", fit.summary())

    curve = nl.entropy_profile(nl.ChainSpec.ring(64, 1.0))
    print("impurity ring:", curve.fit().summary())
    assert curve.fit().c < -1.5

    sizes = list(range(32, 129, 16))
    energies = nl.energy_vs_size(nl.ChainSpec.ring(8, 1.0), sizes)
    efit = nl.fit_energy(sizes, energies, "PBC")
    print("energy:", efit.summary())
    assert set(efit.coefficients) >= {"A", "eps_density", "B", "c"}

    fid = nl.fidelity_susceptibility(nl.ChainSpec.ring(16, 0.0), steps=20)
    assert len(fid["chi"]) == 20
    assert fid["chi"][-1] < 0

    try:
        nl.ChainSpec(1)
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("one-cell chain accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
