#!/usr/bin/env python3
"""Smoke test for the spdc_spiral extension module.

Locates the compiled cdylib (preferring the release build), exposes it as an
importable module in build/python, and exercises the main types and
operations end to end.

Usage:
    cargo build -p spdc-py --release
    python3 python/smoke_test.py
"""

import cmath
import math
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def stage_module() -> Path:
    candidates = [
        ROOT / "target" / "release" / "libspdc_spiral.so",
        ROOT / "target" / "debug" / "libspdc_spiral.so",
        ROOT / "target" / "release" / "libspdc_spiral.dylib",
        ROOT / "target" / "debug" / "libspdc_spiral.dylib",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("no compiled library found; run `cargo build -p spdc-py --release` first")
    newest = max(built, key=lambda p: p.stat().st_mtime)
    stage = ROOT / "build" / "python"
    stage.mkdir(parents=True, exist_ok=True)
    target = stage / "spdc_spiral.so"
    shutil.copy2(newest, target)
    sys.path.insert(0, str(stage))
    return newest


def close(a, b, tol):
    return abs(a - b) <= tol * max(abs(b), 1e-12)


def main():
    lib = stage_module()
    import spdc_spiral as ss

    print(f"loaded {lib}")

    # Parameter construction: physical and normalized routes agree.
    p = ss.Params.from_widths(1.0, 1.0)
    p_phys = ss.Params.from_physical(1.0e-3, 0.4e-6, 1.0, 20e-6, 20e-6)
    assert close(p_phys.a, p.a, 1e-12) and close(p_phys.b, p.b, 1e-12), "parameter mapping"
    print(f"params: {p}")

    # Special functions and mode values.
    assert ss.laguerre(0, 3, 7.2) == 1.0
    assert ss.laguerre(2, 0, 2.0) == -1.0
    v = ss.lg_mode(0, 0, 2.0, 0.0, 0.3)
    assert close(v, math.sqrt(4.0 / (2.0 * math.pi)), 1e-12), "fundamental mode at origin"
    assert ss.lg_mode(2, 0, 2.0, 0.0, 0.0) == 0

    # Normalization integrals.
    w = ss.w_plane_norm()
    assert close(w, 4.0, 1e-4), f"|W|^2 integral {w}"
    phi = ss.phi_norm(p)
    assert abs(phi - 1.0) < 1e-3, f"|Phi|^2 integral {phi}"
    print(f"norms: |W|^2 -> {w:.6f}, |Phi|^2 -> {phi:.6f}")

    # Selection rule and the three amplitude routes.
    zero, _ = ss.reduced_amplitude(p, 1, 0, 0, 0, pump_l0=0)
    assert zero == 0
    closed = ss.closed_amplitude(p, 1, -1)
    reduced, err_r = ss.reduced_amplitude(p, 1, 0, -1, 0, pump_l0=0)
    brute, err_b = ss.brute_amplitude(p, 1, 0, -1, 0, pump_l0=0)
    assert close(closed, reduced, 1e-6), "closed vs reduced"
    assert close(closed, brute, 1e-4), "closed vs brute"
    print(f"C(1,-1) = {closed:.12f} (reduced err {err_r:.1e}, brute err {err_b:.1e})")

    # Phase structure: same-sign pairs share a phase, opposite-sign do not.
    ref = cmath.phase(ss.closed_amplitude(p, 0, 0))
    assert abs(cmath.phase(ss.closed_amplitude(p, 1, 1)) - ref) < 1e-9
    assert abs(cmath.phase(closed) - ref) > 0.1

    # Spiral spectrum: symmetric for a Gaussian pump, bounded norm.
    spec = ss.spiral_spectrum(p, 0, 4, 3)
    weights = {l1: P for (l1, l2, P) in spec}
    assert all(l1 + l2 == 0 for (l1, l2, _) in spec)
    for l in range(1, 5):
        assert close(weights[l], weights[-l], 1e-8), f"asymmetry at l={l}"
    captured = sum(weights.values())
    assert captured < 1.0 + 1e-3
    print(f"spectrum captured norm (l_max=4, p_max=3): {captured:.4f}")

    norm = ss.state_norm(p, 0, 6, 4)
    assert captured < norm <= 1.0 + 1e-3

    # Entanglement metrics grow with the pump width.
    m1 = ss.entropy_metrics(p, 0, 12)
    m25 = ss.entropy_metrics(ss.Params.from_widths(2.5, 1.0), 0, 12)
    assert m1["subspace_fraction"] > 0.40
    assert m25["entropy_bits"] > m1["entropy_bits"]
    assert m25["bandwidth_99"] > m1["bandwidth_99"]
    print(
        "entropy: {:.3f} bits (wbar_p=1) -> {:.3f} bits (wbar_p=2.5), "
        "K {:.2f} -> {:.2f}".format(
            m1["entropy_bits"], m25["entropy_bits"],
            m1["schmidt_number"], m25["schmidt_number"],
        )
    )

    # Ladder coefficients: ratio matches the closed-form amplitudes at
    # wbar_0 = 1, and each gamma_n inherits the pump coefficient's phase.
    pump = [(0, 1.0 + 0.0j), (2, cmath.exp(0.9j))]
    g0 = ss.gamma_ladder(pump, 0, p)
    g1 = ss.gamma_ladder(pump, 1, p)
    a0 = ss.closed_amplitude(p, 0, 0)
    a1 = cmath.exp(0.9j) * ss.closed_amplitude(p, 1, 1)
    assert close(g1 / g0, a1 / a0, 1e-10), "ladder ratio"
    assert abs(cmath.phase(g1) - 0.9) < 1e-12, "ladder phase"

    # Coefficient list round trip.
    coeffs = ss.restricted_coefficients(p, 1, 6)
    total = sum(abs(c) ** 2 for (_, _, c) in coeffs)
    assert close(total, 1.0, 1e-10), "renormalized subspace"

    print("smoke test passed")


if __name__ == "__main__":
    main()
