"""Order-of-magnitude emission estimates for the physical presets.

    python scripts/thz_estimates.py --rabi-thz 1
"""
import argparse
import warnings

from asymrabi.scenarios import array_power, estimate, qd_array_preset


def show(title, data):
    print(f"\n{title}")
    for key in sorted(data):
        v = data[key]
        print(f"  {key:>28}: {v:.4g}" if isinstance(v, float) else f"  {key:>28}: {v}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rabi-thz", type=float, default=1.0)
    args = ap.parse_args()
    rabi_hz = args.rabi_thz * 1e12

    show("hydrogen, static field 1e5 V/cm", estimate("hydrogen", rabi_hz=rabi_hz))
    show("III-nitride quantum dot", estimate("qd", rabi_hz=rabi_hz))
    show("superconducting qubit (dimensionless)", estimate("qubit"))

    print("\ncoherent quantum-dot arrays (power scales as N^2)")
    omega_r = 2 * 3.141592653589793 * rabi_hz
    preset = qd_array_preset()
    for count in (1.0, 1e6, 1e7, None, 1e8):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            arr = array_power(preset, count, omega_r)
        note = "  (exceeds lambda_R^2 capacity)" if caught else ""
        label = "capacity" if count is None else f"{count:.0e}"
        print(f"  N = {label:>8} ({arr.count:.3g} dots): {arr.total_power:.3e} W{note}")


if __name__ == "__main__":
    main()
