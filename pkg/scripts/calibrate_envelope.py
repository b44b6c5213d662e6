"""Recalibrate the decay-envelope constants C_alpha and write the packaged
table src/fracrd/data/ml_envelope_calibration.txt.

The envelope C_alpha/(1+z) must dominate E_alpha(-z) on z >= 0; C_alpha is
the observed peak of (1+z) * E_alpha(-z) over a z-grid (the peak sits at
z = 0 where the product equals 1), padded by a small safety factor to absorb
the fast evaluator's own error.

Run from the repository root:  python scripts/calibrate_envelope.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from fracrd.special import write_envelope_calibration  # noqa: E402


def main():
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "fracrd" / "data"
    out.mkdir(parents=True, exist_ok=True)
    path = out / "ml_envelope_calibration.txt"
    write_envelope_calibration(path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
