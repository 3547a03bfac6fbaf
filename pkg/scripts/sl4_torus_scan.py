"""Scan every elliptic direction of sl(4,R) for constant length on SL(4,R)/Sp(2,R).

Elliptic elements of sl(4,R) are conjugate into the maximal torus of so(4),
xi = diag{a J, b J}.  Conjugating by Sp(2,R) and rescaling leaves the angle
phi = atan2(b, a) in [0, pi) as the only parameter, so a fine grid over phi
covers all elliptic directions up to the symmetries of the problem.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from ckfields.catalog import build_pair
from ckfields.lie_core import realify
from ckfields.orbit import is_elliptic, open_orbit_check
from ckfields.verifier import VerifyConfig, verify_constant_length

J = np.array([[0.0, -1.0], [1.0, 0.0]])


def torus_element(phi):
    X = np.zeros((4, 4))
    X[:2, :2] = np.cos(phi) * J
    X[2:, 2:] = np.sin(phi) * J
    return X


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=37)
    parser.add_argument("--samples", type=int, default=400)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", type=Path, default=Path("results/sl4_torus_scan.json"))
    args = parser.parse_args()

    pair = build_pair("sl(2n,R)/sp(n,R)", (2,)).pair
    cfg = VerifyConfig(n_samples=args.samples, seed=args.seed)
    rows = []
    for phi in np.linspace(0.0, np.pi, args.points, endpoint=False):
        xi = torus_element(phi)
        rep = verify_constant_length(pair, xi, cfg)
        oo = open_orbit_check(pair, xi)
        rows.append({"phi": float(phi), "verdict": rep.verdict, "defect": rep.defect,
                     "dim_l": oo.dim_l, "dim_l_cap_h": oo.dim_l_cap_h, "open": oo.is_open})
        print(f"phi={phi:6.4f}  {rep.verdict:13s} defect={rep.defect:.3e}  "
              f"dim l={oo.dim_l:2d}  dim l^h={oo.dim_l_cap_h}  open={oo.is_open}")

    # the element the positive family would need: i diag(-3, 1, 1, 1) has no real form
    target = 1j * np.diag([-3.0, 1.0, 1.0, 1.0])
    spectrum = np.sort_complex(np.linalg.eigvals(target))
    closed = np.allclose(spectrum, np.sort_complex(spectrum.conj()))
    print(f"spectrum of i diag(-3,1,1,1) closed under conjugation: {closed}")
    su4 = build_pair("su(2p,2q)/sp(p,q)", (2, 0)).pair
    print(f"(it does live in su(4): elliptic={is_elliptic(su4, realify(target)).elliptic})")

    n_const = sum(r["verdict"] == "constant" for r in rows)
    print(f"{n_const} of {len(rows)} torus directions have constant length")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({"rows": rows, "spectrum_closed_under_conjugation": bool(closed)}, indent=2))


if __name__ == "__main__":
    main()
