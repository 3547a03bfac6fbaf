"""The SO(4) x SO(4) / diag SO(3) pair: each factor field has constant length, the sum does not."""

import numpy as np

from ckfields.catalog import build_product_pair, product_xi, so_diagonal_product, so_xi2
from ckfields.orbit import open_orbit_check
from ckfields.verifier import VerifyConfig, product_conditions


def main():
    prod = so_diagonal_product(4)
    pair = build_product_pair(prod)
    xi = product_xi(prod, (so_xi2(4), so_xi2(4)))
    oo = open_orbit_check(pair, xi)
    print(f"dim G/H = {pair.dim_m}, dim l = {oo.dim_l}, dim(l cap h) = {oo.dim_l_cap_h}")
    print(f"L-orbit through the base point has dimension {oo.dim_l - oo.dim_l_cap_h} < {pair.dim_m}")
    pc = product_conditions(prod, (so_xi2(4), so_xi2(4)), VerifyConfig(seed=1))
    for k in ("cond1", "cond2", "cond3", "cond4"):
        print(f"{k}: {getattr(pc, k)}")
    rep = pc.reports["cond1"]
    print(f"defect of the diagonal field: {rep.defect:.4f} (f ranges over [{rep.min_f:.4f}, {rep.max_f:.4f}])")
    print(f"implications hold: {pc.implications_ok}")
    np.set_printoptions(precision=3, suppress=True)


if __name__ == "__main__":
    main()
