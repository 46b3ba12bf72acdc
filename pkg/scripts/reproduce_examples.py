"""Write the two worked example pairs to JSON and run the checker on them.

    python3 scripts/reproduce_examples.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np

from lueq import CheckConfig, MultipartiteState, check_equivalence, write_state
from lueq.examples import bell_mixture_pair, three_qubit_pair
from lueq.gauge_search import GaugeUnitary
from lueq.realign_factor import realignment_svd


def show(name, S1, S2):
    v = check_equivalence(S1, S2, CheckConfig())
    print(f"{name}: {v.kind.value}, residual {v.residual:.2e}, pt subset {v.pt_subset}, "
          f"{v.reason['seconds_total']:.3f}s")
    with np.printoptions(precision=4, suppress=True):
        for k, u in enumerate(v.witness.factors, 1):
            print(f"  u{k} =\n{u}")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "examples_out")
    out.mkdir(parents=True, exist_ok=True)

    rho1, rho2, X, Y, U = bell_mixture_pair()
    S1, S2 = MultipartiteState(rho1, [2, 2]), MultipartiteState(rho2, [2, 2])
    write_state(S1, out / "ex1_rho1.json")
    write_state(S2, out / "ex1_rho2.json")
    sigma = realignment_svd(X @ U @ Y.conj().T, 2, 2).sigma
    print(f"example 1: singular values of realign(X U Y^dag) = {np.round(sigma, 12)}")
    show("example 1", S1, S2)

    rho1, rho2, X, Y, _ = three_qubit_pair(2, 3, 5)
    S1, S2 = MultipartiteState(rho1, [2, 2, 2]), MultipartiteState(rho2, [2, 2, 2])
    write_state(S1, out / "ex2_rho1.json")
    write_state(S2, out / "ex2_rho2.json")
    theta = np.array([0, 0, 0, np.pi, np.pi, 0, np.pi, 0])
    W = X @ GaugeUnitary.from_phases(theta).matrix @ Y.conj().T
    print(f"example 2: sigma_1 across the first cut = {realignment_svd(W, 2, 4).sigma[0]:.12f}")
    show("example 2", S1, S2)
    print(f"state files written to {out}/")


if __name__ == "__main__":
    main()
