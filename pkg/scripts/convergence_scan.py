"""Sup deviations of (tau, phi) from the limit models, decade by decade."""
import argparse

from calabi_kee.core import Family, ManifoldParams
from calabi_kee.limits import convergence_report, cylinder_report

RUNS = [((2, 2), "eta", "eh"), ((2, 2), "xi", "orb"), ((3, 1), "eta", "eh"), ((3, 1), "xi", "orb")]


def main(decades: int):
    for (n, k), fam, target in RUNS:
        p = ManifoldParams(n, k)
        top = p.angle_bound(Family.parse(fam))
        rep = convergence_report(p, fam, target, [top - 10.0**-m for m in range(1, decades + 1)])
        print(f"{fam}({n},{k}) -> {target}")
        for beta, dt, dp, ok in zip(rep.betas, rep.sup_tau_dev, rep.sup_phi_dev, rep.gauge_matched):
            print(f"  gap {top - beta:8.1e}  tau {dt:10.3e}  phi {dp:10.3e}  {'' if ok else '(midpoint gauge)'}")
    for n, k in [(2, 2), (3, 1)]:
        for fam in Family:
            rep = cylinder_report(ManifoldParams(n, k), fam, [10.0**-m for m in range(2, decades + 1)])
            print(f"{fam.value}({n},{k}) -> cylinder")
            for beta, dp in zip(rep.betas, rep.sup_phi_dev):
                print(f"  beta {beta:8.1e}  phi/beta^2 dev {dp:10.3e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--decades", type=int, default=6)
    main(ap.parse_args().decades)
