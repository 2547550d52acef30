"""Round trip Eta -> Xi -> Eta over a grid of angles, with the T^n conditioning."""
import numpy as np

from calabi_kee.core import ManifoldParams
from calabi_kee.profiles import solve_t, solve_T

for n, k in [(2, 1), (3, 1), (4, 3)]:
    p = ManifoldParams(n, k)
    worst, worst_scaled = 0.0, 0.0
    for f in np.linspace(0.02, 0.98, 49):
        eta = solve_T(p, f * n / k)
        back = solve_t(p, eta.beta2)
        err = abs(back.beta1 - eta.beta1)
        worst = max(worst, err)
        worst_scaled = max(worst_scaled, err / (np.spacing(eta.beta2) * eta.T**n))
    print(f"n={n} k={k}  max |beta1 round trip| {worst:.2e}  in units of ulp(beta2) T^n: {worst_scaled:.2f}")
