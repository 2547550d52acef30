"""Fiber length as the large angle approaches its bound.

Eta lengths blow up like gap^(-1/2); Xi lengths stay bounded. The last column
is L * sqrt(gap) for Eta and L for Xi.
"""
import math

from calabi_kee.core import ManifoldParams
from calabi_kee.geometry import fiber_length
from calabi_kee.profiles import solve_t, solve_T


def main():
    print(f"{'n':>2} {'k':>2} {'family':>6} {'gap':>8} {'length':>14} {'scaled':>12}")
    for n, k in [(2, 1), (2, 2), (3, 1)]:
        p = ManifoldParams(n, k)
        for m in range(1, 8):
            g = 10.0**-m
            L = fiber_length(solve_T(p, n / k - g))
            print(f"{n:>2} {k:>2} {'eta':>6} {g:>8.0e} {L:>14.6f} {L * math.sqrt(g):>12.8f}")
        for m in range(1, 8):
            g = 10.0**-m
            L = fiber_length(solve_t(p, 1 / k - g))
            print(f"{n:>2} {k:>2} {'xi':>6} {g:>8.0e} {L:>14.6f} {L:>12.8f}")
        print(f"   xi limit pi*sqrt(k/2) = {math.pi * math.sqrt(k / 2):.8f}")


if __name__ == "__main__":
    main()
