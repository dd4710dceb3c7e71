"""Convergence study for two steady boundary-value benchmarks.

The first case is a second-order equation with Dirichlet data whose exact
solution is sinh(x)/(1 + cosh(x)); the second is fifth order with five
endpoint conditions (values, slopes, and one third derivative).  Both are
solved by collocation in a boundary-constrained kernel subspace; the order
m of the space controls the convergence rate.
"""

import numpy as np

from rkcolloc import run_case

print("u'' = f on [-1, 1], Dirichlet walls")
print(f"{'N':>5} {'m=3':>12} {'m=5':>12}")
for n in (10, 25, 50, 100):
    cells = [run_case("ex1", m=m, n=n).linf for m in (3, 5)]
    print(f"{n:>5} {cells[0]:>12.4e} {cells[1]:>12.4e}")

print()
print("u^(5) + u = g on [0, 1], five endpoint conditions")
print(f"{'N':>5} {'m=6':>12} {'m=8':>12}")
for n in (13, 26, 52):
    cells = [run_case("ex2", m=m, n=n).linf for m in (6, 8)]
    print(f"{n:>5} {cells[0]:>12.4e} {cells[1]:>12.4e}")

print()
print("each doubling of N buys roughly m-and-a-bit digits; the fifth-order")
print("problem needs extended precision internally (the float64 Gram matrix")
print("is numerically rank deficient there), which run_case handles itself.")
