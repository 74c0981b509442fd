"""Build the delay Lyapunov matrix of the rotation-coupled example.

The system is

    x'(t) = A0 x(t) + A1 x(t - 1) + int_{-1}^{0} K(th) x(t + th) dth

with A0 = -I, A1 a quarter-turn rotation, and the kernel
K(th) = sin(pi th) B0 + cos(pi th) B1 with B0 = 0.3 I, B1 = A1 B0.
For the identity weight the Lyapunov matrix at zero lag comes out as
0.7072 times the identity, which makes the example a handy smoke test.

Run as:  python3 demos/solve_and_tabulate.py
"""

import numpy as np

from delaylyap import P_at, TimeDelaySystem, Weight, sincos_kernel, solve

np.set_printoptions(precision=6, suppress=True)

# system matrices
A0 = -np.eye(2)
A1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
B0 = 0.3 * np.eye(2)
B1 = A1 @ B0

# factor the sine/cosine kernel into exponential form
Ad, Bd, Cd = sincos_kernel(B0, B1, np.pi)
sys = TimeDelaySystem(A0, A1, Ad, Bd, Cd, h=1.0)
print("state dimension n = %d, kernel internal dimension nd = %d"
      % (sys.n, sys.internal_dim))

sol = solve(sys, Weight(np.eye(2)))
print("solvability: %s (relative sigma_min = %.3e)"
      % (sol.spectrum.verdict, sol.spectrum.relative))
print()

print("P(0) =")
print(P_at(sol, 0.0))
print("expected 0.7072 * I, difference %.2e"
      % np.max(np.abs(P_at(sol, 0.0) - 0.7072 * np.eye(2))))
print()

# tabulate along the delay interval; P(-tau) is P(tau) transposed
print("tau      P11        P12        P21        P22")
for tau in np.linspace(0.0, 1.0, 11):
    P = P_at(sol, tau)
    print("%4.2f  %9.6f  %9.6f  %9.6f  %9.6f"
          % (tau, P[0, 0], P[0, 1], P[1, 0], P[1, 1]))
