"""When does the boundary-value construction fail?

The auxiliary boundary-value problem is solvable exactly when the system
has no pair of characteristic roots placed symmetrically about the
origin (a "mirrored pair"). The smallest singular value of the boundary
operator G detects this: it collapses to zero when a mirrored pair
exists. Two textbook failures:

* the scalar integrator x'(t) = 0 * x(t), whose root at the origin is
  its own mirror image, and
* x'(t) = -w x(t - h) with cos(w h) = 0, which has roots at +- i w.

Run as:  python3 demos/solvability_check.py
"""

import numpy as np

from delaylyap import (
    TimeDelaySystem,
    assemble,
    characteristic_matrix,
    check_spectrum,
    sincos_kernel,
    zero_kernel,
)


def grade(name, sys):
    report = check_spectrum(assemble(sys))
    print("%-28s %-10s sigma_min=%.3e  relative=%.3e"
          % (name, report.verdict, report.sigma_min, report.relative))
    return report


Ad1, Bd1, Cd1 = zero_kernel(1)

# healthy example: rotation-coupled system with a sine/cosine kernel
A1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
Ad, Bd, Cd = sincos_kernel(0.3 * np.eye(2), A1 @ (0.3 * np.eye(2)), np.pi)
healthy = TimeDelaySystem(-np.eye(2), A1, Ad, Bd, Cd, 1.0)

# failure 1: a root exactly at the origin
integrator = TimeDelaySystem([[0.0]], [[0.0]], Ad1, Bd1, Cd1, 1.0)

# failure 2: a mirrored imaginary pair at +- i pi/2
w = np.pi / 2
mirrored = TimeDelaySystem([[0.0]], [[-w]], Ad1, Bd1, Cd1, 1.0)

print("grading the solvability condition:")
grade("rotation-coupled example", healthy)
grade("scalar integrator", integrator)
grade("mirrored pair at +-i pi/2", mirrored)
print()

# confirm the diagnosis: the characteristic matrix is singular exactly
# at the offending roots
print("characteristic determinant at the suspect points:")
print("  integrator  at 0:      %.3e"
      % abs(np.linalg.det(characteristic_matrix(integrator, 0.0))))
print("  mirrored    at +i pi/2: %.3e"
      % abs(np.linalg.det(characteristic_matrix(mirrored, 1j * w))))
print("  mirrored    at -i pi/2: %.3e"
      % abs(np.linalg.det(characteristic_matrix(mirrored, -1j * w))))
print("  healthy     at 0:      %.3e"
      % abs(np.linalg.det(characteristic_matrix(healthy, 0.0))))
