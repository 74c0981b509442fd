"""Delay Lyapunov matrix construction.

The matrix ``P(tau)`` solves a delay differential equation with a symmetry
condition and an algebraic boundary condition. Collapsing the kernel's
internal dynamics turns that problem into a linear ODE for six coupled
matrix blocks with conditions split between ``tau = 0`` and ``tau = h``:

    blocks 1, 2 : (n, n)    forward and adjoint propagators of P
    blocks 3, 4 : (n, nd)   kernel convolutions entering the derivative
    blocks 5, 6 : (nd, n)   their transposed counterparts

Stacking the vectorized blocks gives a state of size ``ns = 2 n^2 +
4 n nd`` with dynamics ``omega' = E omega`` and boundary condition
``F1 omega(0) + F2 omega(h) = rhs``. The boundary solve reduces to one
linear system in ``G = F1 + F2 expm(E h)``; afterwards every value of the
Lyapunov matrix follows from the matrix exponential of ``E``.

``P`` on ``[-h, 0)`` is defined by the reflection ``P(-tau) = P(tau).T``,
which leaves a derivative kink at ``tau = 0``; the residual checks below
keep their difference stencils and quadrature panels on one side of it.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from . import spectrum as spectrum_mod
from .linalg import kron, unvec, vec
from .model import kernel_at
from .quadrature import integrate


def block_sizes(n, nd):
    """Lengths of the six vectorized blocks in the stacked state."""
    return [n * n, n * n, n * nd, n * nd, nd * n, nd * n]


def block_offsets(n, nd):
    out = [0]
    for s in block_sizes(n, nd):
        out.append(out[-1] + s)
    return out


@dataclass(frozen=True, eq=False)
class OmegaBlocks:
    """View of the stacked auxiliary state as six matrices."""

    stacked: np.ndarray
    n: int
    internal_dim: int

    def __post_init__(self):
        v = np.asarray(self.stacked, dtype=float)
        expected = 2 * self.n ** 2 + 4 * self.n * self.internal_dim
        if v.shape != (expected,):
            raise ValueError(
                "stacked state has shape %s, expected (%d,)" % (v.shape, expected)
            )
        object.__setattr__(self, "stacked", v)

    @classmethod
    def from_blocks(cls, blocks):
        """Build from the six matrices in block order."""
        if len(blocks) != 6:
            raise ValueError("expected 6 blocks, got %d" % len(blocks))
        n = np.asarray(blocks[0]).shape[0]
        nd = np.asarray(blocks[2]).shape[1] if np.asarray(blocks[2]).size else 1
        shapes = [(n, n), (n, n), (n, nd), (n, nd), (nd, n), (nd, n)]
        for M, s in zip(blocks, shapes):
            if np.asarray(M).shape != s:
                raise ValueError("block shape %s, expected %s" % (np.asarray(M).shape, s))
        stacked = np.concatenate([vec(M) for M in blocks])
        return cls(stacked, n, nd)

    def _block(self, i):
        off = block_offsets(self.n, self.internal_dim)
        shapes = [
            (self.n, self.n), (self.n, self.n),
            (self.n, self.internal_dim), (self.n, self.internal_dim),
            (self.internal_dim, self.n), (self.internal_dim, self.n),
        ]
        return unvec(self.stacked[off[i]:off[i + 1]], *shapes[i])

    @property
    def omega1(self):
        return self._block(0)

    @property
    def omega2(self):
        return self._block(1)

    @property
    def omega3(self):
        return self._block(2)

    @property
    def omega4(self):
        return self._block(3)

    @property
    def omega5(self):
        return self._block(4)

    @property
    def omega6(self):
        return self._block(5)

    def blocks(self):
        return tuple(self._block(i) for i in range(6))


@dataclass(frozen=True, eq=False)
class AuxOperator:
    """Assembled constant matrices of the auxiliary boundary-value problem.

    ``E`` drives the stacked state, ``F1`` and ``F2`` weight its values at
    ``tau = 0`` and ``tau = h`` in the boundary condition, and ``G = F1 +
    F2 expm(E h)`` is the combined boundary matrix whose conditioning
    decides solvability.
    """

    system: object
    E: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    G: np.ndarray
    ns: int

    @property
    def n(self):
        return self.system.n

    @property
    def internal_dim(self):
        return self.system.internal_dim

    @property
    def h(self):
        return self.system.h


def assemble(sys):
    """Assemble the auxiliary operator of a delay system.

    The six rows of ``E`` encode, in order: the derivative couplings of
    the two propagator blocks and of the four convolution blocks. The six
    rows of the boundary pair ``(F1, F2)`` encode: the algebraic condition
    receiving ``-vec(Q)``, the matching of blocks 1 and 2 across the
    interval, and the four homogeneous end conditions of the convolution
    blocks.
    """
    n = sys.n
    nd = sys.internal_dim
    A0, A1, Ad, Bd, Cd = sys.A0, sys.A1, sys.Ad, sys.Bd, sys.Cd
    In = np.eye(n)
    Ead = Cd @ linalg.expm(Ad, -sys.h)

    sizes = block_sizes(n, nd)
    off = block_offsets(n, nd)
    ns = off[-1]

    def place(M, i, j, blk):
        M[off[i]:off[i + 1], off[j]:off[j + 1]] = blk

    E = np.zeros((ns, ns))
    place(E, 0, 0, kron(A0.T, In))
    place(E, 0, 1, kron(A1.T, In))
    place(E, 0, 2, kron(Bd.T, In))
    place(E, 0, 3, kron(Bd.T, In))
    place(E, 1, 0, -kron(In, A1.T))
    place(E, 1, 1, -kron(In, A0.T))
    place(E, 1, 4, -kron(In, Bd.T))
    place(E, 1, 5, -kron(In, Bd.T))
    place(E, 2, 0, kron(Cd.T, In))
    place(E, 2, 2, -kron(Ad.T, In))
    place(E, 3, 1, -kron(Ead.T, In))
    place(E, 3, 3, -kron(Ad.T, In))
    place(E, 4, 0, kron(In, Ead.T))
    place(E, 4, 4, kron(In, Ad.T))
    place(E, 5, 1, -kron(In, Cd.T))
    place(E, 5, 5, kron(In, Ad.T))

    F1 = np.zeros((ns, ns))
    place(F1, 0, 0, kron(A0.T, In))
    place(F1, 0, 1, kron(A1.T, In))
    place(F1, 0, 2, kron(Bd.T, In))
    place(F1, 0, 3, kron(Bd.T, In))
    place(F1, 1, 0, np.eye(sizes[0]))
    place(F1, 2, 2, np.eye(sizes[2]))
    place(F1, 3, 4, np.eye(sizes[4]))

    F2 = np.zeros((ns, ns))
    place(F2, 0, 0, kron(In, A1.T))
    place(F2, 0, 1, kron(In, A0.T))
    place(F2, 0, 4, kron(In, Bd.T))
    place(F2, 0, 5, kron(In, Bd.T))
    place(F2, 1, 1, -np.eye(sizes[1]))
    place(F2, 4, 3, np.eye(sizes[3]))
    place(F2, 5, 5, np.eye(sizes[5]))

    G = F1 + F2 @ linalg.expm(E, sys.h)
    return AuxOperator(sys, E, F1, F2, G, ns)


@dataclass(frozen=True, eq=False)
class LyapunovSolution:
    """Boundary solve outcome: initial state plus everything needed to
    propagate it."""

    system: object
    weight: object
    op: AuxOperator
    omega0: OmegaBlocks
    spectrum: spectrum_mod.SpectrumReport
    rcond: float


def solve_boundary(op, weight,
                   hard=spectrum_mod.HARD_THRESHOLD,
                   borderline=spectrum_mod.BORDERLINE_THRESHOLD):
    """Solve the boundary condition for the initial stacked state.

    Parameters
    ----------
    op : AuxOperator
    weight : Weight
        Symmetric running-cost matrix, dimension matching the system.
    hard, borderline : float, optional
        Solvability thresholds, see :func:`delaylyap.spectrum.check`.

    Returns
    -------
    LyapunovSolution

    Raises
    ------
    SpectrumConditionViolated
        When the combined boundary matrix is singular below ``hard``;
        inside the borderline band the solve proceeds and the verdict is
        recorded on the returned solution.
    """
    n = op.n
    if weight.n != n:
        raise ValueError(
            "weight dimension %d does not match state dimension %d" % (weight.n, n)
        )
    report = spectrum_mod.check(op.G, hard=hard, borderline=borderline)
    if report.verdict == spectrum_mod.VIOLATED:
        raise spectrum_mod.SpectrumConditionViolated(report)
    rhs = np.zeros(op.ns)
    rhs[: n * n] = -vec(weight.matrix)
    x, rcond = linalg.solve_linear(op.G, rhs, rcond_threshold=0.0)
    omega0 = OmegaBlocks(x, n, op.internal_dim)
    return LyapunovSolution(op.system, weight, op, omega0, report, rcond)


def solve(sys, weight, **kwargs):
    """Assemble and solve in one call."""
    return solve_boundary(assemble(sys), weight, **kwargs)


def evaluate_omega(sol, tau):
    """Propagate the stacked state to ``tau`` (any finite value)."""
    tau = float(tau)
    if not np.isfinite(tau):
        raise ValueError("tau must be finite")
    stacked = linalg.expm(sol.op.E, tau) @ sol.omega0.stacked
    return OmegaBlocks(stacked, sol.op.n, sol.op.internal_dim)


def P_at(sol, tau):
    """Delay Lyapunov matrix at ``tau``, for ``|tau| <= h``.

    Values on ``[0, h]`` average the two propagator blocks; negative
    arguments use the reflection ``P(-tau) = P(tau).T``.
    """
    h = sol.system.h
    tau = float(tau)
    slack = 1e-9 * max(1.0, h)
    if not np.isfinite(tau) or abs(tau) > h + slack:
        raise ValueError("tau=%r outside [-h, h] with h=%g" % (tau, h))
    tau = min(h, max(-h, tau))
    if tau < 0:
        return P_at(sol, -tau).T
    o1 = evaluate_omega(sol, tau).omega1
    o2 = evaluate_omega(sol, h - tau).omega2
    return 0.5 * (o1 + o2.T)


def _default_grid(h, count):
    return np.linspace(0.0, h, count)


def residual_dde(sol, taus=None, quad_tol=1e-10):
    """Max-abs defect of the delay differential equation for ``P``.

    The derivative is approximated with second-order difference stencils
    (one-sided near both endpoints, keeping clear of the reflection kink)
    and the convolution term integrates the kernel against ``P``, with the
    quadrature split at the kink crossing. Requires ``h > 0``.
    """
    sys = sol.system
    h = sys.h
    if h <= 0:
        raise ValueError("residual_dde needs h > 0")
    if taus is None:
        taus = _default_grid(h, 21)
    eps = 1e-6 * h
    worst = 0.0
    for tau in np.asarray(taus, dtype=float):
        if tau < 0 or tau > h:
            raise ValueError("residual grid point %g outside [0, h]" % tau)
        if tau < 2 * eps:
            dP = (-3 * P_at(sol, tau) + 4 * P_at(sol, tau + eps)
                  - P_at(sol, tau + 2 * eps)) / (2 * eps)
        elif tau > h - 2 * eps:
            dP = (3 * P_at(sol, tau) - 4 * P_at(sol, tau - eps)
                  + P_at(sol, tau - 2 * eps)) / (2 * eps)
        else:
            dP = (P_at(sol, tau + eps) - P_at(sol, tau - eps)) / (2 * eps)

        def f(theta):
            return P_at(sol, tau + theta) @ kernel_at(sys, theta)

        conv = np.zeros((sys.n, sys.n))
        for lo, hi in ((-h, -tau), (-tau, 0.0)):
            if hi > lo:
                conv = conv + integrate(f, lo, hi, tol=quad_tol)
        rhs = P_at(sol, tau) @ sys.A0 + P_at(sol, tau - h) @ sys.A1 + conv
        worst = max(worst, linalg.maxabs(dP - rhs))
    return worst


def residual_algebraic(sol, quad_tol=1e-10):
    """Max-abs defect of the algebraic boundary condition tying ``P`` to
    the weight."""
    sys = sol.system
    Q = sol.weight.matrix
    P0 = P_at(sol, 0.0)
    Ph = P_at(sol, sys.h)

    def f(theta):
        K = kernel_at(sys, theta)
        return K.T @ P_at(sol, -theta) + P_at(sol, theta) @ K

    if sys.h > 0:
        conv = integrate(f, -sys.h, 0.0, tol=quad_tol)
    else:
        conv = np.zeros((sys.n, sys.n))
    term = sys.A0.T @ P0 + P0 @ sys.A0 + sys.A1.T @ Ph + Ph.T @ sys.A1 + conv
    return linalg.maxabs(term + Q)


def residual_collapsed(sol, taus=None, quad_tol=1e-10):
    """Max-abs defect of the convolution blocks against their defining
    integrals.

    Each of blocks 3 to 6 equals a finite convolution of the kernel with
    one propagator block; evaluating those integrals by quadrature and
    comparing confirms the collapsed internal dynamics."""
    sys = sol.system
    h = sys.h
    if taus is None:
        taus = _default_grid(h, 11)
    Cd, Ad = sys.Cd, sys.Ad

    def ker(theta):
        return Cd @ linalg.expm(Ad, theta)

    worst = 0.0
    for tau in np.asarray(taus, dtype=float):
        if tau < 0 or tau > h:
            raise ValueError("residual grid point %g outside [0, h]" % tau)
        om = evaluate_omega(sol, tau)
        pieces = [
            (om.omega3, -tau, 0.0,
             lambda th, t=tau: evaluate_omega(sol, t + th).omega1 @ ker(th)),
            (om.omega4, -h, -tau,
             lambda th, t=tau: evaluate_omega(sol, t + th + h).omega2 @ ker(th)),
            (om.omega5, -h, -h + tau,
             lambda th, t=tau: ker(th).T @ evaluate_omega(sol, t - th - h).omega1),
            (om.omega6, -h + tau, 0.0,
             lambda th, t=tau: ker(th).T @ evaluate_omega(sol, t - th).omega2),
        ]
        for target, lo, hi, f in pieces:
            if hi > lo:
                val = integrate(f, lo, hi, tol=quad_tol)
            else:
                val = np.zeros_like(target)
            worst = max(worst, linalg.maxabs(val - target))
    return worst


def flip_residuals(sol, taus=None):
    """Defects of the reversal symmetries relating the blocks across the
    interval, plus the symmetry of block 1 at the origin."""
    h = sol.system.h
    if taus is None:
        taus = _default_grid(h, 11)
    r1 = r3 = r4 = 0.0
    for tau in np.asarray(taus, dtype=float):
        om = evaluate_omega(sol, tau)
        rev = evaluate_omega(sol, h - tau)
        r1 = max(r1, linalg.maxabs(om.omega1 - rev.omega2.T))
        r3 = max(r3, linalg.maxabs(om.omega3 - rev.omega6.T))
        r4 = max(r4, linalg.maxabs(om.omega4 - rev.omega5.T))
    o1 = sol.omega0.omega1
    return {
        "omega1_flip": r1,
        "omega3_flip": r3,
        "omega4_flip": r4,
        "omega1_symmetry_at_0": linalg.maxabs(o1 - o1.T),
    }


def endpoint_residuals(sol):
    """Defects of the boundary conditions at the interval ends."""
    om0 = sol.omega0
    omh = evaluate_omega(sol, sol.system.h)
    return {
        "omega1_0_minus_omega2_h": linalg.maxabs(om0.omega1 - omh.omega2),
        "omega3_at_0": linalg.maxabs(om0.omega3),
        "omega5_at_0": linalg.maxabs(om0.omega5),
        "omega4_at_h": linalg.maxabs(omh.omega4),
        "omega6_at_h": linalg.maxabs(omh.omega6),
    }


def residual_report(sol, taus=None, quad_tol=1e-10):
    """Bundle every residual diagnostic into one flat mapping."""
    out = {
        "algebraic": residual_algebraic(sol, quad_tol=quad_tol),
        "collapsed": residual_collapsed(sol, taus=taus, quad_tol=quad_tol),
    }
    if sol.system.h > 0:
        out["dde"] = residual_dde(sol, taus=taus, quad_tol=quad_tol)
    out.update(flip_residuals(sol, taus=taus))
    out.update(endpoint_residuals(sol))
    return out
