"""Time-domain simulation and quadrature oracles.

The delay system is integrated in its augmented form: an internal
variable ``y(t)`` carries the distributed-delay convolution, so the pair
``(x, y)`` obeys

    x'(t) = A0 x(t) + Cd y(t) + A1 x(t - h)
    y'(t) = Bd x(t) - Ad y(t) - expm(-Ad h) Bd x(t - h)

with ``y(0)`` seeded from the history. Differentiating the convolution
shows the two forms agree; :func:`equation_residual` checks that on any
produced trajectory.

Integration is a fixed-step RK4 method of steps with the step an integer
fraction of the delay, so every propagated discontinuity sits on a grid
node and the scheme keeps fourth order on each smooth piece. Delayed
reads during the first delay interval take the history's value, with the
left limit used at the seam; later reads come from the computed record,
interpolated with cubic Hermite segments built from the stored stage
derivatives.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.interpolate

from . import linalg
from .quadrature import integrate

POINT_MASS = "point_mass"
SAMPLES = "samples"
FUNDAMENTAL = "fundamental"


@dataclass(frozen=True, eq=False)
class HistorySpec:
    """Initial history segment on ``[-h, 0]``.

    Three kinds are supported: a point mass (zero history, state jumps to
    ``x0`` at time zero), a sampled segment interpolated with a cubic
    spline, and the fundamental start (zero history, identity state) used
    to build the fundamental matrix column by column in one run.
    """

    kind: str
    dim: int
    x0: np.ndarray = None
    thetas: np.ndarray = None
    values: np.ndarray = None

    @classmethod
    def point_mass(cls, x0):
        x0 = np.asarray(x0, dtype=float)
        if x0.ndim != 1 or x0.size == 0:
            raise ValueError("x0 must be a nonempty vector")
        return cls(POINT_MASS, x0.size, x0=x0)

    @classmethod
    def from_samples(cls, thetas, values):
        thetas = np.asarray(thetas, dtype=float)
        values = np.asarray(values, dtype=float)
        if thetas.ndim != 1 or thetas.size < 2:
            raise ValueError("need at least two history samples")
        if np.any(np.diff(thetas) <= 0):
            raise ValueError("history sample times must be strictly increasing")
        if thetas[-1] != 0.0:
            raise ValueError("history samples must end at theta = 0")
        if values.shape != (thetas.size,) and values.shape[0] != thetas.size:
            raise ValueError("values must provide one row per sample time")
        if values.ndim == 1:
            values = values[:, None]
        return cls(SAMPLES, values.shape[1], thetas=thetas, values=values)

    @classmethod
    def fundamental(cls, n):
        if n < 1:
            raise ValueError("dimension must be positive")
        return cls(FUNDAMENTAL, n)

    @property
    def columns(self):
        return self.dim if self.kind == FUNDAMENTAL else 1

    def _spline(self):
        return scipy.interpolate.CubicSpline(
            self.thetas, self.values, axis=0, bc_type="natural"
        )

    def initial_state(self):
        """State at time zero, shape ``(n, columns)``."""
        if self.kind == POINT_MASS:
            return self.x0[:, None].copy()
        if self.kind == FUNDAMENTAL:
            return np.eye(self.dim)
        return self._spline()(0.0)[:, None]

    def value(self, theta):
        """History value for ``theta < 0``, shape ``(n, columns)``."""
        if self.kind in (POINT_MASS, FUNDAMENTAL):
            return np.zeros((self.dim, self.columns))
        theta = max(theta, float(self.thetas[0]))
        return self._spline()(theta)[:, None]

    def seam_value(self):
        """Value used when a delayed read lands exactly at time zero.

        The point-mass and fundamental histories jump at zero, so reads
        from the left take the history limit, not the post-jump state.
        """
        if self.kind == SAMPLES:
            return self._spline()(0.0)[:, None]
        return np.zeros((self.dim, self.columns))

    def convolution_state(self, sys):
        """Initial internal variable ``int_{-h}^0 expm(Ad th) Bd phi(th) dth``."""
        nd = sys.internal_dim
        if self.kind in (POINT_MASS, FUNDAMENTAL) or sys.h == 0:
            return np.zeros((nd, self.columns))
        spline = self._spline()

        def f(theta):
            return linalg.expm(sys.Ad, theta) @ sys.Bd @ spline(theta)[:, None]

        return integrate(f, -sys.h, 0.0, tol=1e-12)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Dense fixed-step record of one simulation.

    ``xs``/``ys`` have shape ``(K+1, n)`` and ``(K+1, nd)`` for vector
    runs, or ``(K+1, n, n)`` and ``(K+1, nd, n)`` for fundamental runs.
    The four stage-derivative arrays hold the first and last RK4 stage of
    each step and drive the cubic Hermite interpolation.
    """

    ts: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    xd_start: np.ndarray
    xd_end: np.ndarray
    yd_start: np.ndarray
    yd_end: np.ndarray
    dt: float
    h: float

    @property
    def steps(self):
        return self.ts.size - 1

    def _segment(self, t):
        T = self.ts[-1]
        if t < -1e-12 * max(1.0, T) or t > T * (1 + 1e-12) + 1e-12:
            raise ValueError("time %g outside the recorded range [0, %g]" % (t, T))
        j = int(min(self.steps - 1, max(0, math.floor(t / self.dt))))
        s = (t - self.ts[j]) / self.dt
        return j, min(1.0, max(0.0, s))

    @staticmethod
    def _hermite(p0, p1, d0, d1, dt, s):
        s2 = s * s
        s3 = s2 * s
        return ((2 * s3 - 3 * s2 + 1) * p0 + (-2 * s3 + 3 * s2) * p1
                + dt * ((s3 - 2 * s2 + s) * d0 + (s3 - s2) * d1))

    def x_at(self, t):
        j, s = self._segment(t)
        if s == 0.0:
            return self.xs[j].copy()
        return self._hermite(self.xs[j], self.xs[j + 1],
                             self.xd_start[j], self.xd_end[j], self.dt, s)

    def y_at(self, t):
        j, s = self._segment(t)
        if s == 0.0:
            return self.ys[j].copy()
        return self._hermite(self.ys[j], self.ys[j + 1],
                             self.yd_start[j], self.yd_end[j], self.dt, s)

    def to_csv(self, path):
        """Write ``t, x_1..x_n, y_1..y_nd`` rows with 17 significant digits.

        Only defined for vector trajectories.
        """
        if self.xs.ndim != 2:
            raise ValueError("CSV export is defined for vector trajectories only")
        n = self.xs.shape[1]
        nd = self.ys.shape[1]
        header = ["t"] + ["x_%d" % (i + 1) for i in range(n)] \
            + ["y_%d" % (i + 1) for i in range(nd)]
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for k in range(self.ts.size):
                row = [self.ts[k], *self.xs[k], *self.ys[k]]
                fh.write(",".join("%.17g" % v for v in row) + "\n")


def _resolve_step(h, T, dt):
    if not np.isfinite(T) or T <= 0:
        raise ValueError("horizon T must be positive, got %r" % T)
    if h > 0:
        if dt is None:
            m = 64
        else:
            if dt <= 0:
                raise ValueError("dt must be positive")
            m = int(round(h / dt))
            if m < 20 or abs(m * dt - h) > 1e-9 * h:
                raise ValueError(
                    "dt must be h/m for an integer m >= 20; got dt=%g, h=%g" % (dt, h)
                )
        dt = h / m
    else:
        m = 0
        if dt is None:
            dt = T / 2048
        if dt <= 0:
            raise ValueError("dt must be positive")
    steps = int(math.ceil(T / dt - 1e-9))
    return dt, m, max(steps, 1)


def simulate(sys, history, T, dt=None):
    """Integrate the augmented system from a history segment.

    Parameters
    ----------
    sys : TimeDelaySystem
    history : HistorySpec
    T : float
        Horizon; the run covers ``[0, ceil(T/dt) dt]``.
    dt : float, optional
        Step, an integer fraction ``h/m`` with ``m >= 20``. Defaults to
        ``h/64`` (or ``T/2048`` when ``h = 0``).

    Returns
    -------
    Trajectory
    """
    if history.dim != sys.n:
        raise ValueError(
            "history dimension %d does not match state dimension %d"
            % (history.dim, sys.n)
        )
    h = sys.h
    if history.kind == SAMPLES and history.thetas[0] > -h + 1e-12 * max(1.0, h):
        raise ValueError("history samples must cover [-h, 0] with h=%g" % h)
    dt, m, steps = _resolve_step(h, T, dt)
    n = sys.n
    nd = sys.internal_dim
    c = history.columns
    A0, A1, Ad, Bd, Cd = sys.A0, sys.A1, sys.Ad, sys.Bd, sys.Cd
    EBd = linalg.expm(Ad, -h) @ Bd

    X = np.zeros((steps + 1, n, c))
    Y = np.zeros((steps + 1, nd, c))
    Xd0 = np.zeros((steps, n, c))
    Xd1 = np.zeros((steps, n, c))
    Yd0 = np.zeros((steps, nd, c))
    Yd1 = np.zeros((steps, nd, c))
    X[0] = history.initial_state()
    Y[0] = history.convolution_state(sys)

    def rhs(x, y, xd):
        dx = A0 @ x + Cd @ y + A1 @ xd
        dy = Bd @ x - Ad @ y - EBd @ xd
        return dx, dy

    def history_read(theta):
        if theta >= -1e-12 * max(1.0, h):
            return history.seam_value()
        return history.value(max(theta, -h))

    for k in range(steps):
        x = X[k]
        y = Y[k]
        if h == 0:
            # the delayed argument coincides with the current time
            k1x, k1y = rhs(x, y, x)
            x2 = x + 0.5 * dt * k1x
            y2 = y + 0.5 * dt * k1y
            k2x, k2y = rhs(x2, y2, x2)
            x3 = x + 0.5 * dt * k2x
            y3 = y + 0.5 * dt * k2y
            k3x, k3y = rhs(x3, y3, x3)
            x4 = x + dt * k3x
            y4 = y + dt * k3y
            k4x, k4y = rhs(x4, y4, x4)
        else:
            if k >= m:
                base = k - m
                xd_a = X[base]
                xd_b = X[base + 1]
                xd_m = Trajectory._hermite(
                    X[base], X[base + 1], Xd0[base], Xd1[base], dt, 0.5
                )
            else:
                theta = (k - m) * dt
                xd_a = history_read(theta)
                xd_m = history_read(theta + 0.5 * dt)
                xd_b = history_read(theta + dt)
            k1x, k1y = rhs(x, y, xd_a)
            k2x, k2y = rhs(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, xd_m)
            k3x, k3y = rhs(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, xd_m)
            k4x, k4y = rhs(x + dt * k3x, y + dt * k3y, xd_b)
        X[k + 1] = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        Y[k + 1] = y + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        Xd0[k] = k1x
        Yd0[k] = k1y
        Xd1[k] = k4x
        Yd1[k] = k4y
        if not (np.all(np.isfinite(X[k + 1])) and np.all(np.isfinite(Y[k + 1]))):
            raise OverflowError("simulation diverged at t=%g" % ((k + 1) * dt))

    ts = dt * np.arange(steps + 1)
    if c == 1 and history.kind != FUNDAMENTAL:
        X, Y = X[:, :, 0], Y[:, :, 0]
        Xd0, Xd1, Yd0, Yd1 = Xd0[:, :, 0], Xd1[:, :, 0], Yd0[:, :, 0], Yd1[:, :, 0]
    return Trajectory(ts, X, Y, Xd0, Xd1, Yd0, Yd1, dt, h)


def fundamental_matrix(sys, T, dt=None):
    """Matrix trajectory whose columns solve the system from a unit jump."""
    return simulate(sys, HistorySpec.fundamental(sys.n), T, dt=dt)


@dataclass(frozen=True)
class CostEstimate:
    """Quadratic-cost integral with its extrapolated tail.

    ``decaying`` is cleared when the tail estimate is more than a tenth of
    the integrated part, which signals an unreliable (possibly divergent)
    value.
    """

    value: float
    integral: float
    tail: float
    rate: float
    decaying: bool


def _tail_fit(ts, gs):
    """Exponential decay rate from the last tenth of the samples."""
    count = max(10, (ts.size + 9) // 10)
    count = min(count, ts.size)
    t = ts[-count:]
    g = gs[-count:]
    peak = float(np.max(g))
    if peak <= 1e-280:
        return math.inf
    mask = g > peak * 1e-12
    if np.count_nonzero(mask) < 2:
        return math.inf
    slope = np.polyfit(t[mask], np.log(g[mask]), 1)[0]
    return -float(slope)


def cost_quadrature(traj, weight):
    """Quadratic running cost of a vector trajectory.

    Simpson's rule over the recorded grid plus an exponential-tail
    correction fitted to the final tenth of the samples.
    """
    if traj.xs.ndim != 2:
        raise ValueError("cost is defined for vector trajectories only")
    Q = weight.matrix
    if Q.shape[0] != traj.xs.shape[1]:
        raise ValueError("weight dimension does not match the trajectory")
    g = np.einsum("ki,ij,kj->k", traj.xs, Q, traj.xs)
    integral = float(scipy.integrate.simpson(g, x=traj.ts))
    rate = _tail_fit(traj.ts, np.abs(g))
    if math.isinf(rate):
        tail = 0.0
    elif rate > 0:
        tail = float(g[-1]) / rate
    else:
        tail = math.inf
    value = integral + tail
    decaying = math.isfinite(tail) and abs(tail) <= 0.1 * max(abs(integral), 1e-300)
    return CostEstimate(value, integral, tail, rate, decaying)


def cost_to_go(sys, weight, history, T=None, dt=None, tail_tol=1e-5,
               max_doublings=8):
    """Simulate and integrate the cost, doubling the horizon until the
    tail correction drops below ``tail_tol``.

    Returns the final estimate together with the trajectory it came from.
    """
    if T is None:
        T = max(20.0, 20.0 * sys.h)
    est = None
    traj = None
    for _ in range(max_doublings + 1):
        traj = simulate(sys, history, T, dt=dt)
        est = cost_quadrature(traj, weight)
        if math.isfinite(est.tail) and abs(est.tail) <= tail_tol:
            break
        T *= 2
    return est, traj


def oracle_P(sys, weight, tau, T=None, dt=None, tail_tol=1e-5, max_doublings=8):
    """Delay Lyapunov matrix by direct quadrature of the defining integral.

    Integrates ``Phi(t).T Q Phi(t + tau)`` over ``[0, T]`` with Simpson's
    rule on the simulation grid, ``Phi`` being the fundamental matrix,
    then adds an exponential-tail correction. The horizon doubles until
    the tail is below ``tail_tol``; a system whose fundamental matrix does
    not decay makes this fail with ``RuntimeError``.

    This is deliberately independent of the boundary-value construction
    and serves as its cross-check.
    """
    tau = float(tau)
    if tau < 0:
        return oracle_P(sys, weight, -tau, T=T, dt=dt, tail_tol=tail_tol,
                        max_doublings=max_doublings).T
    if T is None:
        T = max(20.0, 20.0 * sys.h)
    Q = weight.matrix
    if Q.shape[0] != sys.n:
        raise ValueError("weight dimension does not match the system")
    if dt is None:
        dt = sys.h / 64 if sys.h > 0 else 1.0 / 64
    for attempt in range(max_doublings + 1):
        # margin keeps the shifted reads t + tau inside the record
        traj = fundamental_matrix(sys, T + tau + 2 * dt, dt=dt)
        kT = int(round(T / traj.dt))
        ts = traj.ts[: kT + 1]
        Phi = traj.xs[: kT + 1]
        shift = tau / traj.dt
        if abs(shift - round(shift)) < 1e-9:
            Phis = traj.xs[int(round(shift)): int(round(shift)) + kT + 1]
        else:
            Phis = np.array([traj.x_at(t + tau) for t in ts])
        M = np.einsum("kji,jl,klm->kim", Phi, Q, Phis)
        integral = scipy.integrate.simpson(M, x=ts, axis=0)
        rate = _tail_fit(ts, np.array([linalg.maxabs(Mk) for Mk in M]))
        last = linalg.maxabs(M[-1])
        if math.isinf(rate) and last <= 1e-280:
            return integral
        if rate > 0 and last / rate <= tail_tol:
            return integral + M[-1] / rate
        T *= 2
    raise RuntimeError(
        "fundamental matrix does not decay fast enough for the quadrature "
        "oracle (tail above %g after %d horizon doublings)" % (tail_tol, max_doublings)
    )


def equation_residual(sys, traj, times=None, quad_tol=1e-8):
    """Defect of the original delay equation along a simulated trajectory.

    Differentiates the record with a fourth-order stencil and evaluates
    the distributed term by quadrature against the interpolated record, so
    it checks the augmented form against the original one. Check times
    must sit at least one delay past the start and clear of the
    discontinuity points by a few steps; the default picks such times
    automatically.
    """
    dt = traj.dt
    T = float(traj.ts[-1])
    h = sys.h
    K = traj.steps

    def clear_of_kinks(i):
        if i < 2 or i > K - 2 or i * dt < h:
            return False
        if h == 0:
            return True
        j = 0
        while j * h <= T + dt:
            if abs(i * dt - j * h) < 2.5 * dt:
                return False
            j += 1
        return True

    if times is None:
        lo = max(h, 0.0) + 3 * dt
        hi = T - 3 * dt
        if hi <= lo:
            raise ValueError("trajectory too short for a residual check")
        idx = []
        for t in np.linspace(lo, hi, 12):
            i = int(round(t / dt))
            while i <= K - 2 and not clear_of_kinks(i):
                i += 1
            if clear_of_kinks(i) and i not in idx:
                idx.append(i)
        if len(idx) < 3:
            raise ValueError("could not place residual check times")
    else:
        idx = [int(round(t / dt)) for t in times]
        for i in idx:
            if not clear_of_kinks(i):
                raise ValueError(
                    "check time %g is too close to a discontinuity or an end"
                    % (i * dt)
                )

    worst = 0.0
    for i in idx:
        t = i * dt
        dx = (traj.xs[i - 2] - 8 * traj.xs[i - 1]
              + 8 * traj.xs[i + 1] - traj.xs[i + 2]) / (12 * dt)
        delayed = traj.xs[i - int(round(h / dt))] if h > 0 else traj.xs[i]

        def f(theta):
            K_th = sys.Cd @ linalg.expm(sys.Ad, theta) @ sys.Bd
            return K_th @ traj.x_at(t + theta)

        conv = np.zeros_like(traj.xs[i])
        if h > 0:
            cuts = [-h]
            j = int(math.ceil((t - h) / h))
            while j * h < t:
                if t - h < j * h:
                    cuts.append(j * h - t)
                j += 1
            cuts.append(0.0)
            for lo_c, hi_c in zip(cuts[:-1], cuts[1:]):
                if hi_c > lo_c + 1e-14:
                    conv = conv + integrate(f, lo_c, hi_c, tol=quad_tol)
        rhs = sys.A0 @ traj.xs[i] + sys.A1 @ delayed + conv
        worst = max(worst, linalg.maxabs(dx - rhs))
    return worst
