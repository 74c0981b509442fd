"""Dense linear algebra helpers shared by the solver modules.

Vectorization follows the column-stacking convention throughout: ``vec``
stacks columns, so ``vec(A X B) = kron(B.T, A) vec(X)``.
"""

import numpy as np
import scipy.linalg


class SingularSystemError(np.linalg.LinAlgError):
    """Linear system rejected as numerically singular.

    Carries the reciprocal condition estimate that triggered the rejection.
    """

    def __init__(self, rcond, threshold):
        self.rcond = float(rcond)
        self.threshold = float(threshold)
        super().__init__(
            "linear system is numerically singular: "
            "rcond estimate %.3e is below threshold %.3e" % (rcond, threshold)
        )


def vec(M):
    """Stack the columns of a matrix into a single vector."""
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("vec expects a 2-d array, got shape %s" % (M.shape,))
    return M.reshape(-1, order="F")


def unvec(v, rows, cols):
    """Inverse of :func:`vec`. Reshapes ``v`` into a ``rows x cols`` matrix.

    Raises ``ValueError`` when the length does not factor as ``rows * cols``.
    """
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError("unvec expects a 1-d array, got shape %s" % (v.shape,))
    if v.size != rows * cols:
        raise ValueError(
            "cannot reshape length %d into %d x %d" % (v.size, rows, cols)
        )
    return v.reshape(rows, cols, order="F")


def kron(Y, Z):
    """Kronecker product with the block layout ``[y_ij * Z]``."""
    return np.kron(np.asarray(Y), np.asarray(Z))


def expm(M, scale=1.0):
    """Matrix exponential ``e^(M * scale)``.

    Parameters
    ----------
    M : (m, m) array_like
        Square matrix, real or complex.
    scale : float or complex, optional
        Scalar factor applied before exponentiation. ``scale=0`` returns
        the identity exactly.

    Returns
    -------
    (m, m) ndarray

    Raises
    ------
    OverflowError
        If the result contains non-finite entries.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expm expects a square matrix, got shape %s" % (M.shape,))
    if scale == 0:
        return np.eye(M.shape[0], dtype=np.result_type(M.dtype, float))
    out = scipy.linalg.expm(M * scale)
    if not np.all(np.isfinite(out)):
        raise OverflowError("matrix exponential overflowed to non-finite entries")
    return out


def solve_linear(A, b, rcond_threshold=1e-12):
    """Solve ``A x = b`` and report a reciprocal condition estimate.

    Parameters
    ----------
    A : (m, m) array_like
    b : (m,) array_like
    rcond_threshold : float, optional
        Systems with ``sigma_min / sigma_max`` below this value raise
        :class:`SingularSystemError` instead of returning garbage.

    Returns
    -------
    x : (m,) ndarray
    rcond : float
        Estimate of ``sigma_min(A) / sigma_max(A)``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("solve_linear expects a square matrix, got %s" % (A.shape,))
    if b.shape != (A.shape[0],):
        raise ValueError("right-hand side shape %s does not match %s" % (b.shape, A.shape))
    sv = scipy.linalg.svdvals(A)
    rcond = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    if rcond < rcond_threshold:
        raise SingularSystemError(rcond, rcond_threshold)
    x = scipy.linalg.solve(A, b)
    return x, rcond


def smallest_singular_value(A):
    """Smallest singular value of a (possibly rectangular) matrix."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("expects a 2-d array, got shape %s" % (A.shape,))
    if min(A.shape) == 0:
        return 0.0
    return float(scipy.linalg.svdvals(A)[-1])


def maxabs(A):
    """Largest entry magnitude, zero for empty arrays."""
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0
