"""
Phase-space algebra for the three-mode attack circuit.

All vectors and matrices are written against the fixed ordering
(x_a, p_a, x_b, p_b, x_c, p_c) with the quadrature convention
x = (a + a^dagger)/2, so the vacuum variance is 1/4.
"""

import enum
import logging

import numpy as np

log = logging.getLogger(__name__)

N_MODES = 3
DIM = 2 * N_MODES

VACUUM_VARIANCE = 0.25


class Mode(enum.IntEnum):
    A = 0
    B = 1
    C = 2


class Quadrature(enum.IntEnum):
    X = 0
    P = 1


class QuadIndex(object):
    def __init__(self, mode, quadrature):
        """
        A single quadrature of one of the three modes

        :param mode: Mode.A, Mode.B or Mode.C
        :param quadrature: Quadrature.X or Quadrature.P
        :returns:
        :rtype:

        """

        self._mode = Mode(mode)
        self._quadrature = Quadrature(quadrature)

    @property
    def mode(self):
        return self._mode

    @property
    def quadrature(self):
        return self._quadrature

    @property
    def position(self):
        """
        position in the basis (x_a, p_a, x_b, p_b, x_c, p_c)
        """

        return 2 * int(self._mode) + int(self._quadrature)

    @classmethod
    def from_position(cls, position):

        if not 0 <= position < DIM:

            raise ValueError(f"basis position must be in [0, {DIM}), got {position}")

        return cls(position // 2, position % 2)

    def __eq__(self, other):

        return isinstance(other, QuadIndex) and self.position == other.position

    def __hash__(self):

        return hash(self.position)

    def __repr__(self):

        return f"{self._quadrature.name.lower()}_{self._mode.name.lower()}"


def symplectic_form():
    """
    block-diagonal symplectic form with a
    [[0, 1], [-1, 0]] block per mode
    """

    return np.kron(np.eye(N_MODES), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class SymplecticMap(object):
    def __init__(self, matrix, check=True):
        """
        A real linear map on the quadrature vector
        that preserves the canonical commutators (M J M^T = J).

        :param matrix: 6x6 real matrix
        :param check: verify the symplectic condition
        :returns:
        :rtype:

        """

        matrix = np.array(matrix, dtype=np.float64)

        if matrix.shape != (DIM, DIM):

            raise ValueError(f"a symplectic map must be {DIM}x{DIM}, got {matrix.shape}")

        if not np.all(np.isfinite(matrix)):

            raise ValueError("symplectic map contains non-finite entries")

        matrix.setflags(write=False)

        self._matrix = matrix

        if check and not self.is_symplectic():

            raise ValueError("matrix does not satisfy M J M^T = J")

    @classmethod
    def identity(cls):

        return cls(np.eye(DIM), check=False)

    @property
    def matrix(self):
        return self._matrix

    @property
    def det(self):
        return float(np.linalg.det(self._matrix))

    def is_symplectic(self, atol=1e-12):
        """
        entrywise check of M J M^T = J. The tolerance
        is scaled by the squared largest entry so that
        strongly amplifying maps are judged fairly.

        :param atol: tolerance for an order-one map
        :returns:
        :rtype: bool

        """

        J = symplectic_form()

        scale = max(1.0, np.abs(self._matrix).max() ** 2)

        residual = self._matrix @ J @ self._matrix.T - J

        return bool(np.abs(residual).max() <= atol * scale)

    def row(self, index):
        """
        the coefficients of one output quadrature
        on the six input quadratures

        :param index: a QuadIndex or a basis position
        :returns:
        :rtype: np.ndarray

        """

        if isinstance(index, QuadIndex):

            index = index.position

        return self._matrix[index].copy()

    def __eq__(self, other):

        return isinstance(other, SymplecticMap) and np.array_equal(
            self._matrix, other._matrix
        )

    def __repr__(self):

        return f"SymplecticMap(\n{self._matrix!r})"


class MomentState(object):
    def __init__(self, mean, cov):
        """
        First and second moments of a three-mode
        Gaussian state in quadrature units

        :param mean: 6-vector of quadrature means
        :param cov: 6x6 symmetric, positive semidefinite covariance
        :returns:
        :rtype:

        """

        mean = np.array(mean, dtype=np.float64).reshape(DIM)
        cov = np.array(cov, dtype=np.float64)

        assert cov.shape == (DIM, DIM), f"covariance must be {DIM}x{DIM}"

        scale = max(1.0, np.abs(cov).max())

        if np.abs(cov - cov.T).max() > 1e-14 * scale:

            raise ValueError("covariance matrix is not symmetric")

        # symmetrise away the last-bit asymmetry left by congruence
        cov = 0.5 * (cov + cov.T)

        if np.linalg.eigvalsh(cov).min() < -1e-12 * scale:

            raise ValueError("covariance matrix is not positive semidefinite")

        mean.setflags(write=False)
        cov.setflags(write=False)

        self._mean = mean
        self._cov = cov

    @classmethod
    def vacuum(cls):

        return cls(np.zeros(DIM), VACUUM_VARIANCE * np.eye(DIM))

    @classmethod
    def coherent(cls, x, p, mode=Mode.A):
        """
        vacuum on every mode except a coherent
        displacement (x, p) on one mode
        """

        mean = np.zeros(DIM)
        mean[QuadIndex(mode, Quadrature.X).position] = x
        mean[QuadIndex(mode, Quadrature.P).position] = p

        return cls(mean, VACUUM_VARIANCE * np.eye(DIM))

    @property
    def mean(self):
        return self._mean

    @property
    def cov(self):
        return self._cov

    @property
    def shot_noise_cov(self):
        """
        covariance rescaled so that the vacuum variance is one
        """

        return 4.0 * self._cov

    def variance(self, index):

        if isinstance(index, QuadIndex):

            index = index.position

        return float(self._cov[index, index])

    def covariance(self, first, second):

        if isinstance(first, QuadIndex):

            first = first.position

        if isinstance(second, QuadIndex):

            second = second.position

        return float(self._cov[first, second])


def _check_pair(mode_i, mode_j):

    mode_i, mode_j = Mode(mode_i), Mode(mode_j)

    if mode_i == mode_j:

        raise ValueError("Cannot use the same mode for both inputs of a two-mode map.")

    return mode_i, mode_j


def bs_map(mode_i, mode_j, angle):
    """
    Beam splitter with transmission cos^2(angle) between two modes.
    out_i = cos * in_i - sin * in_j and out_j = sin * in_i + cos * in_j,
    identically on x and p. The third mode is untouched.

    :param mode_i: first mode
    :param mode_j: second mode
    :param angle: beam splitter angle in radians
    :returns:
    :rtype: SymplecticMap

    """

    mode_i, mode_j = _check_pair(mode_i, mode_j)

    if not np.isfinite(angle):

        raise ValueError(f"beam splitter angle must be finite, got {angle}")

    c, s = np.cos(angle), np.sin(angle)

    matrix = np.eye(DIM)

    for quad in Quadrature:

        i = QuadIndex(mode_i, quad).position
        j = QuadIndex(mode_j, quad).position

        matrix[i, i] = c
        matrix[i, j] = -s
        matrix[j, i] = s
        matrix[j, j] = c

    return SymplecticMap(matrix)


def tms_map(mode_i, mode_j, squeezing):
    """
    Two-mode squeezer, i.e. the phase-insensitive amplifier
    with gain cosh^2(squeezing). Since a' = a cosh - c^dagger sinh,
    the x block carries -sinh and the p block +sinh:

    x_i' = cosh x_i - sinh x_j,  p_i' = cosh p_i + sinh p_j

    and symmetrically for mode j.

    :param mode_i: signal mode
    :param mode_j: ancilla mode
    :param squeezing: lambda >= 0
    :returns:
    :rtype: SymplecticMap

    """

    mode_i, mode_j = _check_pair(mode_i, mode_j)

    if not np.isfinite(squeezing) or squeezing < 0:

        raise ValueError(f"squeezing must be finite and non-negative, got {squeezing}")

    ch, sh = np.cosh(squeezing), np.sinh(squeezing)

    matrix = np.eye(DIM)

    for quad, sign in ((Quadrature.X, -1.0), (Quadrature.P, 1.0)):

        i = QuadIndex(mode_i, quad).position
        j = QuadIndex(mode_j, quad).position

        matrix[i, i] = ch
        matrix[i, j] = sign * sh
        matrix[j, i] = sign * sh
        matrix[j, j] = ch

    return SymplecticMap(matrix)


def compose(outer, inner):
    """
    apply inner first, then outer

    :param outer: SymplecticMap applied last
    :param inner: SymplecticMap applied first
    :returns:
    :rtype: SymplecticMap

    """

    return SymplecticMap(outer.matrix @ inner.matrix)


def propagate(state, symplectic_map):
    """
    Heisenberg-picture propagation of the first and
    second moments: mean' = M mean, cov' = M cov M^T

    :param state: MomentState
    :param symplectic_map: SymplecticMap
    :returns:
    :rtype: MomentState

    """

    M = symplectic_map.matrix

    return MomentState(M @ state.mean, M @ state.cov @ M.T)
