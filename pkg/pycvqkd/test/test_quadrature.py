import numpy as np
import numpy.testing as nt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pycvqkd.quadrature import (DIM, Mode, MomentState, Quadrature, QuadIndex,
                                SymplecticMap, bs_map, compose, propagate,
                                symplectic_form, tms_map)

pairs = st.sampled_from([(Mode.A, Mode.B), (Mode.B, Mode.C), (Mode.A, Mode.C), (Mode.C, Mode.A)])


@given(pair=pairs, angle=st.floats(-10.0, 10.0))
def test_beam_splitter_is_symplectic(pair, angle):

    M = bs_map(*pair, angle)

    assert M.is_symplectic()

    assert M.det == pytest.approx(1.0, abs=1e-12)


@given(pair=pairs, squeezing=st.floats(0.0, 5.0))
def test_two_mode_squeezer_is_symplectic(pair, squeezing):

    assert tms_map(*pair, squeezing).is_symplectic()


def test_invalid_maps():

    with pytest.raises(ValueError):

        bs_map(Mode.B, Mode.B, 0.3)

    with pytest.raises(ValueError):

        tms_map(Mode.A, Mode.A, 0.3)

    with pytest.raises(ValueError):

        tms_map(Mode.A, Mode.C, -0.1)

    with pytest.raises(ValueError):

        SymplecticMap(np.diag([2.0, 2.0, 1.0, 1.0, 1.0, 1.0]))


def test_quad_index():

    for position in range(DIM):

        assert QuadIndex.from_position(position).position == position

    assert repr(QuadIndex(Mode.A, Quadrature.X)) == "x_a"
    assert repr(QuadIndex(Mode.C, Quadrature.P)) == "p_c"

    assert QuadIndex(Mode.B, Quadrature.P) == QuadIndex.from_position(3)

    with pytest.raises(ValueError):

        QuadIndex.from_position(DIM)


def test_symplectic_form():

    J = symplectic_form()

    nt.assert_array_equal(J, -J.T)
    nt.assert_array_equal(J @ J, -np.eye(DIM))


def test_beam_splitter_keeps_vacuum():

    out = propagate(MomentState.vacuum(), bs_map(Mode.A, Mode.B, 0.7))

    nt.assert_allclose(out.cov, 0.25 * np.eye(DIM), atol=1e-15)


def test_beam_splitter_splits_amplitude():

    state = MomentState.coherent(1.0, -2.0, Mode.A)

    angle = np.pi / 3

    out = propagate(state, bs_map(Mode.A, Mode.B, angle))

    x_a, p_a = QuadIndex(Mode.A, Quadrature.X), QuadIndex(Mode.A, Quadrature.P)
    x_b, p_b = QuadIndex(Mode.B, Quadrature.X), QuadIndex(Mode.B, Quadrature.P)

    assert out.mean[x_a.position] == pytest.approx(np.cos(angle))
    assert out.mean[p_a.position] == pytest.approx(-2.0 * np.cos(angle))
    assert out.mean[x_b.position] == pytest.approx(np.sin(angle))
    assert out.mean[p_b.position] == pytest.approx(-2.0 * np.sin(angle))


def test_two_mode_squeezed_vacuum():

    squeezing = 0.8

    out = propagate(MomentState.vacuum(), tms_map(Mode.A, Mode.C, squeezing))

    x_a, p_a = QuadIndex(Mode.A, Quadrature.X), QuadIndex(Mode.A, Quadrature.P)
    x_c, p_c = QuadIndex(Mode.C, Quadrature.X), QuadIndex(Mode.C, Quadrature.P)

    assert out.variance(x_a) == pytest.approx(0.25 * np.cosh(2 * squeezing))
    assert out.variance(p_c) == pytest.approx(0.25 * np.cosh(2 * squeezing))

    assert out.covariance(x_a, x_c) == pytest.approx(-0.25 * np.sinh(2 * squeezing))
    assert out.covariance(p_a, p_c) == pytest.approx(0.25 * np.sinh(2 * squeezing))

    # mode b is untouched
    assert out.variance(QuadIndex(Mode.B, Quadrature.X)) == pytest.approx(0.25)


def test_compose_order():

    first = bs_map(Mode.A, Mode.B, 0.2)
    second = bs_map(Mode.A, Mode.B, 0.5)

    nt.assert_allclose(compose(second, first).matrix, bs_map(Mode.A, Mode.B, 0.7).matrix, atol=1e-15)

    amplifier = tms_map(Mode.A, Mode.C, 0.4)

    nt.assert_allclose(
        compose(first, amplifier).matrix, first.matrix @ amplifier.matrix, atol=1e-15
    )

    assert compose(SymplecticMap.identity(), first) == first


def test_moment_state_checks():

    cov = 0.25 * np.eye(DIM)

    asym = cov.copy()
    asym[0, 1] = 0.1

    with pytest.raises(ValueError):

        MomentState(np.zeros(DIM), asym)

    negative = cov.copy()
    negative[0, 0] = -0.1

    with pytest.raises(ValueError):

        MomentState(np.zeros(DIM), negative)

    state = MomentState.vacuum()

    nt.assert_array_equal(state.shot_noise_cov, np.eye(DIM))

    with pytest.raises(ValueError):

        state.cov[0, 0] = 1.0


@given(
    pair=pairs,
    angle=st.floats(-10.0, 10.0),
    mean=st.lists(st.floats(-100.0, 100.0), min_size=DIM, max_size=DIM),
)
def test_beam_splitter_keeps_mean_norm(pair, angle, mean):

    mean = np.array(mean)

    out = bs_map(*pair, angle).matrix @ mean

    i, j = pair
    touched = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]

    assert np.sum(out[touched] ** 2) == pytest.approx(np.sum(mean[touched] ** 2), rel=1e-12, abs=1e-9)

    untouched = [k for k in range(DIM) if k not in touched]

    nt.assert_array_equal(out[untouched], mean[untouched])


@given(pair=pairs, squeezing=st.floats(0.0, 5.0))
def test_two_mode_squeezer_blocks(pair, squeezing):

    M = tms_map(*pair, squeezing).matrix

    i, j = pair

    x_rows = [2 * i, 2 * j]
    p_rows = [2 * i + 1, 2 * j + 1]

    x_block = M[np.ix_(x_rows, x_rows)]
    p_block = M[np.ix_(p_rows, p_rows)]

    nt.assert_array_equal(np.diag(x_block), np.diag(p_block))
    nt.assert_array_equal(x_block[0, 1], -p_block[0, 1])
    nt.assert_array_equal(x_block[1, 0], -p_block[1, 0])

    assert abs(x_block[0, 1]) == pytest.approx(np.sinh(squeezing), rel=1e-12)
    assert x_block[0, 0] == pytest.approx(np.cosh(squeezing), rel=1e-12)

    # no x-p mixing
    assert not M[np.ix_(x_rows, p_rows)].any()
    assert not M[np.ix_(p_rows, x_rows)].any()


@given(
    angles=st.lists(st.floats(-np.pi, np.pi), min_size=2, max_size=2),
    squeezing=st.floats(0.0, 2.0),
    seed=st.integers(0, 2 ** 32 - 1),
)
def test_propagate_keeps_positive_semidefinite(angles, squeezing, seed):

    rng = np.random.default_rng(seed)

    A = rng.normal(size=(DIM, DIM))

    state = MomentState(rng.normal(size=DIM), 0.25 * np.eye(DIM) + A @ A.T)

    circuit = compose(
        bs_map(Mode.B, Mode.C, angles[1]),
        compose(bs_map(Mode.A, Mode.B, angles[0]), tms_map(Mode.A, Mode.C, squeezing)),
    )

    out = propagate(state, circuit)

    scale = max(1.0, np.abs(out.cov).max())

    assert np.linalg.eigvalsh(out.cov).min() >= -1e-12 * scale

    nt.assert_allclose(out.cov, out.cov.T, atol=1e-14 * scale)
