import numpy as np
import numpy.testing as nt
import pytest

from pycvqkd.attacks import (THRESHOLD_COLUMNS, AttackKind, Threshold,
                             amplitude_ratio, attack_report, bell_duplication,
                             closed_form_v_be, heisenberg_product,
                             high_modulation_limits, intercept_resend_bound,
                             minimize_v_be, ordering_holds, security_margin,
                             theta_opt, threshold, threshold_by_bisection,
                             threshold_curve, v_be, v_be_symmetries, xyz)
from pycvqkd.circuit import (ChannelParams, CircuitParams, CoherentAmplitude,
                             build_circuit)
from pycvqkd.ensemble import (Variable, VarianceConvention,
                              conditional_variance, ensemble_moments)
from pycvqkd.errors import DomainError
from pycvqkd.quadrature import Mode, Quadrature, QuadIndex

SNU = VarianceConvention.SHOT_NOISE


def _moment_v_be(channel, theta, eve):

    moments = ensemble_moments(channel, theta)

    bob = Variable.X_BOB if eve % 2 == 0 else Variable.P_BOB

    return conditional_variance(moments, bob, eve, SNU)


def test_xyz_is_the_clone_row(channel):

    for theta in np.linspace(-1.5, 1.5, 7):

        coef = xyz(theta, channel.eta, channel.delta)

        row = build_circuit(CircuitParams.from_channel(channel, theta)).row(
            QuadIndex(Mode.B, Quadrature.X)
        )

        nt.assert_allclose(coef.as_array(), row[[0, 2, 4]], atol=1e-14)


def test_v_be_matches_moments(random_channels):

    for channel in random_channels[:30]:

        for theta in np.linspace(-1.5, 1.5, 11):

            assert v_be(theta, channel.eta, channel.delta, channel.v_a) == pytest.approx(
                _moment_v_be(channel, theta, Variable.X_CLONE), rel=1e-10
            )


def test_v_be_conventions(channel):

    snu = v_be(0.3, channel.eta, channel.delta, channel.v_a)
    quad = v_be(0.3, channel.eta, channel.delta, channel.v_a, VarianceConvention.QUADRATURE)

    assert snu == pytest.approx(4.0 * quad)


def test_v_be_vectorised(channel):

    thetas = np.linspace(-1.0, 1.0, 5)

    values = v_be(thetas, channel.eta, channel.delta, channel.v_a)

    for theta, value in zip(thetas, values):

        assert value == pytest.approx(v_be(theta, channel.eta, channel.delta, channel.v_a))


def test_symmetries():

    rng = np.random.default_rng(7)

    for _ in range(10):

        eta = rng.uniform(0.1, 1.0)
        channel = ChannelParams(eta, rng.uniform(0.0, 1.5) * eta, rng.uniform(1.0, 10.0))

        for theta in np.linspace(-np.pi / 2, np.pi / 2, 50):

            expected = (
                _moment_v_be(channel, theta, Variable.X_CLONE),
                _moment_v_be(channel, theta, Variable.X_ANTICLONE),
                _moment_v_be(channel, theta, Variable.P_CLONE),
                _moment_v_be(channel, theta, Variable.P_ANTICLONE),
            )

            got = v_be_symmetries(theta, channel.eta, channel.delta, channel.v_a)

            nt.assert_allclose(got, expected, rtol=1e-12)


def test_closed_forms_match_moments():

    for eta in (0.3, 0.6, 0.9):

        for fraction in (0.05, 0.3, 0.8):

            for v_a in (1.0, 10.0, 100.0):

                channel = ChannelParams(eta, fraction * 2.0 * eta, v_a)

                t_opt = theta_opt(channel.eta, channel.delta, v_a)

                cases = {
                    AttackKind.CLONING: [(0.0, Variable.X_CLONE), (0.0, Variable.P_CLONE)],
                    AttackKind.ANTICLONING: [
                        (0.0, Variable.X_ANTICLONE),
                        (0.0, Variable.P_ANTICLONE),
                    ],
                    AttackKind.BELL_MEASUREMENT: [
                        (np.pi / 4, Variable.X_CLONE),
                        (np.pi / 4, Variable.P_ANTICLONE),
                    ],
                    AttackKind.OPTIMAL: [(t_opt, Variable.X_CLONE), (-t_opt, Variable.P_CLONE)],
                }

                for kind, reads in cases.items():

                    closed = closed_form_v_be(kind, channel.eta, channel.delta, v_a)

                    for theta, eve in reads:

                        assert _moment_v_be(channel, theta, eve) == pytest.approx(
                            closed, rel=1e-10
                        )


def test_example_values(channel):

    eta, delta, v_a = channel.eta, channel.delta, channel.v_a

    assert closed_form_v_be(AttackKind.CLONING, eta, delta, v_a) == pytest.approx(11.1 / 6.51)
    assert closed_form_v_be(AttackKind.OPTIMAL, eta, delta, v_a) == pytest.approx(11.0 / 7.1)

    # 1 + delta - eta((4 + 3V)delta - 2 V eta) / ((1 + V)delta + 2 eta)
    assert closed_form_v_be(AttackKind.ANTICLONING, eta, delta, v_a) == pytest.approx(
        1.1 + 0.5 * 6.6 / 2.1
    )

    assert closed_form_v_be(AttackKind.CLONING, 1.0, 1.0, 10.0) == pytest.approx(23.0 / 12.0)
    assert closed_form_v_be(AttackKind.BELL_MEASUREMENT, 1.0, 1.0, 10.0) == pytest.approx(
        1.0 + 10.0 / 49.0
    )


def test_lossless_limits():

    # no excess noise: the anticlone holds nothing about Bob
    for v_a in (1.0, 10.0):

        for eta in (0.2, 0.7, 1.0):

            assert closed_form_v_be(AttackKind.ANTICLONING, eta, 0.0, v_a) == pytest.approx(
                1.0 + eta * v_a
            )

            assert theta_opt(eta, 0.0, v_a) == 0.0


def test_theta_opt_value(channel):

    theta = theta_opt(channel.eta, channel.delta, channel.v_a)

    ratio = np.sqrt(0.05) * 12.0 / (np.sqrt(1.1) * 3.9)

    assert np.tan(theta) == pytest.approx(ratio, rel=1e-12)
    assert theta == pytest.approx(0.58058, abs=1e-4)


def test_theta_opt_boundary():

    # V (eta - delta) = delta puts the optimum on the pi/2 boundary
    eta, v_a = 0.6, 1.0
    delta = v_a * eta / (1.0 + v_a)

    assert theta_opt(eta, delta, v_a) == pytest.approx(np.pi / 2)


def _angle_gap(a, b):

    return abs((a - b + np.pi / 2) % np.pi - np.pi / 2)


def test_optimal_attack_is_the_minimum(random_channels):

    for channel in random_channels:

        eta, delta, v_a = channel.eta, channel.delta, channel.v_a

        theta_num, v_num = minimize_v_be(eta, delta, v_a)

        closed = closed_form_v_be(AttackKind.OPTIMAL, eta, delta, v_a)

        assert v_num == pytest.approx(closed, rel=1e-8)

        denominator = v_a * (eta - delta) - delta

        if denominator > 0:

            assert _angle_gap(theta_num, theta_opt(eta, delta, v_a, verify=False)) < 1e-6

        assert -np.pi / 2 < theta_num <= np.pi / 2


def test_heisenberg_saturation(random_channels):

    for channel in random_channels:

        assert heisenberg_product(channel) == pytest.approx(1.0, rel=1e-10)


def test_attack_report(channel):

    report = attack_report(AttackKind.OPTIMAL, channel)

    assert report.v_be_x == pytest.approx(11.0 / 7.1, rel=1e-10)
    assert report.v_be_p == pytest.approx(11.0 / 7.1, rel=1e-10)
    assert report.v_ba == pytest.approx(1.1)
    assert report.secure
    assert report.margin == pytest.approx(11.0 / 7.1 - 1.1, rel=1e-9)
    assert report.threshold_eta == pytest.approx(0.21)

    quad = report.in_convention(VarianceConvention.QUADRATURE)

    assert quad.v_ba == pytest.approx(0.275)
    assert quad.margin == pytest.approx(report.margin)

    d = report.as_dict()

    assert set(d) == {
        "kind",
        "eta",
        "delta",
        "v_a",
        "theta",
        "v_ba_snu",
        "v_be_x_snu",
        "v_be_p_snu",
        "threshold_eta",
        "secure",
    }

    assert d["kind"] == "optimal"

    assert report.table["attack"] == "optimal"


@pytest.mark.parametrize("kind", list(AttackKind))
def test_report_uses_closed_forms(kind, channel):

    report = attack_report(kind, channel)

    closed = closed_form_v_be(kind, channel.eta, channel.delta, channel.v_a)

    assert report.v_be_x == pytest.approx(closed, rel=1e-10)
    assert report.v_be_p == pytest.approx(closed, rel=1e-10)


def test_insecure_cloning():

    report = attack_report(AttackKind.CLONING, ChannelParams(0.1, 0.1, 10.0))

    assert not report.secure
    assert report.margin < 0
    assert security_margin(AttackKind.CLONING, ChannelParams(0.1, 0.1, 10.0)) < 0


def test_thresholds_example():

    expected = {
        AttackKind.CLONING: 0.146515,
        AttackKind.ANTICLONING: 0.17,
        AttackKind.BELL_MEASUREMENT: 0.208091,
        AttackKind.OPTIMAL: 0.21,
    }

    for kind, value in expected.items():

        assert threshold(kind, 0.1, 10.0) == pytest.approx(value, abs=1e-6)

    assert intercept_resend_bound(0.1) == 0.05

    for kind in AttackKind:

        assert threshold(kind, 0.0, 10.0) == 0.0


@pytest.mark.parametrize("kind", list(AttackKind))
def test_threshold_consistency(kind):

    for v_a in (1.0, 10.0, 1e3):

        for delta in (0.01, 0.1, 0.3):

            eta = threshold(kind, delta, v_a)

            if eta.unreachable:

                assert threshold_by_bisection(kind, delta, v_a) is None

                continue

            assert closed_form_v_be(kind, eta, delta, v_a) == pytest.approx(1.0 + delta, abs=1e-9)

            assert threshold_by_bisection(kind, delta, v_a) == pytest.approx(eta, abs=1e-9)


def test_unreachable_threshold(caplog):

    value = threshold(AttackKind.ANTICLONING, 0.6, 10.0)

    assert isinstance(value, Threshold)
    assert value.unreachable
    assert value == pytest.approx(1.02)

    assert "cannot be secure" in caplog.text

    assert threshold_by_bisection(AttackKind.ANTICLONING, 0.6, 10.0) is None


def test_bell_threshold_without_root(caplog):

    # v_a < delta: no transmission survives the Bell measurement attack
    value = threshold(AttackKind.BELL_MEASUREMENT, 0.6, 0.5)

    assert value == np.inf
    assert value.unreachable
    assert "cannot be secure" in caplog.text

    assert threshold_by_bisection(AttackKind.BELL_MEASUREMENT, 0.6, 0.5) is None

    for eta in np.linspace(0.31, 1.0, 24):

        assert closed_form_v_be(AttackKind.BELL_MEASUREMENT, eta, 0.6, 0.5) < 1.6

    # v_a == delta still has a root
    assert np.isfinite(threshold(AttackKind.BELL_MEASUREMENT, 0.5, 0.5))

    assert not Threshold(1.0).unreachable
    assert Threshold(np.nan).unreachable

    report = attack_report(AttackKind.BELL_MEASUREMENT, ChannelParams(0.9, 0.6, 0.5))

    assert report.as_dict()["threshold_eta"] is None
    assert not report.secure

    row = dict(zip(THRESHOLD_COLUMNS, threshold_curve(0.5, [0.6]).rows[0]))

    assert row["eta_bma"] == np.inf
    assert not ordering_holds(row)


def test_threshold_domain():

    with pytest.raises(DomainError):

        threshold(AttackKind.OPTIMAL, -0.1, 10.0)

    with pytest.raises(DomainError):

        threshold(AttackKind.OPTIMAL, 0.1, 0.0)

    with pytest.raises(DomainError):

        intercept_resend_bound(-1.0)


DELTA_MAX = {1.0: 0.05, 10.0: 0.45, 1e3: 0.6, 1e6: 0.6}


@pytest.mark.parametrize("v_a", sorted(DELTA_MAX))
def test_threshold_ordering(v_a):

    deltas = np.linspace(0.0, DELTA_MAX[v_a], 201)[1:]

    curve = threshold_curve(v_a, deltas)

    df = curve.to_dataframe()

    tol = 1e-12

    assert np.all(df.eta_opt >= df.eta_bma - tol)
    assert np.all(df.eta_bma >= df.eta_anticlone - tol)
    assert np.all(df.eta_anticlone >= df.eta_clone - tol)
    assert np.all(df.eta_clone >= df.eta_intercept_resend - tol)

    assert curve.ordering_holds().all()


def test_ordering_breaks_at_finite_modulation():

    row = dict(zip(THRESHOLD_COLUMNS, threshold_curve(1.0, [0.1]).rows[0]))

    assert row["eta_bma"] < row["eta_anticlone"]
    assert not ordering_holds(row)


def test_high_loss_asymptotics():

    delta, v_a = 1e-3, 1e6

    assert threshold(AttackKind.CLONING, delta, v_a) / delta == pytest.approx(1.5, rel=0.01)
    assert threshold(AttackKind.ANTICLONING, delta, v_a) / delta == pytest.approx(1.5, rel=0.01)
    assert threshold(AttackKind.BELL_MEASUREMENT, delta, v_a) / delta == pytest.approx(
        2.0, rel=0.01
    )
    assert threshold(AttackKind.OPTIMAL, delta, v_a) / delta == pytest.approx(2.0, rel=0.01)


def test_high_modulation_limits(caplog):

    eta, delta = 0.5, 0.1

    v_limit, theta_limit = high_modulation_limits(eta, delta)

    assert v_limit == pytest.approx(1.0 / 0.6)

    assert closed_form_v_be(AttackKind.OPTIMAL, eta, delta, 1e9) == pytest.approx(
        v_limit, rel=1e-6
    )
    assert theta_opt(eta, delta, 1e9, verify=False) == pytest.approx(theta_limit, abs=1e-6)

    v_limit, theta_limit = high_modulation_limits(0.4, 0.4)

    assert theta_limit == pytest.approx(np.pi / 2)
    assert "boundary" in caplog.text


def test_curve(tmp_path):

    curve = threshold_curve(10.0, [0.2, 0.0, 0.1], workers=3)

    nt.assert_array_equal(curve.deltas, [0.0, 0.1, 0.2])

    serial = threshold_curve(10.0, [0.0, 0.1, 0.2])

    nt.assert_array_equal(curve.rows, serial.rows)

    assert list(curve.to_dataframe().columns) == list(THRESHOLD_COLUMNS)

    assert not curve.unreachable().any()

    fig = curve.display()

    fig.savefig(str(tmp_path / "curve.png"))

    with pytest.raises(DomainError):

        threshold_curve(10.0, [-0.1, 0.1])


def test_amplitude_ratio(channel):

    ratio = amplitude_ratio(channel, CoherentAmplitude(0.8, 0.2))

    assert ratio == pytest.approx(np.sqrt(5.5))

    assert ratio >= 1.0

    assert amplitude_ratio(ChannelParams(0.5, 0.0, 10.0), CoherentAmplitude(1.0)) == np.inf


def test_bell_duplication():

    x_coef, p_coef = bell_duplication(ChannelParams(1.0, 1.0, 10.0))

    assert x_coef == pytest.approx(np.sqrt(2), abs=1e-12)
    assert p_coef == pytest.approx(np.sqrt(2), abs=1e-12)


def test_amplitude_ratio_random_draws(random_channels):

    rng = np.random.default_rng(2024)

    for channel in random_channels:

        eta, delta = channel.eta, channel.delta

        expected = np.sqrt(2.0 * eta * (1.0 - eta + 0.5 * delta) / delta)

        for _ in range(5):

            alpha = CoherentAmplitude(*rng.normal(0.0, 2.0, size=2))

            ratio = amplitude_ratio(channel, alpha)

            assert ratio == pytest.approx(expected, rel=1e-10)
            assert ratio >= 1.0 - 1e-12


def test_closed_forms_match_moments_random_draws():

    rng = np.random.default_rng(4321)

    for _ in range(1000):

        eta = rng.uniform(0.05, 1.0)
        channel = ChannelParams(eta, rng.uniform(0.0, 0.99) * 2.0 * eta, 10 ** rng.uniform(0.0, 3.0))

        eta, delta, v_a = channel.eta, channel.delta, channel.v_a

        t_opt = theta_opt(eta, delta, v_a)

        cases = {
            AttackKind.CLONING: (0.0, Variable.X_CLONE),
            AttackKind.ANTICLONING: (0.0, Variable.P_ANTICLONE),
            AttackKind.BELL_MEASUREMENT: (np.pi / 4, Variable.X_CLONE),
            AttackKind.OPTIMAL: (t_opt, Variable.X_CLONE),
        }

        for kind, (theta, eve) in cases.items():

            assert _moment_v_be(channel, theta, eve) == pytest.approx(
                closed_form_v_be(kind, eta, delta, v_a), rel=1e-9
            )
