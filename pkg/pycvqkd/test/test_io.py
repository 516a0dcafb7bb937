import numpy as np
import numpy.testing as nt
import pytest

from pycvqkd.attacks import THRESHOLD_COLUMNS, threshold_curve
from pycvqkd.errors import MalformedDataError
from pycvqkd.io.plotting.threshold_plot import render_threshold_svg
from pycvqkd.io.threshold_file import (HEADER, format_threshold_csv,
                                       parse_threshold_csv,
                                       read_threshold_csv,
                                       write_threshold_csv)


@pytest.fixture(scope="module")
def small_curve():

    return threshold_curve(10.0, np.linspace(0.0, 0.2, 3))


def test_golden_file(small_curve, golden_thresholds):

    text = format_threshold_csv(small_curve)

    with open(golden_thresholds, "r", newline="") as f:

        golden = f.read()

    assert text == golden

    assert text.endswith("\n")
    assert "\r" not in text


def test_round_trip_formatting(small_curve, tmp_path):

    text = format_threshold_csv(small_curve)

    for line in text.splitlines()[2:]:

        for field in line.split(","):

            assert field == repr(float(field))
            assert field == field.strip()

    file_name = str(tmp_path / "thresholds.csv")

    write_threshold_csv(small_curve, file_name)

    reread = read_threshold_csv(file_name)

    nt.assert_array_equal(reread.rows, small_curve.rows)

    assert reread.v_a == 10.0


@pytest.mark.parametrize(
    "text, line_number",
    [
        ("", 1),
        ("# thresholds\n" + HEADER + "\n0.0,0,0,0,0,0\n", 1),
        ("# cvqkd-thresholds v1 va=-1\n" + HEADER + "\n0.0,0,0,0,0,0\n", 1),
        ("# cvqkd-thresholds v1 va=10\ndelta,eta\n0.0,0,0,0,0,0\n", 2),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n", 3),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.0,0,0,0,0,0\n0.1,1,2\n", 4),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.0,0,0,0,0,abc\n", 3),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.2,0,0,0,0,0\n0.1,0,0,0,0,0\n", 4),
        ("# cvqkd-thresholds v1 va=10\r\n" + HEADER + "\r\n0.0,0,0,0,0,0\r\n", 1),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.0,0,0,0,0,nan\n", 3),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.0,0,0,-inf,0,0\n", 3),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.0,0,0,Infinity,0,0\n", 3),
        ("# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.0,0,0,0,0,0\ninf,0,0,0,0,0\n", 4),
    ],
)
def test_malformed(text, line_number):

    with pytest.raises(MalformedDataError) as e:

        parse_threshold_csv(text)

    assert e.value.line_number == line_number
    assert str(e.value).startswith(f"line {line_number}:")


def test_single_row():

    curve = parse_threshold_csv(
        "# cvqkd-thresholds v1 va=10\n" + HEADER + "\n0.1,0.1,0.2,0.3,0.4,0.05\n"
    )

    assert curve.n_rows == 1
    assert curve.column("eta_opt")[0] == 0.4


def test_svg(small_curve, tmp_path):

    file_name = str(tmp_path / "thresholds.svg")

    render_threshold_svg(small_curve, file_name)

    with open(file_name) as f:

        svg = f.read()

    assert "<svg" in svg

    for column in THRESHOLD_COLUMNS[1:]:

        assert f'id="{column}"' in svg

    for label in ("cloning", "anticloning", "Bell measurement", "optimal Gaussian", "intercept-resend"):

        assert label in svg

    again = str(tmp_path / "again.svg")

    render_threshold_svg(small_curve, again)

    with open(again) as f:

        assert f.read() == svg


def test_svg_single_point(tmp_path):

    curve = threshold_curve(10.0, [0.1])

    file_name = str(tmp_path / "point.svg")

    render_threshold_svg(curve, file_name)

    with open(file_name) as f:

        assert 'id="eta_opt"' in f.read()


def test_unreachable_thresholds(tmp_path):

    curve = threshold_curve(0.5, [0.4, 0.6])

    text = format_threshold_csv(curve)

    assert text.split("\n")[3].split(",")[3] == "inf"

    reread = parse_threshold_csv(text)

    nt.assert_array_equal(reread.rows, curve.rows)

    assert reread.unreachable()[1, 2]

    file_name = str(tmp_path / "low_va.svg")

    render_threshold_svg(reread, file_name)

    with open(file_name) as f:

        assert 'id="eta_bma"' in f.read()
