import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import trailing_mean
from shifteval.series import (
    MeanSeries,
    PerformanceMatrix,
    ValidationError,
    aggregate_mean,
    check_pre_treatment_equality,
    matrix_from_csv,
    matrix_to_csv,
    read_csv,
    rolling_mean,
    write_csv,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def pm(rows, seeds=None, label=""):
    rows = np.asarray(rows, dtype=float)
    return PerformanceMatrix(tuple(range(len(rows))) if seeds is None else seeds, rows, label)


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[1, 2], [3, 4]], [2, 3]),
        ([[5, 5, 5]], [5, 5, 5]),
        ([[0, 10], [10, 0], [5, 5], [5, 5]], [5, 5]),
    ],
)
def test_aggregate_mean_examples(rows, expected):
    assert aggregate_mean(pm(rows)).values.tolist() == expected


def test_aggregate_mean_keeps_source_label():
    assert aggregate_mean(pm([[1.0]], label="run-a")).source == "run-a"


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(seeds=(), returns=np.empty((0, 3))),
        dict(seeds=(0,), returns=np.empty((1, 0))),
        dict(seeds=(0, 0), returns=np.zeros((2, 2))),
        dict(seeds=(0, 1), returns=np.zeros((3, 2))),
        dict(seeds=(0,), returns=np.array([[1.0, np.nan]])),
        dict(seeds=(0,), returns=np.array([[np.inf]])),
        dict(seeds=(-1,), returns=np.zeros((1, 2))),
    ],
)
def test_matrix_rejects_invalid(kwargs):
    with pytest.raises(ValidationError):
        PerformanceMatrix(**kwargs)


def test_matrix_rejects_ragged():
    with pytest.raises(ValidationError):
        PerformanceMatrix((0, 1), [[1.0, 2.0], [3.0]])


def test_matrix_is_read_only():
    m = pm([[1, 2]])
    with pytest.raises(ValueError):
        m.returns[0, 0] = 5


@given(
    a=arrays(np.float64, (3, 5), elements=finite),
    b=arrays(np.float64, (3, 5), elements=finite),
    x=st.floats(-10, 10),
    y=st.floats(-10, 10),
)
def test_aggregate_mean_is_linear(a, b, x, y):
    combined = aggregate_mean(pm(x * a + y * b)).values
    separate = x * aggregate_mean(pm(a)).values + y * aggregate_mean(pm(b)).values
    np.testing.assert_allclose(combined, separate, rtol=1e-9, atol=1e-6)


@pytest.mark.parametrize(
    "values, window, expected",
    [
        ([1, 2, 3], 2, [1, 1.5, 2.5]),
        ([7, 7, 7, 7], 3, [7, 7, 7, 7]),
        ([4.25], 25, [4.25]),
    ],
)
def test_rolling_mean_examples(values, window, expected):
    assert rolling_mean(MeanSeries(values), window).values.tolist() == expected


@pytest.mark.parametrize("window", [0, -3, 2.5])
def test_rolling_mean_rejects_bad_window(window):
    with pytest.raises(ValidationError):
        rolling_mean(MeanSeries([1.0, 2.0]), window)


@given(arrays(np.float64, st.integers(1, 60), elements=finite), st.integers(1, 40))
def test_rolling_mean_matches_oracle_and_is_bounded(values, window):
    out = rolling_mean(MeanSeries(values), window).values
    assert out.shape == values.shape
    np.testing.assert_allclose(out, trailing_mean(values.tolist(), window), rtol=1e-12, atol=1e-6)
    assert out.min() >= values.min() and out.max() <= values.max()


@given(arrays(np.float64, st.integers(1, 30), elements=finite))
def test_rolling_mean_window_one_is_identity(values):
    assert np.array_equal(rolling_mean(MeanSeries(values), 1).values, values)


# --- pre-treatment equality ---------------------------------------------------


def test_equality_self_comparison_passes():
    m = pm(np.arange(12.0).reshape(3, 4))
    rep = check_pre_treatment_equality(m, m, T=4, tol=0.0)
    assert rep.passed and rep.max_abs_diff == 0.0 and rep.first_violation is None


def test_equality_ignores_post_period():
    a = pm([[1, 2, 3, 4], [5, 6, 7, 8]])
    b = pm([[1, 2, 0, 0], [5, 6, -9, 9]])
    assert check_pre_treatment_equality(a, b, T=3).passed


def test_equality_reports_seed_and_episode_of_violation():
    base = np.arange(20.0).reshape(2, 10)
    mutated = base.copy()
    mutated[1, 3] += 0.1
    a = pm(base, seeds=(7, 9))
    b = pm(mutated, seeds=(7, 9))
    rep = check_pre_treatment_equality(a, b, T=6, tol=0.0)
    assert not rep.passed
    assert rep.first_violation == (9, 3)
    assert rep.per_seed[7] == 0.0
    assert rep.per_seed[9] == pytest.approx(0.1)


def test_equality_tolerance():
    a = pm([[1.0, 2.0, 3.0]])
    b = pm([[1.0 + 1e-9, 2.0, 3.0]])
    assert not check_pre_treatment_equality(a, b, 3, 0.0).passed
    assert check_pre_treatment_equality(a, b, 3, 1e-8).passed


@pytest.mark.parametrize(
    "b",
    [pm([[1.0, 2.0]], seeds=(1,)), pm([[1.0, 2.0, 3.0]])],
)
def test_equality_rejects_mismatched_shapes(b):
    with pytest.raises(ValidationError):
        check_pre_treatment_equality(pm([[1.0, 2.0]]), b, 1)


@pytest.mark.parametrize("T", [0, 3])
def test_equality_rejects_out_of_range_T(T):
    with pytest.raises(ValidationError):
        check_pre_treatment_equality(pm([[1.0, 2.0]]), pm([[1.0, 2.0]]), T)


@given(
    a=arrays(np.float64, (2, 6), elements=finite),
    b=arrays(np.float64, (2, 6), elements=finite),
    T=st.integers(1, 6),
)
def test_equality_is_symmetric(a, b, T):
    ab = check_pre_treatment_equality(pm(a), pm(b), T)
    ba = check_pre_treatment_equality(pm(b), pm(a), T)
    assert (ab.passed, ab.max_abs_diff, ab.per_seed) == (ba.passed, ba.max_abs_diff, ba.per_seed)


# --- CSV --------------------------------------------------------------------


def test_csv_round_trip(tmp_path):
    m = PerformanceMatrix((3, 1, 8), np.array([[0.1, -2.5], [1e-300, 7.0], [1e300, -0.0]]))
    path = tmp_path / "m.csv"
    write_csv(m, path)
    back = read_csv(path, label="")
    assert back.seeds == (3, 1, 8)
    assert back.returns.tobytes() == m.returns.tobytes()


def test_csv_header_and_layout():
    text = matrix_to_csv(pm([[1.5, 2.0]], seeds=(4,)))
    assert text.splitlines() == ["seed,episode,return", "4,0,1.5", "4,1,2.0"]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "a,b,c\n0,0,1\n",
        "seed,episode,return\n",
        "seed,episode,return\n0,0,1\n0,1,2\n1,0,3\n",  # ragged
        "seed,episode,return\n0,1,1\n0,2,2\n",  # not from 0
        "seed,episode,return\n0,0,1\n0,0,2\n",  # duplicate
        "seed,episode,return\n0,0,x\n",
        "seed,episode,return\n0,0\n",
        "seed,episode,return\n0,0,nan\n",
    ],
)
def test_csv_rejects_bad_input(text):
    with pytest.raises(ValidationError):
        matrix_from_csv(text)
