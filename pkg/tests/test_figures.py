"""
Tests for the figure data builders.
"""
import math

import numpy as np
import pytest

from src import figures
from src.config import FigureConfig
from src.errors import ConfigurationError


def _values(data, name):
    return [v for _, v in data.column(name)]


class TestBuildFigure:
    """Tests for the shared build_figure surface."""

    def test_unknown_figure(self):
        with pytest.raises(ConfigurationError):
            figures.build_figure(99)

    def test_unknown_override(self):
        with pytest.raises(ConfigurationError):
            figures.build_figure(1, {"not_a_key": 1})

    def test_count_must_allow_an_axis(self):
        with pytest.raises(ConfigurationError):
            figures.build_figure(5, {"count": 1})

    def test_overrides_are_echoed(self):
        data = figures.build_figure(1, {"count": 3, "t2": [0.9]})
        assert data.params["count"] == 3
        assert data.params["zeta0"] == FigureConfig.FIGURES[1].params["zeta0"]
        assert data.x_label == "zeta"

    @pytest.mark.parametrize("figure_id, overrides", [
        (1, {"count": 3}),
        (4, {"count": 3}),
        (5, {"count": 3}),
        (6, {"count": 3}),
    ])
    def test_progress_ticks_match_series_count(self, figure_id, overrides):
        seen = []
        figures.build_figure(figure_id, overrides, progress=seen.append)
        assert len(seen) == figures.series_count(figure_id, overrides)


class TestFigureContents:
    """Tests for the shape of individual figures."""

    def test_gain_dichotomy(self):
        """Unit gain falls with squeezing on lossy arms, |T2/T1| rises."""
        data = figures.build_figure(1, {"t2": [0.6], "start": 0.0, "stop": 2.0, "count": 3})
        unit = _values(data, "lambda=1,t2=0.6")
        star = _values(data, "lambda=|T2/T1|,t2=0.6")
        assert unit[-1] < unit[0]
        assert star[-1] > star[0]

    def test_perfect_arms_approach_unity(self):
        data = figures.build_figure(1, {"t2": [1.0], "start": 0.0, "stop": 6.0, "count": 2})
        assert _values(data, "lambda=|T2/T1|,t2=1.0")[-1] == pytest.approx(1.0, abs=1e-4)

    def test_figure_2_series(self):
        data = figures.build_figure(2, {"count": 3})
        assert len(data.series()) == 6
        best = _values(data, "squeezed zeta0=0.88:lambda_opt")
        star = _values(data, "squeezed zeta0=0.88:lambda=|T2/T1|")
        assert all(b >= s - 1e-9 for b, s in zip(best, star))

    def test_length_curves(self):
        """Fidelity falls with l2, and faster for more photons."""
        data = figures.build_figure(5, {"count": 6})
        assert len(data.series()) == 6
        for name in data.series():
            values = _values(data, name)
            assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        one = data.column("fock N=1")
        ten = data.column("fock N=10")
        for (x, f1), (_, f10) in zip(one, ten):
            assert f10 <= f1 + 1e-12
            if x > 0.0:
                assert f10 < f1

    def test_length_curves_fall_with_input_squeezing(self):
        """More squeezed inputs lose more fidelity on the same arm."""
        data = figures.build_figure(5, {"count": 6})
        names = ["squeezed zeta0=0.88", "squeezed zeta0=1.54", "squeezed zeta0=1.87"]
        columns = [data.column(name) for name in names]
        for points in zip(*columns):
            x = points[0][0]
            values = [f for _, f in points]
            for low, high in zip(values, values[1:]):
                if x > 0.0:
                    assert high < low
                else:
                    assert high <= low + 1e-12

    def test_classical_average(self):
        """Far out the average fidelity meets the mean classical level."""
        data = figures.build_figure(6, {"count": 4})
        assert len(data.series()) == 5
        x_last = data.column("average")[-1][0]
        assert x_last == pytest.approx(3.0)
        classical = np.mean([data.column(f"classical N={n}")[-1][1] for n in range(4)])
        assert abs(data.column("average")[-1][1] - classical) < 0.01

    def test_optimal_gain_curves(self):
        data = figures.build_figure(3, {"zetas": [3.0, 4.0], "start": 1.0, "stop": 10.0, "count": 2})
        assert data.series() == ["zeta=3.0", "zeta=4.0"]
        for x, lam in data.column("zeta=4.0"):
            assert 0.0 < lam < 2.0
            assert x in (1.0, 10.0)

    def test_source_position_figure(self):
        data = figures.build_figure(7, {
            "squeezed": [[0.78, 0.5]],
            "fock_ns": [1],
            "start": 0.05,
            "stop": 0.2,
            "count": 2,
        })
        assert set(data.series()) == {
            "squeezed zeta0=0.78 alpha0=0.5", "inset squeezed zeta0=0.78 alpha0=0.5", "fock N=1", "inset fock N=1",
        }
        for x, l1 in data.column("fock N=1"):
            assert 0.0 <= l1 < 0.5 * x
        assert all(math.isfinite(f) for _, f in data.column("inset fock N=1"))
