"""Tests for arc-length resampling and normalization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tractparcel.streamlines.models import NormalizationTransform, Streamline, StreamlineSet
from tractparcel.streamlines.resample import (
    DegenerateStreamlineError,
    NormalizationError,
    apply_normalization,
    cumulative_arc_length,
    fit_normalization,
    invert_normalization,
    resample_uniform,
)

coords = arrays(
    np.float64,
    st.tuples(st.integers(2, 12), st.just(3)),
    elements=st.integers(-800, 800).map(lambda v: v / 8.0),
)


def _arc_position(pts, starts, p):
    """Arc length from the first vertex to ``p``, which must lie on the polyline."""
    best, position = np.inf, 0.0
    for a, b, start in zip(pts[:-1], pts[1:], starts):
        d = b - a
        t = np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0)
        off = np.linalg.norm(a + t * d - p)
        if off < best:
            best, position = off, start + t * np.linalg.norm(d)
    assert best < 1e-9
    return position


class TestResampleUniform:
    def test_straight_line(self):
        s = Streamline(id=0, points=[[0, 0, 0], [10, 0, 0]])
        out = resample_uniform(s, 11)
        np.testing.assert_allclose(out.points[:, 0], np.arange(11.0), atol=1e-12)
        np.testing.assert_allclose(out.points[:, 1:], 0.0)

    def test_equal_spacing_along_bent_polyline(self):
        s = Streamline(id=0, points=[[0, 0, 0], [1, 0, 0], [1, 3, 0]])
        out = resample_uniform(s, 5)
        seg = np.linalg.norm(np.diff(out.points, axis=0), axis=1)
        # the 2nd sample sits exactly on the corner, so chords equal arc steps
        np.testing.assert_allclose(seg, 1.0, atol=1e-12)

    def test_endpoints_preserved_exactly(self):
        s = Streamline(id=0, points=[[0.1, 0.2, 0.3], [1.7, -2.0, 0.5], [3.3, 1.1, 9.9]])
        out = resample_uniform(s, 100)
        assert tuple(out.points[0]) == tuple(s.points[0])
        assert tuple(out.points[-1]) == tuple(s.points[-1])

    def test_uniform_arc_gaps_on_irregular_polyline(self):
        rng = np.random.default_rng(37)
        steps = rng.normal(size=(36, 3)) * rng.uniform(0.05, 3.0, size=(36, 1))
        pts = np.vstack([np.zeros(3), np.cumsum(steps, axis=0)])
        s = Streamline(id=0, points=pts)
        out = resample_uniform(s, 100)

        seg_len = np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(axis=1))
        starts = np.concatenate([[0.0], np.cumsum(seg_len)[:-1]])
        total = seg_len.sum()
        positions = [_arc_position(pts, starts, p) for p in out.points]
        np.testing.assert_allclose(np.diff(positions), total / 99, rtol=1e-9)
        assert tuple(out.points[0]) == tuple(pts[0])
        assert tuple(out.points[-1]) == tuple(pts[-1])

    def test_uniform_gaps_on_unevenly_sampled_line(self):
        ts = np.sort(np.random.default_rng(5).uniform(0.0, 1.0, size=35))
        pts = np.outer(np.concatenate([[0.0], ts, [1.0]]), [3.0, -4.0, 12.0])
        out = resample_uniform(Streamline(id=0, points=pts), 100)
        gaps = np.linalg.norm(np.diff(out.points, axis=0), axis=1)
        np.testing.assert_allclose(gaps, 13.0 / 99, rtol=1e-9)

    def test_duplicate_points_skipped(self):
        s = Streamline(id=0, points=[[0, 0, 0], [0, 0, 0], [2, 0, 0]])
        out = resample_uniform(s, 3)
        np.testing.assert_allclose(out.points[:, 0], [0.0, 1.0, 2.0])

    def test_zero_length_raises(self):
        s = Streamline(id=4, points=[[1, 1, 1], [1, 1, 1]])
        with pytest.raises(DegenerateStreamlineError, match="streamline 4"):
            resample_uniform(s, 10)

    def test_n_below_two_raises(self):
        s = Streamline(id=0, points=[[0, 0, 0], [1, 0, 0]])
        with pytest.raises(DegenerateStreamlineError):
            resample_uniform(s, 1)

    def test_label_and_id_kept(self):
        s = Streamline(id=9, points=[[0, 0, 0], [1, 0, 0]], label="uf")
        out = resample_uniform(s, 4)
        assert (out.id, out.label) == (9, "uf")

    def test_idempotent_on_uniform_input(self):
        s = resample_uniform(Streamline(id=0, points=[[0, 0, 0], [4, 0, 0], [4, 4, 0]]), 9)
        again = resample_uniform(s, 9)
        np.testing.assert_allclose(again.points, s.points, atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(coords, st.integers(2, 50))
    def test_arc_length_preserved_or_shortened(self, pts, n):
        s = Streamline(id=0, points=pts)
        if not s.arc_length > 1e-6:
            return
        out = resample_uniform(s, n)
        assert out.num_points == n
        assert cumulative_arc_length(out.points)[-1] <= s.arc_length * (1 + 1e-9)


class TestNormalization:
    def test_maps_bounding_box_to_unit_cube(self):
        s = StreamlineSet(streamlines=(Streamline(id=0, points=[[0, 10, -4], [2, 30, 4]]),))
        t = fit_normalization([s])
        out = apply_normalization(t, s.streamlines[0])
        np.testing.assert_allclose(out.points, [[-1, -1, -1], [1, 1, 1]])

    def test_degenerate_axis_maps_to_zero(self):
        s = StreamlineSet(streamlines=(Streamline(id=0, points=[[0, 5, 0], [2, 5, 1]]),))
        t = fit_normalization([s])
        assert t.scale[1] == 1.0
        assert apply_normalization(t, s.streamlines[0]).points[0, 1] == 0.0

    def test_empty_input_raises(self):
        with pytest.raises(NormalizationError):
            fit_normalization([StreamlineSet()])

    def test_rejects_non_positive_scale(self):
        with pytest.raises(ValueError):
            NormalizationTransform(scale=(1.0, 0.0, 1.0))

    @settings(max_examples=60, deadline=None)
    @given(coords)
    def test_within_bounds_and_invertible(self, pts):
        s = Streamline(id=0, points=pts)
        t = fit_normalization([StreamlineSet(streamlines=(s,))])
        out = apply_normalization(t, s)
        assert np.all(np.abs(out.points) <= 1.0 + 1e-12)
        # relative to the largest coordinate magnitude
        scale = np.abs(pts).max()
        np.testing.assert_allclose(invert_normalization(t, out).points, s.points, rtol=1e-12, atol=1e-12 * scale)
