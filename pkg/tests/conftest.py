"""Shared fixtures: tiny hierarchies and models, small labelled streamline sets."""

import logging

import numpy as np
import pytest

from tractparcel.gcnn.params import architecture_for, init_model
from tractparcel.graph.coarsening import build_hierarchy
from tractparcel.streamlines.models import NormalizationTransform, Streamline, StreamlineSet


def make_line(sid, start, end, label=None, num_points=5):
    start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    t = np.linspace(0.0, 1.0, num_points)[:, None]
    return Streamline(id=sid, points=start + t * (end - start), label=label)


def make_separable_set(per_class=30, seed=0, first_id=0):
    """Straight streamlines along y, one cloud at x=-5 ("left") and one at x=+5 ("right")."""
    rng = np.random.default_rng(seed)
    streamlines = []
    for label, x in (("left", -5.0), ("right", 5.0)):
        for _ in range(per_class):
            jitter = rng.normal(0.0, 0.3, size=3)
            start = np.array([x, -4.0, 0.0]) + jitter
            end = np.array([x, 4.0, 0.0]) + jitter + rng.normal(0.0, 0.3, size=3)
            streamlines.append(make_line(first_id + len(streamlines), start, end, label=label))
    return StreamlineSet(streamlines=tuple(streamlines), source="separable")


@pytest.fixture
def tiny_hierarchy():
    return build_hierarchy(8, 3)


@pytest.fixture
def tiny_model(tiny_hierarchy):
    arch = architecture_for(tiny_hierarchy, conv1_channels=2, conv2_channels=3, fc_units=4)
    return init_model(tiny_hierarchy, seed=7, normalization=NormalizationTransform(), bundle="cst_left", architecture=arch)


@pytest.fixture
def tiny_batch():
    rng = np.random.default_rng(3)
    batch = rng.uniform(-1.0, 1.0, size=(6, 8, 3))
    labels = np.array([0, 1, 1, 0, 1, 0])
    return batch, labels


@pytest.fixture
def restore_root_logger():
    """Undo ``configure_logging`` side effects on the root logger."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield root
    for h in root.handlers:
        if h not in handlers:
            h.close()
    root.handlers = handlers
    root.setLevel(level)
