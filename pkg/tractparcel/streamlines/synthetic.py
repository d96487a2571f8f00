"""Deterministic synthetic bundle generation and the SPEC recipe file."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from tractparcel.streamlines.models import BundleSpec, Streamline, StreamlineSet, SyntheticSpec

logger = logging.getLogger(__name__)

SPEC_HEADER = "SPEC 1"
HELIX_TURNS = 1.5
SINE_PERIODS = 2.0


class SpecFileError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def family_curve(family: str, size: float, u: np.ndarray) -> np.ndarray:
    """Points of a bundle family's centre curve at parameters ``u`` in [0, 1].

    Coordinates are relative to the bundle centre.

    >>> family_curve("arc", 2.0, np.array([0.0, 1.0])).round(12).tolist()
    [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]
    """
    u = np.asarray(u, dtype=np.float64)
    r = size / 2.0
    if family == "helix":
        a = 2.0 * np.pi * HELIX_TURNS * u
        return np.column_stack([r * np.cos(a), r * np.sin(a), size * (u - 0.5)])
    if family == "arc":
        theta = np.pi * u
        return np.column_stack([r * np.cos(theta), np.zeros_like(u), r * np.sin(theta)])
    if family == "sine":
        x = (size / 8.0) * np.sin(2.0 * np.pi * SINE_PERIODS * u)
        return np.column_stack([x, size * (u - 0.5), np.zeros_like(u)])
    raise ValueError(f"unknown bundle family {family!r}")


def _generate_bundle(
    rng: np.random.Generator, bundle: BundleSpec, spec: SyntheticSpec, first_id: int
) -> list[Streamline]:
    center = np.asarray(bundle.center)
    m = spec.points_per_streamline
    out = []
    for i in range(bundle.count):
        # each fiber covers its own sub-range of the curve, so lengths differ
        u0 = rng.uniform(0.0, 0.1)
        u1 = rng.uniform(0.9, 1.0)
        jitter = rng.normal(0.0, 1.0, size=3) * (spec.spread * bundle.size)
        noise = rng.normal(0.0, 1.0, size=(m, 3)) * spec.noise_sigma
        pts = center + jitter + family_curve(bundle.family, bundle.size, np.linspace(u0, u1, m)) + noise
        out.append(Streamline(id=first_id + i, points=pts, label=bundle.name))
    return out


def generate_synthetic_dataset(spec: SyntheticSpec) -> StreamlineSet:
    """Generate labelled streamlines; a pure function of ``spec``.

    One seeded generator is consumed sequentially, bundle by bundle.
    """
    rng = np.random.default_rng(spec.seed)
    streamlines: list[Streamline] = []
    for bundle in spec.bundles:
        streamlines.extend(_generate_bundle(rng, bundle, spec, first_id=len(streamlines)))
    logger.info(
        f"Generated {len(streamlines)} streamlines in {len(spec.bundles)} bundles (seed={spec.seed})"
    )
    return StreamlineSet(streamlines=tuple(streamlines), source=f"synthetic:seed={spec.seed}")


def parse_synthetic_spec(text: str, seed: int = 0) -> SyntheticSpec:
    """Parse a SPEC recipe.

    Lines: ``SPEC 1`` header, ``noise <sigma>``, ``points <m>``, optional
    ``spread <fraction>``, and one ``bundle <name> <family> <cx> <cy> <cz> <size> <count>``
    per bundle.
    """
    rows = [(i + 1, ln.split()) for i, ln in enumerate(text.split("\n")) if ln.strip()]
    if not rows or rows[0][1] != SPEC_HEADER.split():
        raise SpecFileError(rows[0][0] if rows else 1, f"malformed header, expected {SPEC_HEADER!r}")

    fields: dict = {"seed": seed}
    bundles = []
    for line_no, tokens in rows[1:]:
        key = tokens[0]
        try:
            if key == "noise" and len(tokens) == 2:
                fields["noise_sigma"] = float(tokens[1])
            elif key == "points" and len(tokens) == 2:
                fields["points_per_streamline"] = int(tokens[1])
            elif key == "spread" and len(tokens) == 2:
                fields["spread"] = float(tokens[1])
            elif key == "bundle" and len(tokens) == 8:
                name, family, cx, cy, cz, size, count = tokens[1:]
                bundles.append(
                    BundleSpec(
                        name=name,
                        family=family,
                        center=(float(cx), float(cy), float(cz)),
                        size=float(size),
                        count=int(count),
                    )
                )
            else:
                raise SpecFileError(line_no, f"unrecognized line {' '.join(tokens)!r}")
        except (ValueError, ValidationError) as e:
            if isinstance(e, SpecFileError):
                raise
            raise SpecFileError(line_no, str(e)) from e

    if not bundles:
        raise SpecFileError(rows[-1][0], "spec declares no bundles")
    try:
        return SyntheticSpec(bundles=tuple(bundles), **fields)
    except ValidationError as e:
        raise SpecFileError(rows[0][0], str(e)) from e


def read_synthetic_spec(path: str | Path, seed: int = 0) -> SyntheticSpec:
    return parse_synthetic_spec(Path(path).read_text(encoding="utf-8"), seed=seed)
