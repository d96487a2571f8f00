"""Quality checks applied to streamlines before they enter the network."""

from __future__ import annotations

import logging

from tractparcel.streamlines.models import Streamline, StreamlineSet

logger = logging.getLogger(__name__)


def ensure_positive_arc_length(s: Streamline) -> tuple[bool, str | None]:
    """Check that the streamline can be resampled."""
    if not s.arc_length > 0:
        reason = "zero arc length"
        logger.warning("Streamline %s validation failed: %s", s.id, reason)
        return False, reason

    return True, None


def ensure_labelled(s: Streamline) -> tuple[bool, str | None]:
    """Check that the streamline carries a bundle label."""
    if s.label is None:
        reason = "no bundle label"
        logger.warning("Streamline %s validation failed: %s", s.id, reason)
        return False, reason

    return True, None


def validate_streamline(s: Streamline, require_label: bool = False) -> tuple[bool, list[str]]:
    """Validate a streamline against all quality checks."""
    reasons = []

    is_valid, reason = ensure_positive_arc_length(s)
    if not is_valid:
        reasons.append(reason)

    if require_label:
        is_valid, reason = ensure_labelled(s)
        if not is_valid:
            reasons.append(reason)

    is_valid = len(reasons) == 0
    return is_valid, reasons


def partition_valid(
    streamline_set: StreamlineSet, require_label: bool = False
) -> tuple[list[Streamline], list[tuple[int, list[str]]]]:
    """Split a set into usable streamlines and rejected ``(id, reasons)`` pairs."""
    valid = []
    rejected = []
    for s in streamline_set.streamlines:
        is_valid, reasons = validate_streamline(s, require_label=require_label)
        if is_valid:
            valid.append(s)
        else:
            rejected.append((s.id, reasons))
    return valid, rejected
