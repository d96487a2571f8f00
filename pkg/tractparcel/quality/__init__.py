"""Quality checks for streamline validation."""

from tractparcel.quality.checks import partition_valid, validate_streamline

__all__ = ["validate_streamline", "partition_valid"]
