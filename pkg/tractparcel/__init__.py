"""tractparcel - Registration-free streamline parcellation with spectral graph CNNs."""

__version__ = "0.1.0"
