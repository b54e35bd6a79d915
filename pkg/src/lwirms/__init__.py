"""Forward simulation and radiometric processing for a three-band LWIR
camera built from plasmonic hole-array filters."""

__version__ = "0.1.0"
