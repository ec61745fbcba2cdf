"""Bundled calibration data files."""
