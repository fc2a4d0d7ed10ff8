"""Bit-exact model of an approximate-computing pupil segmentation datapath."""

__version__ = "0.1.0"
