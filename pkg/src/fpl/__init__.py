"""Fuzzy path logic: parsing, normalization, quantitative semantics, learning and
model checking of trajectories against time-varying distributions."""

__version__ = "0.1.0"
