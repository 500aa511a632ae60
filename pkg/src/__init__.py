"""Infeasible-LP debugging benchmark, agent harness and newsvendor bias bench."""

__version__ = "0.1.0"
