"""Test suite for the LP debugging and bias toolkit."""
