"""Test suite per msowidth."""
