"""Test suite for the sieeopt package."""
