"""Exact superhedging and pricing of European options under proportional
transaction costs in finite currency markets."""

__version__ = "0.1.0"
