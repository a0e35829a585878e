"""Workbench for finite restriction categories, partial-map categories,
sites of monic covers, and (join) restriction presheaves."""

__version__ = "0.1.0"
