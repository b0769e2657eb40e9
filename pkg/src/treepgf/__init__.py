"""Exact search-cost distributions for binary search trees and digital search trees."""

from __future__ import annotations

from .rational import PGF, BiSeries, Rational, format_rational, parse_rational

__version__ = "0.1.0"

__all__ = ["PGF", "BiSeries", "Rational", "format_rational", "parse_rational", "__version__"]
