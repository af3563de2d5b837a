"""Gated warfarin dosing.

A from-scratch kernel support vector machine screens patients into
"safe for the dose model" and "high risk" groups; the IWPC clinical
dose model is applied only to the safe group.
"""

from __future__ import annotations

__version__ = "0.1.0"
