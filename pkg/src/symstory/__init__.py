"""symstory: real-time two-character symbol-motion <-> story-text engine."""

__version__ = "0.1.0"
