"""Return-on-investment evaluation for incrementally trained text-pair classifiers."""

__version__ = "0.1.0"
