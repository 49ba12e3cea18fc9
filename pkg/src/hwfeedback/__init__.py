"""Evaluation and feedback-placement toolkit for handwriting recognition pipelines."""

__version__ = "0.1.0"
