"""Desk-scale endpoint monitoring and text-risk alerting platform."""

__version__ = "0.1.0"
