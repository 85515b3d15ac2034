"""Rule-184 traffic networks, signal policies and macroscopic fundamental diagrams."""

__version__ = "0.1.0"
