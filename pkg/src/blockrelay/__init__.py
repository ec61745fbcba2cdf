"""Block relay simulator and analytic models for proof-of-work P2P networks."""

__version__ = "0.1.0"
