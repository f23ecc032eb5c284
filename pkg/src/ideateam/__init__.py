"""Human-multi-agent ideation teams: formation, sessions, reflection."""

__version__ = "0.1.0"
