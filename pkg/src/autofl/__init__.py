"""Multi-granular application-domain labelling of software repositories."""

__version__ = "0.1.0"
