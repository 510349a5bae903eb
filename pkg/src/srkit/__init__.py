"""srkit: configurable systematic-review projects, live-installed from a textual model."""

__version__ = "0.1.0"
