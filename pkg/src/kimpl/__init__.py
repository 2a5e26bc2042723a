"""Payment promises that steer rational play."""
__version__ = "0.1.0"
