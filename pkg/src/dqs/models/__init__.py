"""Bundled example model files."""

from importlib import resources


def bundled(name: str):
    """Traversable handle on a bundled model file, e.g. ``dispersive_qubit.model``."""
    return resources.files(__name__).joinpath(name)
