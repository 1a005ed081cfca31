"""Cluster and data-centre design automation from component databases."""
from importlib import resources

__version__ = "0.1.0"


def data_path(*parts: str) -> str:
    """Path of a file shipped in the package ``data`` directory."""
    return str(resources.files(__name__).joinpath("data", *parts))
