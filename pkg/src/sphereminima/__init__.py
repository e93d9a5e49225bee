"""Minima of potential energy over the sphere for spherical designs and their duals."""

from __future__ import annotations

from .configurations import Configuration, build, catalog_list
from .potentials import PotentialFunction, parse_kernel

__all__ = ["Configuration", "build", "catalog_list", "PotentialFunction", "parse_kernel"]
__version__ = "0.1.0"
