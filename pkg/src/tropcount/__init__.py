"""Exact tropical cross-ratio degrees, preimage curves and triangulation constructions."""

from tropcount.errors import GenericityFailure, InvalidInput, NonGeneric

__version__ = "0.1.0"

__all__ = ["GenericityFailure", "InvalidInput", "NonGeneric", "__version__"]
