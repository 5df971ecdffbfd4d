"""Exact computations in global shuffle algebras of a smooth projective curve."""

from .curve_ring import LineBundleMonomial, RingElement, RingModel, euler, invert, make_model
from .fgl import FormalGroupLaw, make_fgl, parse_theory
from .shuffle import (
    ShuffleElement,
    kernel_by_name,
    kernel_gc,
    kernel_gc_norm,
    rn_map,
    shuffle_product,
    verify_genus_relation,
)

__version__ = "0.1.0"

__all__ = [
    "FormalGroupLaw",
    "LineBundleMonomial",
    "RingElement",
    "RingModel",
    "ShuffleElement",
    "euler",
    "invert",
    "kernel_by_name",
    "kernel_gc",
    "kernel_gc_norm",
    "make_fgl",
    "make_model",
    "parse_theory",
    "rn_map",
    "shuffle_product",
    "verify_genus_relation",
]
