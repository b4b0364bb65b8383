"""Iterated Tor towers over F_p and the higher THH series built from them."""
from .algebra import (
    AlgebraError,
    GradedAlgebra,
    InvariantError,
    PoincareSeries,
    divided_power,
    exterior,
    polynomial,
    tensor,
    truncated_polynomial,
)
from .bar import BarComplex, Limits, ResourceLimitError, build_bar
from .oracle import predict_series
from .thh import hh1_dimension, ramification, thh_local, thh_z
from .tor import TorAlgebra, tor
from .tower import TowerSpec, run_tower, tower_series

__version__ = "0.1.0"

__all__ = [
    "AlgebraError",
    "BarComplex",
    "GradedAlgebra",
    "InvariantError",
    "Limits",
    "PoincareSeries",
    "ResourceLimitError",
    "TorAlgebra",
    "TowerSpec",
    "build_bar",
    "divided_power",
    "exterior",
    "hh1_dimension",
    "polynomial",
    "predict_series",
    "ramification",
    "run_tower",
    "tensor",
    "thh_local",
    "thh_z",
    "tor",
    "tower_series",
    "truncated_polynomial",
]
