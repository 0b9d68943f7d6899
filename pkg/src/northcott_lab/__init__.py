"""Exact heights on elliptic curves over Q, quadratic and cyclotomic fields."""

from __future__ import annotations

__version__ = "0.1.0"

from .curve import (INF, Curve, Endomorphism, Point, add, division_polynomial,
                    mul, on_curve, torsion_points, torsion_test, twist)
from .dynamics import back_chain, classify_preperiodic, decay_check, orbit
from .estimate import HeightEstimate
from .galois import ExtensionSpec, kernel_iso_check, trace_map, twist_transfer
from .heights import (canonical_height, gram_lower_bound, height_pairing,
                      naive_height)
from .kernels import BACKEND
from .nf import (QQ, AlgNumber, FieldSpec, LiteralError, embeddings,
                 minimal_polynomial, weil_height)
from .northcott import (enumerate_bounded, kab_min_k, mult_dep_test,
                        qtr_family)

__all__ = [
    "BACKEND", "INF", "QQ", "AlgNumber", "Curve", "Endomorphism", "ExtensionSpec",
    "FieldSpec", "HeightEstimate", "LiteralError", "Point", "add", "back_chain",
    "canonical_height", "classify_preperiodic", "decay_check", "division_polynomial",
    "embeddings", "enumerate_bounded", "gram_lower_bound", "height_pairing",
    "kab_min_k", "kernel_iso_check", "minimal_polynomial", "mul", "mult_dep_test",
    "naive_height", "on_curve", "orbit", "qtr_family", "torsion_points",
    "torsion_test", "trace_map", "twist", "twist_transfer", "weil_height",
]
