"""Partitioned linear block codes for memories with stuck-at defects.

Submodules
----------
algebra   GF(2) vectors, matrices, polynomials and GF(2^m) fields.
code      PLBC construction, PBCH family, distances and capability.
codec     Stuck-at channel, masking encoders, decoders.
analysis  Weight distributions and failure-probability bounds.
sim       Deterministic Monte Carlo simulation.
cli       The ``plbc`` command-line interface.
"""

from __future__ import annotations

from .algebra import BinaryPolynomial, BitMatrix, BitVector
from .code import PbchSpec, PlbcCode, capability, pbch_build, pbch_r0, plbc_from_generators
from .codec import DefectVector, EncodeResult, decode_pcc, decode_plbc, encode
from .errors import DecodeFailure, InvalidCode, InvalidSpec, InvariantViolation, UnsupportedComputation

__version__ = "0.1.0"

__all__ = [
    "BinaryPolynomial",
    "BitMatrix",
    "BitVector",
    "DecodeFailure",
    "DefectVector",
    "EncodeResult",
    "InvalidCode",
    "InvalidSpec",
    "InvariantViolation",
    "PbchSpec",
    "PlbcCode",
    "UnsupportedComputation",
    "capability",
    "decode_pcc",
    "decode_plbc",
    "encode",
    "pbch_build",
    "pbch_r0",
    "plbc_from_generators",
]
