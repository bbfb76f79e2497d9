"""Desk-scale laboratory for null-codeword search problems.

Subpackages cover finite-field arithmetic (gf), folded Reed-Solomon codes
and dual decoding (codes), biased-oracle instances (instances), exact SMP
protocol simulation (qsim), classical protocol-tree machinery (proto,
density, huffman), k-wise independent hashing (hashing), and the total
t-copy problem (tbnc).
"""

from . import (  # noqa: F401
    budget,
    codes,
    density,
    errors,
    gf,
    hashing,
    huffman,
    instances,
    linalg,
    proto,
    qsim,
    tbnc,
)

__version__ = "0.1.0"
