"""Spectral decomposition of the three-fermion lift of a geminal projector."""
from .analytic import EigenFamily, SpectralReport, eigenfunctions, spectral_report
from .fock_basis import Determinant, WedgeVector, rank, unrank, wedge_insert, wedge_lift
from .geminal import CanonicalGeminal, GeminalError, GeminalMatrix, canonicalize, reconstruct
from .kernel import (
    block_dimensions,
    block_K03,
    block_K12,
    block_K21,
    block_K30,
    kernel_decomposition,
    kernel_projector,
)
from .operator import HermitianOperatorMatrix, apply, assemble_wedge
from .oracle import assemble_tensor, compare_spectra, eig_hermitian, random_geminal

SCHEMA = "fermion-wedge/1"

__all__ = [
    "CanonicalGeminal",
    "Determinant",
    "EigenFamily",
    "GeminalError",
    "GeminalMatrix",
    "HermitianOperatorMatrix",
    "SCHEMA",
    "SpectralReport",
    "WedgeVector",
    "apply",
    "assemble_tensor",
    "assemble_wedge",
    "block_K03",
    "block_K12",
    "block_K21",
    "block_K30",
    "block_dimensions",
    "canonicalize",
    "compare_spectra",
    "eig_hermitian",
    "eigenfunctions",
    "kernel_decomposition",
    "kernel_projector",
    "random_geminal",
    "rank",
    "reconstruct",
    "spectral_report",
    "unrank",
    "wedge_insert",
    "wedge_lift",
]
