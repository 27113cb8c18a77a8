"""Numerical services: exact modes, spectral operators, blocks, transport, the stage scheme and verification suites."""
from .verify import SuiteResult, certify_blocks, certify_modes, certify_operators

__all__ = ["SuiteResult", "certify_blocks", "certify_modes", "certify_operators"]
