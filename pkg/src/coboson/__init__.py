"""Coboson Fock-state numerics: Schmidt spectra, symmetric polynomials, purity and CHSH."""
__version__ = "0.1.0"
