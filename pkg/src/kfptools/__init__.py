"""Tools for polynomial potentials and Kramers-Fokker-Planck type operators."""

__version__ = "0.1.0"
