"""leafspec - basic spectra of singular Riemannian foliations with interval leaf spaces."""

__version__ = "0.1.0"
