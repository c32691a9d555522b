"""Domain layer: foliation presentations, spectra, Jacobi data and isometry checks."""
