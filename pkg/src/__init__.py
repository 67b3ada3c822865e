# Inhomogeneous XY chains - entanglement pipeline
__version__ = "0.1.0"
