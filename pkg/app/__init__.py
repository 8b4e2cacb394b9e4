"""
Simulador de mecánica cuántica de momentos (hidrógeno / Kepler)
"""
__version__ = "1.0.0"
