"""
Numerical engines for latspec, one module per concern
"""
