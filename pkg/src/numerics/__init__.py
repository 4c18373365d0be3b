"""Numerical kernels: special functions, geometry, boundary elements, spectral solver and oracle"""
