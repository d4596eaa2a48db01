"""
Numerical core: sparse-group hard thresholding over box constraints.

Everything in this package is a pure function of its arguments; nothing here
reads Django settings or touches the database.
"""
