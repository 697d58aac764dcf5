"""
Trendbias - detect sample bias in a hashtag's trend using a uniform reference sample.

This package compares a query-filtered sample stream against a second, uniform
sample of the same population. It bins hashtag occurrences into time series,
bootstraps the reference stream into a per-bin confidence band, and flags the
bins where the filtered stream's normalized trend leaves the band. It also
provides the validation statistics that go with the method (Kendall tau-b rank
tests, known-zero sparsity counts, windowed Jaccard overlap) and a synthetic
stream generator with ground-truth injected bias.
"""

__version__ = "0.1.0"
