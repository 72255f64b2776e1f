"""Converse bounds, water-filling and Monte Carlo checks for Gaussian
channels with feedback. Thin wrapper over the C++ core."""

import json

from ._fbx import (
    DomainError,
    beta_awgn,
    beta_finite,
    capacity,
    closed_form_mgf,
    dispersion,
    llr_moments,
    noncentral_chisq_cdf,
)
from . import _fbx

__all__ = [
    "DomainError",
    "beta_awgn",
    "beta_finite",
    "bound",
    "capacity",
    "closed_form_mgf",
    "dispersion",
    "llr_moments",
    "metaconverse",
    "noncentral_chisq_cdf",
    "parallel_bound",
    "simulate",
    "waterfill",
]


def bound(n, eps, power, kind="finite"):
    """Scalar AWGN report; kind is finite, kappa or normal."""
    return json.loads(_fbx._bound(n, eps, power, kind))


def parallel_bound(noise_variances, power, n, eps):
    return json.loads(_fbx._parallel_bound(list(noise_variances), power, n, eps))


def waterfill(noise_variances, power):
    return json.loads(_fbx._waterfill(list(noise_variances), power))


def simulate(encoder, n, power, trials, seed, messages=1, codebook_seed=0, workers=1):
    """Per-trial statistics plus the CSV text and the KS identity report."""
    out = _fbx._simulate(encoder, n, power, trials, seed, messages, codebook_seed, workers)
    out["summary"] = json.loads(out["summary"])
    out["identity"] = json.loads(out["identity"])
    return out


def metaconverse(code, n, power, trials, seed, m=2, workers=1):
    return json.loads(_fbx._metaconverse(code, m, n, power, trials, seed, workers))
