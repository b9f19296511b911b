"""Posterior summary statistics: moments, quantiles, batch-means MCSE, ESS."""

from __future__ import annotations

import numpy as np

_QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)


def batch_means_mcse(x):
    """Monte-Carlo standard error of the mean by batch means.

    ceil(sqrt(S)) batches of equal length; trailing draws that do not fill
    a batch are dropped.
    """
    x = np.asarray(x, dtype=float)
    s = x.size
    n_batches = int(np.ceil(np.sqrt(s)))
    b = s // n_batches
    if b < 1 or n_batches < 2:
        raise ValueError("too few draws for batch means")
    means = x[: n_batches * b].reshape(n_batches, b).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def effective_sample_size(x):
    """ESS via the initial positive sequence of paired autocorrelations.

    Sums rho_{2m} + rho_{2m+1} while the pairs stay positive, then
    S / (2 * partial_sum - 1), clipped to (0, S].
    """
    x = np.asarray(x, dtype=float)
    s = x.size
    x = x - x.mean()
    var = np.dot(x, x)
    if var == 0.0:
        return float(s)
    # autocovariance by FFT
    nfft = 1 << (2 * s - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:s]
    rho = acov / acov[0]
    pair_sum = 0.0
    m = 0
    while 2 * m + 1 < s:
        gamma_m = rho[2 * m] + rho[2 * m + 1]
        if gamma_m <= 0.0:
            break
        pair_sum += gamma_m
        m += 1
    tau = max(2.0 * pair_sum - 1.0, 1e-12)
    return float(min(s / tau, s))


def summarize(draws, name):
    """Summary dict for one parameter's retained draws.

    With fewer than 10 draws only the moments and quantiles are reported
    (mcse and ess are null).
    """
    x = np.asarray(draws, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("draws must be a nonempty 1-D array")
    qs = np.quantile(x, _QUANTILES)
    out = {
        "parameter": str(name),
        "mean": float(x.mean()),
        "sd": float(x.std(ddof=1)) if x.size > 1 else 0.0,
        "q025": float(qs[0]),
        "q25": float(qs[1]),
        "q50": float(qs[2]),
        "q75": float(qs[3]),
        "q975": float(qs[4]),
    }
    if x.size >= 10:
        out["mcse"] = 0.0 if out["sd"] == 0.0 else batch_means_mcse(x)
        out["ess"] = effective_sample_size(x)
    else:
        out["mcse"] = None
        out["ess"] = None
    return out


def summarize_samples(samples):
    """Per-parameter summary rows for a PosteriorSamples container."""
    return [summarize(samples.draws[:, j], samples.names[j])
            for j in range(samples.draws.shape[1])]
