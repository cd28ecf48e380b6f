"""Array-level Fourier helpers shared by the spectral core, solver and
characteristics modules.

Everything here works on raw numpy arrays in numpy's FFT layouts; the
public field types live in :mod:`bfamily.spectral`.  Wavenumbers are
angular: k_j = j*pi/L on the domain [-L, L).
"""

from __future__ import annotations

import numpy as np


def rfft_wavenumbers(M: int, L: float) -> np.ndarray:
    """Wavenumbers k_j = j*pi/L for the rfft layout, j = 0..M/2."""
    return np.arange(M // 2 + 1) * (np.pi / L)


def full_wavenumbers(M: int, L: float) -> np.ndarray:
    """Wavenumbers in numpy's full-fft ordering (0..M/2-1, -M/2..-1)."""
    return np.fft.fftfreq(M, d=1.0 / M) * (np.pi / L)


def parity_phase(M: int) -> np.ndarray:
    """(-1)**j for the full-fft index ordering.

    Relates samples on [-L, L) to samples on [0, 2L): exp(-i k_j x) picks up
    exp(i k_j L) = (-1)**j when the grid starts at -L.
    """
    j = np.rint(np.fft.fftfreq(M) * M).astype(np.int64)
    return np.where(j & 1 == 0, 1.0, -1.0)


def dealias_keep_index(M: int, fraction: float) -> int:
    """Largest rfft mode index kept by the dealiasing rule |k| <= fraction*k_max."""
    return int(np.floor(fraction * (M // 2)))


def dealias_mask_rfft(M: int, fraction: float) -> np.ndarray:
    """Multiplicative mask (0/1 floats) for the rfft layout."""
    keep = dealias_keep_index(M, fraction)
    mask = np.zeros(M // 2 + 1)
    mask[: keep + 1] = 1.0
    return mask


def deriv_factor_rfft(M: int, L: float, order: int) -> np.ndarray:
    """(ik)**order for the rfft layout, with the Nyquist mode zeroed for odd
    orders so derivatives of real fields stay real."""
    k = rfft_wavenumbers(M, L)
    factor = (1j * k) ** order
    if order % 2 == 1:
        factor[-1] = 0.0
    return factor


def helmholtz_factor_rfft(M: int, L: float) -> np.ndarray:
    """1/(1+k^2) for the rfft layout."""
    k = rfft_wavenumbers(M, L)
    return 1.0 / (1.0 + k * k)


def eval_trig_rfft(
    coeffs: np.ndarray,
    M: int,
    L: float,
    points: np.ndarray,
    max_index: int | None = None,
) -> np.ndarray:
    """Evaluate the trigonometric interpolant at arbitrary points.

    ``coeffs`` is a raw ``np.fft.rfft`` of M samples on x_i = -L + i*dx.
    The interpolant is u(x) = (1/M) sum_j A_j exp(i k_j (x+L)) over the full
    spectrum; Hermitian symmetry folds it onto the rfft half.  Powers of
    z = exp(i*pi*(x+L)/L) are built by cumulative products, which is much
    cheaper than exponentiating every mode and exact for band-limited data.

    ``max_index`` truncates the mode sum (use the dealias cutoff when the
    field is known to be band-limited).
    """
    points = np.atleast_1d(np.asarray(points, dtype=float))
    half = M // 2
    jmax = half if max_index is None else min(max_index, half)
    z = np.exp(1j * (np.pi / L) * (points + L))
    if jmax >= 1:
        powers = np.cumprod(np.broadcast_to(z[:, None], (points.size, jmax)), axis=1)
        acc = powers[:, : min(jmax, half - 1)] @ coeffs[1 : min(jmax, half - 1) + 1]
        vals = coeffs[0].real + 2.0 * acc.real
        if jmax == half:
            # Nyquist mode: A_{M/2} is real for real fields; exp(i k x) has
            # no conjugate partner so it enters once.
            vals = vals + (coeffs[half] * powers[:, half - 1]).real
    else:
        vals = np.full(points.size, coeffs[0].real)
    return vals / M
