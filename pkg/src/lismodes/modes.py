"""Singular-value decomposition of the coupling operator into communication modes.

Also holds the mode-counting rules and the closed-form mode-number
predictions (paraxial degrees of freedom and the large-surface limit).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from lismodes.emkernel import CouplingMatrix
from lismodes.errors import InvalidArgument, InvalidInput
from lismodes.geometry import Wave

DEFAULT_OVERSAMPLES = 10
DEFAULT_POWER_ITERS = 2


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Descending singular values of a coupling matrix and, optionally, its modes.

    ``tx_modes[:, n]`` is the transmit excitation whose image is
    ``sigmas[n] * rx_modes[:, n]``. ``total_energy`` is the squared Frobenius
    norm of the source matrix when known, which bounds the energy of any
    discarded tail.
    """

    sigmas: np.ndarray
    tx_modes: Optional[np.ndarray] = None
    rx_modes: Optional[np.ndarray] = None
    complete: bool = False
    total_energy: Optional[float] = None

    @classmethod
    def from_sigmas(cls, sigmas: Sequence[float], complete: bool = True) -> "ModeSpectrum":
        s = np.sort(np.abs(np.asarray(sigmas, dtype=float)))[::-1]
        return cls(s, complete=complete, total_energy=float(np.sum(s**2)) if complete else None)

    @property
    def k(self) -> int:
        return len(self.sigmas)

    @property
    def sigma2(self) -> np.ndarray:
        return self.sigmas**2

    @property
    def tail_energy(self) -> Optional[float]:
        if self.complete:
            return 0.0
        if self.total_energy is None:
            return None
        return max(0.0, self.total_energy - float(np.sum(self.sigma2)))

    def sigma2_db_rel(self) -> np.ndarray:
        """Coupling intensities in dB relative to the strongest mode."""
        s2 = self.sigma2
        if s2.size == 0 or s2[0] == 0:
            return np.full(s2.shape, -np.inf)
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(s2 / s2[0])

    def to_csv(self, path_or_file) -> None:
        """Write columns n, sigma, sigma2_db_rel (n starts at 1)."""
        if hasattr(path_or_file, "write"):
            _write_spectrum(self, path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                _write_spectrum(self, fh)


def _write_spectrum(spec: ModeSpectrum, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "sigma", "sigma2_db_rel"])
    for n, (s, db) in enumerate(zip(spec.sigmas, spec.sigma2_db_rel()), start=1):
        w.writerow([n, f"{s:.12e}", f"{db:.3f}"])


def randomized_svd(
    a: np.ndarray,
    k: int,
    seed: int = 0,
    oversamples: int = DEFAULT_OVERSAMPLES,
    power_iters: int = DEFAULT_POWER_ITERS,
    compute_vectors: bool = True,
):
    """Randomized range finder with re-orthonormalized power iterations.

    Returns ``(U, s, Vh)`` truncated to ``k`` terms; ``U`` and ``Vh`` are
    ``None`` when ``compute_vectors`` is false.
    """
    m, n = a.shape
    ell = min(k + oversamples, m, n)
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((n, ell))
    q, _ = np.linalg.qr(a @ omega)
    ah = a.conj().T
    for _ in range(power_iters):
        z, _ = np.linalg.qr(ah @ q)
        q, _ = np.linalg.qr(a @ z)
    b = q.conj().T @ a
    if not compute_vectors:
        return None, np.linalg.svd(b, compute_uv=False)[:k], None
    ub, s, vh = np.linalg.svd(b, full_matrices=False)
    return (q @ ub)[:, :k], s[:k], vh[:k]


def mode_spectrum(
    K: Union[CouplingMatrix, np.ndarray],
    k_max: int,
    method: str = "exact",
    seed: int = 0,
    compute_vectors: bool = True,
) -> ModeSpectrum:
    """Top ``min(k_max, rank)`` singular triplets of ``K``.

    ``method`` is ``"exact"`` (LAPACK SVD) or ``"randomized"`` (seeded
    sketch with 10 oversamples and 2 power iterations).
    """
    if k_max < 1:
        raise InvalidArgument(f"k_max must be >= 1, got {k_max}")
    a = K.entries if isinstance(K, CouplingMatrix) else np.asarray(K)
    if a.ndim != 2 or a.size == 0:
        raise InvalidArgument("coupling matrix must be a non-empty 2-D array")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("coupling matrix has non-finite entries")
    total = float(np.vdot(a, a).real)
    full = min(a.shape)
    k = min(k_max, full)

    if method == "exact" or (method == "randomized" and k + DEFAULT_OVERSAMPLES >= full):
        if compute_vectors:
            u, s, vh = np.linalg.svd(a, full_matrices=False)
        else:
            u, s, vh = None, np.linalg.svd(a, compute_uv=False), None
    elif method == "randomized":
        u, s, vh = randomized_svd(a, k, seed=seed, compute_vectors=compute_vectors)
    else:
        raise InvalidArgument(f"unknown SVD method {method!r}")

    s = s[:k]
    tx = rx = None
    if compute_vectors:
        rx = u[:, :k]
        tx = vh[:k].conj().T
    return ModeSpectrum(s, tx, rx, complete=(k == full), total_energy=total)


def spectrum_from_gram(gram: np.ndarray, k_max: int, total_energy: Optional[float] = None) -> ModeSpectrum:
    """Singular values from a Hermitian Gram matrix (no mode vectors).

    Squared singular values below about 1e-16 of the largest are lost to
    rounding, which is harmless for counting.
    """
    if k_max < 1:
        raise InvalidArgument(f"k_max must be >= 1, got {k_max}")
    if not np.all(np.isfinite(gram)):
        raise InvalidInput("Gram matrix has non-finite entries")
    ev = np.linalg.eigvalsh(gram)[::-1]
    s = np.sqrt(np.clip(ev, 0.0, None))
    k = min(k_max, len(s))
    if total_energy is None:
        total_energy = float(np.trace(gram).real)
    return ModeSpectrum(s[:k], complete=(k == len(s)), total_energy=total_energy)


@dataclass(frozen=True)
class Relative:
    """Count modes within ``threshold_db`` of the strongest one."""

    threshold_db: float = 3.0


@dataclass(frozen=True)
class Knee:
    """Count modes up to the first sharp drop in the spectrum.

    A knee is the first index n whose intensity lies within ``window_db``
    of the strongest mode and whose successor is at least ``min_drop_db``
    lower. Without such a drop the ``fallback_db`` relative rule applies.
    """

    min_drop_db: float = 10.0
    window_db: float = 20.0
    fallback_db: float = 3.0


CountingRule = Union[Knee, Relative]


def parse_rule(text: str) -> CountingRule:
    """Parse ``"knee"`` or ``"relative:<dB>"``."""
    text = text.strip().lower()
    if text == "knee":
        return Knee()
    if text.startswith("relative"):
        _, _, db = text.partition(":")
        return Relative(float(db)) if db else Relative()
    raise InvalidArgument(f"unknown counting rule {text!r}")


def _count_relative(s2: np.ndarray, threshold_db: float) -> int:
    if s2[0] <= 0:
        return 1
    floor = s2[0] * 10.0 ** (-threshold_db / 10.0)
    return max(1, int(np.count_nonzero(s2 >= floor)))


def count_modes(spectrum: Union[ModeSpectrum, Sequence[float]], rule: CountingRule = Knee()) -> int:
    """Number of significant communication modes, always at least 1.

    A bare sequence is taken as singular values (not their squares).
    """
    if not isinstance(spectrum, ModeSpectrum):
        spectrum = ModeSpectrum.from_sigmas(spectrum)
    s2 = spectrum.sigma2
    if s2.size == 0:
        raise InvalidArgument("empty spectrum")
    if isinstance(rule, Relative):
        return _count_relative(s2, rule.threshold_db)
    if not isinstance(rule, Knee):
        raise InvalidArgument(f"unknown counting rule {rule!r}")
    if s2.size >= 3 and s2[0] > 0:
        window = s2[0] * 10.0 ** (-rule.window_db / 10.0)
        drop = 10.0 ** (rule.min_drop_db / 10.0)
        for n in range(s2.size - 1):
            if s2[n] < window:
                break
            if s2[n] >= drop * s2[n + 1]:
                return n + 1
    return _count_relative(s2, rule.fallback_db)


def n_paraxial(A_T: float, A_R: float, wave: Wave, d: float) -> float:
    """Small-aperture degrees of freedom A_T A_R / (lambda d)^2, unrounded."""
    if not d > 0:
        raise InvalidArgument(f"distance must be positive, got {d}")
    return A_T * A_R / (wave.wavelength * d) ** 2


def n_limit_parallel(A_T: float, wave: Wave) -> float:
    """Mode count pi A_T / lambda^2 approached when the other surface grows without bound."""
    if not A_T > 0:
        raise InvalidArgument(f"area must be positive, got {A_T}")
    return math.pi * A_T / wave.wavelength**2
