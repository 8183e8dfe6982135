"""BDF1 convolution-quadrature kernel tables.

The table stores omega_n(d) = (1/2pi) * omegatilde_n(d/dt) for a list of
distances d and orders n = 0..n_max.  Entries past the exponential-decay
cutoff radius are stored as exact zeros; the cutoff inverts the certified
decay bound 3 exp(sqrt(n) - x/(1+sqrt(n))) / (2pi sqrt(n+1)) <= tol.

Export formats: CSV rows (n, d, value) and a compact binary layout with
header magic "OMGK1", u32 n_max, u32 n_dist, f64 dt, f64 tol, followed by
row-major f64 values.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .bessel import OmegaQuery, omega_tilde
from .expcore import FamilyIndex
from .quadrature import QuadratureConfig

__all__ = ["KernelTable", "cutoff_radius", "build_table", "convolve",
           "write_csv", "write_binary", "read_binary"]

TWO_PI = 2.0 * math.pi
_MAGIC = b"OMGK1"

# relative accuracy target for table entries; entries near the cutoff are
# ~tol in size, so the absolute floor just prevents runaway refinement there
_TABLE_CFG = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-11)


@dataclass(frozen=True)
class KernelTable:
    dt: float
    distances: tuple[float, ...]
    n_max: int
    tol: float
    values: np.ndarray  # shape (n_max+1, n_dist)
    cutoff: tuple[int, ...]  # per n: first distance index beyond the cutoff radius

    def __post_init__(self):
        if self.values.shape != (self.n_max + 1, len(self.distances)):
            raise ValueError("values shape mismatch")

    @property
    def sparsity(self) -> float:
        """Fraction of entries stored as cutoff zeros."""
        return 1.0 - np.count_nonzero(self.values) / self.values.size


def cutoff_radius(n: int, tol: float) -> float:
    """Smallest x with 3 exp(sqrt(n) - x/(1+sqrt(n))) / (2pi sqrt(n+1)) <= tol,
    clamped below by max(1, n + sqrt(n)) where the decay bound is valid."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    rt = math.sqrt(n)
    x = (1.0 + rt) * (rt + math.log(3.0 / (TWO_PI * tol * math.sqrt(n + 1.0))))
    return max(x, 1.0, n + rt)


def build_table(
    dt: float,
    distances: list[float] | tuple[float, ...],
    n_max: int,
    tol: float,
    cfg: QuadratureConfig | None = None,
) -> KernelTable:
    """Evaluate omega_n(d) below the per-(n, d) cutoff; exact zeros beyond it.

    The entries are pure functions of x = d/dt, so
    build_table(dt, d, ...) == build_table(1, d/dt, ...) bit for bit.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    ds = tuple(float(d) for d in distances)
    if not ds or any(d <= 0 for d in ds) or list(ds) != sorted(ds):
        raise ValueError("distances must be a nonempty ascending positive list")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if cfg is None:
        cfg = _TABLE_CFG

    values = np.zeros((n_max + 1, len(ds)))
    cutoffs = []
    for n in range(n_max + 1):
        x_cut = cutoff_radius(n, tol)
        first_cut = len(ds)
        for j, d in enumerate(ds):
            x = d / dt
            if x >= x_cut:
                first_cut = min(first_cut, j)
                continue  # exact zero, certified |omega_n| <= tol
            res = omega_tilde(OmegaQuery(FamilyIndex(n, 0), x), cfg)
            values[n, j] = res.value / TWO_PI
        cutoffs.append(first_cut)
    return KernelTable(dt, ds, n_max, tol, values, tuple(cutoffs))


def convolve(table: KernelTable, density_history: np.ndarray, k: int) -> np.ndarray:
    """Reference discrete convolution u_k(d) = sum_{n=0}^{min(k, n_max)}
    omega_n(d) phi_{k-n}, honoring the cutoff zeros.

    ``density_history`` holds phi_0..phi_k (or longer); returns one value per
    table distance.
    """
    phi = np.asarray(density_history, dtype=float)
    if phi.ndim != 1 or len(phi) < k + 1:
        raise ValueError(f"history must hold at least k+1 = {k + 1} samples")
    upper = min(k, table.n_max)
    out = np.zeros(len(table.distances))
    for n in range(upper + 1):
        out += table.values[n] * phi[k - n]
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def write_csv(table: KernelTable, stream) -> None:
    stream.write("n,d,value\n")
    for n in range(table.n_max + 1):
        for j, d in enumerate(table.distances):
            stream.write("%d,%.17g,%.17g\n" % (n, d, table.values[n, j]))


def write_binary(table: KernelTable, stream) -> None:
    stream.write(_MAGIC)
    stream.write(struct.pack("<IIdd", table.n_max, len(table.distances), table.dt, table.tol))
    stream.write(np.ascontiguousarray(table.values, dtype="<f8").tobytes())


def read_binary(stream) -> KernelTable:
    magic = stream.read(5)
    if magic != _MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    n_max, n_dist, dt, tol = struct.unpack("<IIdd", stream.read(24))
    values = np.frombuffer(stream.read(8 * (n_max + 1) * n_dist), dtype="<f8")
    values = values.reshape(n_max + 1, n_dist).copy()
    # distances are not stored in the binary layout; reconstruct cutoffs from
    # the zero pattern and use index placeholders for the distance axis
    cutoffs = []
    for n in range(n_max + 1):
        nz = np.nonzero(values[n])[0]
        cutoffs.append(int(nz[-1]) + 1 if len(nz) else 0)
    placeholder = tuple(float(j + 1) for j in range(n_dist))
    return KernelTable(dt, placeholder, n_max, tol, values, tuple(cutoffs))
