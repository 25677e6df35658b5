"""Exact Gaussian sampling on finite grids.

Covariance matrices come from the closed-form kernels (assembled by the
selected backend, optionally in parallel row blocks); factorization is dense
Cholesky with an escalating jitter ladder; ensembles are generated from
counter-based per-path substreams so that results are bit-reproducible and
independent of thread count.
"""

from __future__ import annotations

import enum
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import backend
from .errors import DomainError, FactorizationError, GridError
from .kernels import AcfEvaluator, HurstParams

__all__ = [
    "Family",
    "GridKind",
    "TimeGrid",
    "ModelSpec",
    "CholFactor",
    "PathEnsemble",
    "build_grid",
    "geometric_grid",
    "explicit_grid",
    "covariance_matrix",
    "stationary_covariance_matrix",
    "factorize",
    "sample_ensemble",
    "resolve_threads",
]

JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)

_ROW_BLOCK = 256


class Family(enum.Enum):
    SUB_FBM = "sub_fbm"
    BI_FBM = "bi_fbm"
    SCALED_SUB_FBM = "scaled_sub_fbm"
    SCALED_BI_FBM = "scaled_bi_fbm"


class GridKind(enum.Enum):
    UNIFORM = "uniform"
    GEOMETRIC = "geometric"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sample times; geometric grids carry their latent
    uniform log-times for Lamperti work."""

    points: np.ndarray
    kind: GridKind
    latent: np.ndarray | None = None
    alpha: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise GridError("grid needs at least 2 points")
        if not np.all(np.diff(pts) > 0.0):
            raise GridError("grid points must be strictly increasing")
        if pts[0] < 0.0:
            raise GridError("grid points must be non-negative")
        if self.latent is not None:
            lat = np.asarray(self.latent, dtype=float)
            object.__setattr__(self, "latent", lat)
            if lat.shape != pts.shape:
                raise GridError("latent grid must match points")

    def __len__(self):
        return self.points.size

    @property
    def spacing(self) -> float:
        """Common spacing of a uniform grid."""
        d = np.diff(self.points)
        if not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
            raise GridError("grid is not uniform")
        return float(d[0])

    def is_uniform(self) -> bool:
        d = np.diff(self.points)
        return bool(np.allclose(d, d[0], rtol=1e-9, atol=0.0))


@dataclass(frozen=True)
class ModelSpec:
    """A Gaussian family plus its parameters; scaled families evaluate the
    base kernel at t^alpha."""

    family: Family
    params: HurstParams

    @property
    def is_scaled(self) -> bool:
        return self.family in (Family.SCALED_SUB_FBM, Family.SCALED_BI_FBM)


def build_grid(kind, t_start: float, t_end: float, n: int, *,
               alpha: float = 1.0) -> TimeGrid:
    """Construct a Uniform or Geometric grid of n points on [t_start, t_end]."""
    kind = GridKind(kind) if not isinstance(kind, GridKind) else kind
    if n < 2:
        raise DomainError(f"need n >= 2 points, got {n}")
    if not (t_start < t_end):
        raise DomainError("t_start must be below t_end")
    if kind is GridKind.UNIFORM:
        if t_start < 0.0:
            raise DomainError("times must be non-negative")
        return TimeGrid(np.linspace(t_start, t_end, n), kind)
    if kind is GridKind.GEOMETRIC:
        if t_start <= 0.0:
            raise DomainError("geometric grids need t_start > 0")
        u = np.linspace(np.log(t_start) / alpha, np.log(t_end) / alpha, n)
        return TimeGrid(np.exp(alpha * u), kind, latent=u, alpha=alpha)
    raise DomainError("use explicit_grid() for explicit point lists")


def geometric_grid(alpha: float, u_start: float, u_end: float, n: int) -> TimeGrid:
    """Geometric grid from a uniform latent grid: points = exp(alpha * u)."""
    if n < 2:
        raise DomainError(f"need n >= 2 points, got {n}")
    if not (u_start < u_end):
        raise DomainError("u_start must be below u_end")
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    u = np.linspace(u_start, u_end, n)
    return TimeGrid(np.exp(alpha * u), GridKind.GEOMETRIC, latent=u, alpha=alpha)


def explicit_grid(points) -> TimeGrid:
    return TimeGrid(np.asarray(points, dtype=float), GridKind.EXPLICIT)


def resolve_threads(threads=None) -> int:
    """Thread count: explicit argument, else LAMPERTI_LAB_THREADS, else 1."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("LAMPERTI_LAB_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def _parallel_rows(fill_block, n, threads):
    """Run fill_block(i0, i1) over row blocks; identical output any thread count."""
    blocks = [(i, min(i + _ROW_BLOCK, n)) for i in range(0, n, _ROW_BLOCK)]
    if threads <= 1 or len(blocks) == 1:
        for blk in blocks:
            fill_block(*blk)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(lambda blk: fill_block(*blk), blocks))


def covariance_matrix(model: ModelSpec, grid: TimeGrid, *,
                      threads=None) -> np.ndarray:
    """Exact covariance matrix of the model on the grid."""
    p = model.params
    times = grid.points
    if model.is_scaled:
        times = np.power(times, p.alpha)
    n = times.size
    out = np.empty((n, n))
    nthreads = resolve_threads(threads)
    if model.family in (Family.SUB_FBM, Family.SCALED_SUB_FBM):
        if p.K != 1.0:
            raise DomainError("sub-fractional families require K == 1")
        fill = lambda i0, i1: backend.sub_cov_matrix(times, p.H, out=out,
                                                     rows=(i0, i1))
    else:
        fill = lambda i0, i1: backend.bi_cov_matrix(times, p.H, p.K, out=out,
                                                    rows=(i0, i1))
    _parallel_rows(fill, n, nthreads)
    return out


def stationary_covariance_matrix(acf: AcfEvaluator, grid: TimeGrid) -> np.ndarray:
    """Covariance matrix R(|u_i - u_j|) of a stationary process on a uniform
    grid, built from n autocovariance evaluations."""
    u = grid.points
    d = np.diff(u)
    if not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
        raise GridError("stationary assembly needs a uniform grid")
    lags = u - u[0]
    vals = acf.values(lags)
    idx = np.abs(np.arange(u.size)[:, None] - np.arange(u.size)[None, :])
    return vals[idx]


@dataclass(frozen=True)
class CholFactor:
    """Lower-triangular factor of (matrix + jitter * I)."""

    L: np.ndarray
    jitter: float
    jitter_level: int

    @property
    def n(self) -> int:
        return self.L.shape[0]


def factorize(matrix: np.ndarray, ladder=JITTER_LADDER) -> CholFactor:
    """Cholesky with escalating diagonal jitter delta = level * trace/n.

    Raises FactorizationError (with the offending pivot) if even the largest
    jitter fails."""
    n = matrix.shape[0]
    scale = float(np.trace(matrix)) / n
    last_exc = None
    for level, rel in enumerate(ladder):
        shifted = matrix if rel == 0.0 else matrix + (rel * scale) * np.eye(n)
        try:
            L = scipy.linalg.cholesky(
                shifted, lower=True, check_finite=False,
                overwrite_a=shifted is not matrix)
            return CholFactor(L=L, jitter=rel * scale, jitter_level=level)
        except np.linalg.LinAlgError as exc:
            last_exc = exc
    m = re.match(r"(\d+)-th leading minor", str(last_exc))
    pivot = int(m.group(1)) - 1 if m else None
    raise FactorizationError(
        f"matrix not positive definite even at jitter {ladder[-1]:g}*trace/n "
        f"(pivot {pivot})", pivot_index=pivot)


@dataclass(frozen=True)
class PathEnsemble:
    """M sampled trajectories on a shared grid, with provenance."""

    grid: TimeGrid
    paths: np.ndarray  # (M, n)
    master_seed: int
    model: ModelSpec | None = None
    jitter: float = 0.0

    def __post_init__(self):
        if self.paths.ndim != 2 or self.paths.shape[1] != len(self.grid):
            raise GridError("paths must be (M, n) matching the grid")

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]


def _fill_normals(Z, master_seed, columns):
    n = Z.shape[0]
    for m in columns:
        gen = np.random.Generator(np.random.Philox(key=[master_seed, m]))
        Z[:, m] = gen.standard_normal(n)


def sample_ensemble(factor: CholFactor, M: int, master_seed: int, *,
                    grid: TimeGrid, model: ModelSpec | None = None,
                    threads=None) -> PathEnsemble:
    """Draw M paths: path m = L @ z_m with z_m from the Philox substream
    keyed by (master_seed, m).  Deterministic for any thread count."""
    if M < 1:
        raise DomainError("need M >= 1 paths")
    n = factor.n
    if n != len(grid):
        raise GridError("factor size does not match grid")
    nthreads = resolve_threads(threads)
    Z = np.empty((n, M))
    if nthreads <= 1 or M == 1:
        _fill_normals(Z, master_seed, range(M))
    else:
        chunks = np.array_split(np.arange(M), nthreads)
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(lambda cols: _fill_normals(Z, master_seed, cols),
                          chunks))
    paths = (factor.L @ Z).T.copy()
    return PathEnsemble(grid=grid, paths=paths, master_seed=master_seed,
                        model=model, jitter=factor.jitter)
