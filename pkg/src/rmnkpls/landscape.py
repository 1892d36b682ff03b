"""rho-MNK landscape instances: generation, evaluation, neighborhoods, and IO.

An instance has n binary variables, m objectives to maximize, epistatic
degree k, and objective correlation rho.  Every variable j owns one
component table per objective with 2**(k+1) entries in [0, 1); the objective
value is the mean over variables of the table entry selected by the variable
and its k epistatic partners.  The same partner links serve all objectives.

Conventions used throughout the package:

* A solution is an int: bit j of the integer is variable j, so the j-th
  1-bit-flip neighbor is ``x ^ (1 << j)``.  The string form writes variable
  j at position j (``bits_to_str(0b01, 2) == "10"``).
* Table rows are indexed by packing (own bit, partner 1, ..., partner k)
  with the own bit most significant.

Correlated table entries come from a Gaussian copula: an m-dimensional
standard normal draw with constant off-diagonal correlation
``2*sin(pi*rho/6)`` is mapped through the normal CDF.  That adjustment makes
the Pearson correlation of the resulting uniforms exactly rho; the adjusted
matrix must be positive-definite, which is checked at Cholesky time.
Generation draws from numpy's PCG64 stream seeded with ``gen_seed``; search
uses an independent SplitMix64 stream, so the two never interact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np
from scipy.special import ndtr

from . import _kernels

__all__ = [
    "InstanceParams",
    "Instance",
    "generate_instance",
    "sample_correlated_uniforms",
    "evaluate",
    "neighbors",
    "bits_to_str",
    "str_to_bits",
    "write_instance",
    "read_instance",
]

MAX_N = 30
FORMAT_VERSION = 1


@dataclass(frozen=True)
class InstanceParams:
    """Dimensions of a rho-MNK landscape.

    rho must satisfy rho > -1/(m-1): the constant-correlation matrix is
    symmetric positive-definite exactly on that range.
    """

    n: int
    m: int
    k: int
    rho: float
    gen_seed: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must be in [1, {MAX_N}], got {self.n}")
        if self.m < 2:
            raise ValueError(f"m must be at least 2, got {self.m}")
        if not 0 <= self.k < self.n:
            raise ValueError(f"k must be in [0, n), got k={self.k} with n={self.n}")
        if not self.rho > -1.0 / (self.m - 1):
            raise ValueError(
                f"rho must exceed -1/(m-1) = {-1.0 / (self.m - 1):.6g}, got {self.rho}"
            )
        if not 0 <= self.gen_seed < 2**64:
            raise ValueError("gen_seed must be an unsigned 64-bit integer")

    @property
    def table_size(self) -> int:
        return 1 << (self.k + 1)


@dataclass(frozen=True, eq=False)
class Instance:
    """A generated landscape: immutable links and component tables.

    links[j] lists the k epistatic partners of variable j (0-based, distinct,
    never j itself); tables[i, j] is the component table of variable j for
    objective i, entries in [0, 1).
    """

    params: InstanceParams
    links: np.ndarray
    tables: np.ndarray

    def __eq__(self, other) -> bool:
        """Bit-exact equality of parameters, links, and tables."""
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.links, other.links)
            and np.array_equal(self.tables, other.tables)
        )

    def __post_init__(self):
        p = self.params
        links = np.ascontiguousarray(np.asarray(self.links, dtype=np.int64))
        tables = np.ascontiguousarray(np.asarray(self.tables, dtype=np.float64))
        if links.shape != (p.n, p.k):
            raise ValueError(f"links must have shape {(p.n, p.k)}, got {links.shape}")
        if tables.shape != (p.m, p.n, p.table_size):
            raise ValueError(
                f"tables must have shape {(p.m, p.n, p.table_size)}, got {tables.shape}"
            )
        for j in range(p.n):
            row = links[j]
            if len(set(row.tolist())) != p.k or np.any(row == j):
                raise ValueError(f"links of variable {j} must be distinct and not {j}")
            if row.size and (row.min() < 0 or row.max() >= p.n):
                raise ValueError(f"links of variable {j} out of range")
        if tables.size and (tables.min() < 0.0 or tables.max() >= 1.0):
            raise ValueError("table entries must lie in [0, 1)")
        links.flags.writeable = False
        tables.flags.writeable = False
        object.__setattr__(self, "links", links)
        object.__setattr__(self, "tables", tables)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def m(self) -> int:
        return self.params.m


def _copula_cholesky(m: int, rho: float) -> np.ndarray:
    """Cholesky factor of the adjusted normal correlation matrix.

    The off-diagonal 2*sin(pi*rho/6) calibrates the copula so the uniforms
    have Pearson correlation rho.  A non-positive-definite adjusted matrix
    (possible near the rho lower bound for m >= 3) is an error.
    """
    rho_n = 2.0 * math.sin(math.pi * rho / 6.0)
    corr = np.full((m, m), rho_n, dtype=np.float64)
    np.fill_diagonal(corr, 1.0)
    try:
        return np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        raise ValueError(
            f"adjusted correlation matrix not positive-definite for m={m}, rho={rho}"
        ) from None


def sample_correlated_uniforms(
    m: int, rho: float, count: int, rng: np.random.Generator
) -> np.ndarray:
    """count rows of m uniforms on [0, 1) with pairwise Pearson correlation rho.

    Marginals are exactly uniform; the empirical correlation converges to rho
    as count grows.  Requires rho > -1/(m-1).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if not rho > -1.0 / (m - 1):
        raise ValueError(f"rho must exceed -1/(m-1) = {-1.0 / (m - 1):.6g}")
    chol = _copula_cholesky(m, rho)
    z = rng.standard_normal((count, m)) @ chol.T
    u = ndtr(z)
    # ndtr maps to (0, 1); clip the closed upper edge that exact ties with
    # 1.0 in float arithmetic would otherwise produce
    return np.minimum(u, np.nextafter(1.0, 0.0))


def generate_instance(params: InstanceParams) -> Instance:
    """Deterministically generate the instance for params.

    Draw order from PCG64(gen_seed): the partner permutation of each
    variable in index order, then one correlated block of
    n * 2**(k+1) table rows laid out row-major by (variable, table row).
    """
    p = params
    rng = np.random.Generator(np.random.PCG64(p.gen_seed))
    links = np.empty((p.n, p.k), dtype=np.int64)
    for j in range(p.n):
        others = np.array([t for t in range(p.n) if t != j], dtype=np.int64)
        links[j] = rng.permutation(others)[: p.k]
    rows = sample_correlated_uniforms(p.m, p.rho, p.n * p.table_size, rng)
    tables = np.ascontiguousarray(
        rows.T.reshape(p.m, p.n, p.table_size)
    )
    return Instance(params=p, links=links, tables=tables)


def evaluate(instance: Instance, x: int) -> np.ndarray:
    """Objective vector f(x); every value lies in [0, 1)."""
    if not 0 <= x < (1 << instance.n):
        raise ValueError(f"solution out of range for n={instance.n}")
    out = np.empty(instance.m, dtype=np.float64)
    _kernels.eval_into(instance.tables, instance.links, np.int64(x), out)
    return out


def neighbors(x: int, n: int) -> list[int]:
    """The n 1-bit-flip neighbors of x; the j-th differs exactly in bit j."""
    if not 0 <= x < (1 << n):
        raise ValueError(f"solution out of range for n={n}")
    return [x ^ (1 << j) for j in range(n)]


def bits_to_str(x: int, n: int) -> str:
    """Bit-string form with variable j at string position j."""
    return "".join("1" if (x >> j) & 1 else "0" for j in range(n))


def str_to_bits(s: str) -> int:
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"not a bit string: {s!r}")
    return sum(1 << j for j, c in enumerate(s) if c == "1")


# ---------------------------------------------------------------------------
# text format: header, n link lines, m*n table lines; 1-based indices,
# reals printed with 17 significant digits so a round trip is bit-exact
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_instance(instance: Instance, sink) -> None:
    """Write the versioned text form to a path or text file object."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w") as fp:
            write_instance(instance, fp)
        return
    p = instance.params
    sink.write(f"rmnk {FORMAT_VERSION} {p.n} {p.m} {p.k} {_fmt(p.rho)} {p.gen_seed}\n")
    for j in range(p.n):
        partners = " ".join(str(t + 1) for t in instance.links[j])
        sink.write(f"links {j + 1}{' ' if partners else ''}{partners}\n")
    for i in range(p.m):
        for j in range(p.n):
            values = " ".join(_fmt(v) for v in instance.tables[i, j])
            sink.write(f"table {i + 1} {j + 1} {values}\n")


class InstanceFormatError(ValueError):
    """Malformed instance file."""


def read_instance(source) -> Instance:
    """Read an instance written by write_instance; round trip is identity."""
    if isinstance(source, (str, Path)):
        with open(source) as fp:
            return read_instance(fp)
    return _parse_instance(source)


def _parse_instance(fp: TextIO) -> Instance:
    header = fp.readline().split()
    if len(header) != 7 or header[0] != "rmnk":
        raise InstanceFormatError("bad header line")
    if int(header[1]) != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format version {header[1]}")
    try:
        n, m, k = int(header[2]), int(header[3]), int(header[4])
        rho = float(header[5])
        gen_seed = int(header[6])
        params = InstanceParams(n=n, m=m, k=k, rho=rho, gen_seed=gen_seed)
    except ValueError as exc:
        raise InstanceFormatError(f"bad header: {exc}") from None
    links = np.empty((n, k), dtype=np.int64)
    for j in range(n):
        parts = fp.readline().split()
        if len(parts) != 2 + k or parts[0] != "links" or int(parts[1]) != j + 1:
            raise InstanceFormatError(f"bad links line for variable {j + 1}")
        links[j] = [int(t) - 1 for t in parts[2:]]
    tables = np.empty((m, n, params.table_size), dtype=np.float64)
    for i in range(m):
        for j in range(n):
            parts = fp.readline().split()
            if (
                len(parts) != 3 + params.table_size
                or parts[0] != "table"
                or int(parts[1]) != i + 1
                or int(parts[2]) != j + 1
            ):
                raise InstanceFormatError(f"bad table line for objective {i + 1}, variable {j + 1}")
            tables[i, j] = [float(v) for v in parts[3:]]
    try:
        return Instance(params=params, links=links, tables=tables)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None
