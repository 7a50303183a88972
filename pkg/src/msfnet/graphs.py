"""Network adjacency construction and spectral decompositions.

Adjacency convention: entry (i, j) is the coupling from node j into node i
(row = receiving node).  For the symmetric generators below the orientation
is irrelevant; it only matters for custom directed matrices loaded from CSV.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import BadParameter, NumericalFailure

_SYM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Network:
    """Square adjacency matrix with structural metadata.

    ``kind`` is one of ``complete``, ``ring-regular(k)``,
    ``erdos-renyi(p, seed)`` or ``custom``.
    """

    adjacency: np.ndarray
    size: int
    kind: str
    symmetric: bool

    @property
    def degrees(self) -> np.ndarray:
        """Number of nonzero off-diagonal couplings into each node
        (informational only)."""
        off = self.adjacency - np.diag(np.diag(self.adjacency))
        return np.count_nonzero(off, axis=1)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.adjacency, "fro"))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues with a unitary basis Q and triangular factor T.

    adjacency = Q T Q*; diag(T) equals ``eigenvalues``, which are sorted by
    descending real part, ties by descending imaginary part.
    """

    eigenvalues: np.ndarray
    Q: np.ndarray
    T: np.ndarray


def _wrap(adjacency: np.ndarray, kind: str) -> Network:
    a = np.asarray(adjacency, dtype=np.float64)
    symmetric = bool(np.array_equal(a, a.T))
    return Network(adjacency=_frozen(a), size=a.shape[0], kind=kind, symmetric=symmetric)


def make_network(kind: str, N: int, *, k: int | None = None, p: float | None = None,
                 seed: int | None = None, coupling: float = 1.0) -> Network:
    """Build a plant/feedback network of the requested kind, scaled by
    ``coupling``.

    kinds: ``complete``; ``ring`` (k-regular ring, k even, k < N, requires
    ``k``); ``er`` (undirected Erdos-Renyi, requires ``p`` in [0, 1] and an
    explicit ``seed``).  Diagonals are zero and all generators are symmetric.
    """
    if N < 2:
        raise BadParameter(f"N must be >= 2, got {N}")
    if kind == "complete":
        a = np.ones((N, N)) - np.eye(N)
        tag = "complete"
    elif kind == "ring":
        if k is None:
            raise BadParameter("ring network requires k")
        if k % 2 != 0:
            raise BadParameter(f"ring degree k must be even, got {k}")
        if not 0 < k < N:
            raise BadParameter(f"ring degree k must satisfy 0 < k < N, got k={k}, N={N}")
        a = np.zeros((N, N))
        for i in range(N):
            for d in range(1, k // 2 + 1):
                a[i, (i + d) % N] = 1.0
                a[i, (i - d) % N] = 1.0
        tag = f"ring-regular({k})"
    elif kind == "er":
        if p is None or not 0.0 <= p <= 1.0:
            raise BadParameter(f"er network requires p in [0, 1], got {p}")
        if seed is None:
            raise BadParameter("er network requires an explicit seed")
        rng = np.random.default_rng(seed)
        a = np.zeros((N, N))
        for i in range(N):
            for j in range(i + 1, N):
                if rng.random() < p:
                    a[i, j] = a[j, i] = 1.0
        tag = f"erdos-renyi({p}, {seed})"
    else:
        raise BadParameter(f"unknown network kind {kind!r}")
    return _wrap(coupling * a, tag)


def custom_network(adjacency) -> Network:
    """Wrap an explicit square adjacency matrix."""
    a = np.asarray(adjacency, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BadParameter(f"adjacency must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise BadParameter("adjacency contains non-finite entries")
    return _wrap(a, "custom")


def read_adjacency_csv(path) -> Network:
    """Load an adjacency matrix from CSV: N rows of N comma-separated
    decimals, no header."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(x) for x in line.split(",")])
        except ValueError as exc:
            raise BadParameter(f"{path}:{lineno}: bad CSV entry") from exc
    if not rows:
        raise BadParameter(f"{path}: empty adjacency file")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise BadParameter(f"{path}: adjacency must be square ({n} rows)")
    return custom_network(np.array(rows))


def adjacency_csv_text(adjacency: np.ndarray) -> str:
    """Render an adjacency matrix in the CSV interchange format."""
    return "\n".join(",".join(str(float(v)) for v in row) for row in adjacency) + "\n"


def network_from_spec(spec: str, *, coupling: float = 1.0) -> Network:
    """Parse a network spec string: ``complete:N``, ``ring:N:k``,
    ``er:N:p:seed`` or ``file:PATH``."""
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "complete" and len(parts) == 2:
            return make_network("complete", int(parts[1]), coupling=coupling)
        if kind == "ring" and len(parts) == 3:
            return make_network("ring", int(parts[1]), k=int(parts[2]), coupling=coupling)
        if kind == "er" and len(parts) == 4:
            return make_network("er", int(parts[1]), p=float(parts[2]),
                                seed=int(parts[3]), coupling=coupling)
        if kind == "file" and len(parts) >= 2:
            network = read_adjacency_csv(spec.partition(":")[2])
            if coupling != 1.0:
                network = _wrap(coupling * network.adjacency, "custom")
            return network
    except ValueError as exc:
        raise BadParameter(f"bad network spec {spec!r}: {exc}") from exc
    raise BadParameter(f"bad network spec {spec!r} "
                       "(expected complete:N | ring:N:k | er:N:p:seed | file:PATH)")


def eigenvalue_order_key(value: complex):
    """Sort key for the fixed eigenvalue ordering: descending real part,
    ties by descending imaginary part.  Components are rounded to 9
    decimals so rounding noise cannot hide a genuine tie (conjugate pairs
    in particular)."""
    return (-round(float(np.real(value)), 9), -round(float(np.imag(value)), 9))


def _ordered_schur(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form with the diagonal sorted by the module's
    eigenvalue ordering, via unitary adjacent swaps."""
    try:
        T, Q = scipy.linalg.schur(a.astype(np.complex128), output="complex")
    except scipy.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Schur decomposition failed: {exc}") from exc
    nn = T.shape[0]

    def out_of_order(x: complex, y: complex) -> bool:
        return eigenvalue_order_key(x) > eigenvalue_order_key(y)

    for _ in range(nn):
        swapped = False
        for i in range(nn - 1):
            d0, d1 = T[i, i], T[i + 1, i + 1]
            if not out_of_order(d0, d1):
                continue
            # unitary 2x2 rotation swapping adjacent diagonal entries:
            # first column is the block eigenvector for d1
            t = T[i, i + 1]
            c = np.hypot(abs(t), abs(d1 - d0))
            u1, u2 = t / c, (d1 - d0) / c
            rot = np.array([[u1, -np.conj(u2)], [u2, np.conj(u1)]])
            T[:, i:i + 2] = T[:, i:i + 2] @ rot
            T[i:i + 2, :] = rot.conj().T @ T[i:i + 2, :]
            Q[:, i:i + 2] = Q[:, i:i + 2] @ rot
            T[i + 1, i] = 0.0
            swapped = True
        if not swapped:
            break
    return T, Q


def spectrum(network: Network) -> SpectralDecomposition:
    """Spectral decomposition of a network's adjacency matrix.

    Symmetric matrices get a real orthogonal eigenbasis with diagonal T;
    anything else gets an ordered complex Schur form.  Eigenvalues are
    sorted by descending real part, ties by descending imaginary part, so
    mode pairing is deterministic.
    """
    a = network.adjacency
    sym_gap = np.linalg.norm(a - a.T, "fro")
    if sym_gap <= _SYM_TOL * max(1.0, np.linalg.norm(a, "fro")):
        try:
            w, v = np.linalg.eigh((a + a.T) / 2.0)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
        order = np.argsort(-w)
        w, v = w[order], v[:, order]
        return SpectralDecomposition(
            eigenvalues=_frozen(w.astype(np.complex128)),
            Q=_frozen(v), T=_frozen(np.diag(w)),
        )
    T, Q = _ordered_schur(a)
    return SpectralDecomposition(eigenvalues=_frozen(np.diag(T).copy()),
                                 Q=_frozen(Q), T=_frozen(T))
