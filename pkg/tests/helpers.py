"""Shared test utilities: random states and independent brute-force oracles.

The oracles here deliberately avoid the reshape/einsum tricks used by the
library so that agreement between the two is meaningful.
"""

import numpy as np

from qcausal import DensityMatrix, Ket


def random_ket(n_sites, rng):
    amp = rng.standard_normal(2**n_sites) + 1j * rng.standard_normal(2**n_sites)
    return Ket(n_sites, amp / np.linalg.norm(amp))


def random_density(n_sites, rng):
    dim = 2**n_sites
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    mat = g @ g.conj().T
    return DensityMatrix(n_sites, mat / np.trace(mat))


def random_unitary(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def brute_partial_trace(matrix, n_sites, keep):
    """Index-summation partial trace: out[i,j] = sum_m rho[row(i,m), row(j,m)]."""
    keep = list(keep)
    traced = [s for s in range(n_sites) if s not in keep]
    d_keep = 2 ** len(keep)
    d_traced = 2 ** len(traced)

    def full_index(keep_bits, traced_bits):
        idx = 0
        for pos, site in enumerate(keep):
            bit = (keep_bits >> (len(keep) - 1 - pos)) & 1
            idx |= bit << (n_sites - 1 - site)
        for pos, site in enumerate(traced):
            bit = (traced_bits >> (len(traced) - 1 - pos)) & 1
            idx |= bit << (n_sites - 1 - site)
        return idx

    out = np.zeros((d_keep, d_keep), dtype=complex)
    for i in range(d_keep):
        for j in range(d_keep):
            for m in range(d_traced):
                out[i, j] += matrix[full_index(i, m), full_index(j, m)]
    return out


def matrix_log_entropy(matrix):
    """-Tr[rho log2 rho] via spectral projector reconstruction of log2(rho)."""
    values, vectors = np.linalg.eigh(matrix)
    log_rho = np.zeros_like(matrix)
    for lam, vec in zip(values, vectors.T):
        if lam > 1e-12:
            log_rho += np.log2(lam) * np.outer(vec, vec.conj())
    return float(np.real(-np.trace(matrix @ log_rho)))


def brute_apply_instrument(matrix, n_sites, site, operators):
    """Outcome probabilities and BC states via explicit Kronecker embedding."""
    results = []
    for op in operators:
        embedded = np.kron(
            np.kron(np.eye(2**site), op), np.eye(2 ** (n_sites - site - 1))
        )
        hit = embedded @ matrix @ embedded.conj().T
        p = float(np.real(np.trace(hit)))
        keep = [s for s in range(n_sites) if s != site]
        reduced = brute_partial_trace(hit, n_sites, keep)
        results.append((p, reduced / p if p > 1e-12 else None))
    return results
