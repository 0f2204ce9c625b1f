"""Dense occupation-number-basis simulator used as ground truth.

A many-body basis state is an integer bitmask: bit m (bit 0 least
significant) holds the occupation of mode m.  The creation string
a_0^dag a_1^dag ... a_{N-1}^dag |0> has amplitude +1 on the mask with
the lowest N bits set, and a_m^dag acting on a mask carries the sign
(-1)^(number of occupied modes below m).  That single choice anchors
every sign convention in the package.

Dense vectors are capped at 12 modes and density matrices at 8, which
keeps everything desk sized.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DimensionMismatch,
    FlosimError,
    ModesNotOrthogonal,
    NotHermitian,
    TooManyModes,
    ZeroVector,
)
from .slater import check_mode

VECTOR_MODE_CAP = 12
DENSITY_MODE_CAP = 8
ORTHOGONAL_TOL = 1e-10


@dataclass(frozen=True)
class FockVector:
    """Amplitudes over all 2^modes occupation basis states."""

    modes: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.modes,):
            raise DimensionMismatch(
                f"amplitude vector has shape {amps.shape}, expected ({1 << self.modes},)"
            )
        if not np.all(np.isfinite(amps)):
            raise FlosimError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class FockDensity:
    """Dense density matrix over the occupation basis (Hermitian)."""

    modes: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dim = 1 << self.modes
        if mat.shape != (dim, dim):
            raise DimensionMismatch(
                f"density matrix has shape {mat.shape}, expected ({dim}, {dim})"
            )
        if not np.all(np.isfinite(mat)):
            raise FlosimError("density entries must be finite")
        dev = np.linalg.norm(mat - mat.conj().T)
        if dev > 1e-9:
            raise NotHermitian(f"density deviates from Hermiticity by {dev:.3e}")
        object.__setattr__(self, "matrix", mat)


def _check_vector_cap(d):
    if d > VECTOR_MODE_CAP:
        raise TooManyModes(f"dense vectors support at most {VECTOR_MODE_CAP} modes, got {d}")


def _check_density_cap(d):
    if d > DENSITY_MODE_CAP:
        raise TooManyModes(
            f"dense density matrices support at most {DENSITY_MODE_CAP} modes, got {d}"
        )


@lru_cache(maxsize=None)
def _popcounts(d):
    masks = np.arange(1 << d)
    counts = np.zeros(1 << d, dtype=np.int64)
    for m in range(d):
        counts += (masks >> m) & 1
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=None)
def _masks_by_weight(d):
    counts = _popcounts(d)
    return tuple(np.flatnonzero(counts == k) for k in range(d + 1))


def vacuum(d):
    _check_vector_cap(d)
    amps = np.zeros(1 << d, dtype=complex)
    amps[0] = 1.0
    return FockVector(d, amps)


def basis_vector(d, mask):
    _check_vector_cap(d)
    amps = np.zeros(1 << d, dtype=complex)
    amps[mask] = 1.0
    return FockVector(d, amps)


def _creation_components(amps, d, vec):
    out = np.zeros_like(amps)
    masks = np.arange(1 << d)
    pops = _popcounts(d)
    for m in range(d):
        coef = vec[m]
        if coef == 0.0:
            continue
        bit = 1 << m
        src = masks[(masks & bit) == 0]
        signs = 1.0 - 2.0 * (pops[src & (bit - 1)] % 2)
        out[src | bit] += coef * signs * amps[src]
    return out


def _annihilation_components(amps, d, vec):
    out = np.zeros_like(amps)
    masks = np.arange(1 << d)
    pops = _popcounts(d)
    for m in range(d):
        coef = np.conj(vec[m])
        if coef == 0.0:
            continue
        bit = 1 << m
        src = masks[(masks & bit) != 0]
        signs = 1.0 - 2.0 * (pops[src & (bit - 1)] % 2)
        out[src ^ bit] += coef * signs * amps[src]
    return out


def creation_op_apply(v, mode):
    """Apply a_mode^dag, the creation operator of an arbitrary mode vector."""
    vec = check_mode(mode, v.modes)
    return FockVector(v.modes, _creation_components(v.amplitudes, v.modes, vec))


def annihilation_op_apply(v, mode):
    """Apply a_mode, the annihilation operator of an arbitrary mode vector."""
    vec = check_mode(mode, v.modes)
    return FockVector(v.modes, _annihilation_components(v.amplitudes, v.modes, vec))


def expand(s):
    """Expand a SlaterState into the occupation basis.

    The amplitude on a sorted index set is the state's amplitude times
    the determinant of the selected orbital rows, which reproduces the
    creation-operator ordering convention above.
    """
    _check_vector_cap(s.modes)
    amps = np.zeros(1 << s.modes, dtype=complex)
    if s.amplitude != 0.0:
        for rows in itertools.combinations(range(s.modes), s.electrons):
            mask = 0
            for i in rows:
                mask |= 1 << i
            sub = s.orbitals[list(rows), :]
            amps[mask] = s.amplitude * np.linalg.det(sub) if s.electrons else s.amplitude
    return FockVector(s.modes, amps)


def expand_sum(ssum):
    """Expand a sum of determinants (anything with a .terms list)."""
    total = None
    for coeff, state in ssum.terms:
        vec = expand(state)
        contrib = coeff * vec.amplitudes
        total = contrib if total is None else total + contrib
    if total is None:
        total = np.zeros(1 << ssum.modes, dtype=complex)
    return FockVector(ssum.modes, total)


def _hermitian_checked(b, d):
    mat = np.asarray(b, dtype=complex)
    if mat.shape != (d, d):
        raise DimensionMismatch(f"generator has shape {mat.shape}, expected ({d}, {d})")
    dev = np.linalg.norm(mat - mat.conj().T)
    if dev > 1e-10:
        raise NotHermitian(f"generator deviates from Hermiticity by {dev:.3e}")
    return (mat + mat.conj().T) / 2


def _block_hamiltonian(d, k, b):
    basis = _masks_by_weight(d)[k]
    index = {int(mask): pos for pos, mask in enumerate(basis)}
    pops = _popcounts(d)
    h = np.zeros((len(basis), len(basis)), dtype=complex)
    for pos, mask in enumerate(basis):
        mask = int(mask)
        for j in range(d):
            bit_j = 1 << j
            if not mask & bit_j:
                continue
            sign_j = -1.0 if pops[mask & (bit_j - 1)] % 2 else 1.0
            inter = mask ^ bit_j
            for i in range(d):
                bit_i = 1 << i
                if inter & bit_i:
                    continue
                if b[i, j] == 0.0:
                    continue
                sign_i = -1.0 if pops[inter & (bit_i - 1)] % 2 else 1.0
                h[index[inter | bit_i], pos] += b[i, j] * sign_j * sign_i
    return basis, h


def one_body_generator_apply(v, b):
    """Apply the many-body operator sum_ij b_ij a_i^dag a_j once."""
    _check_vector_cap(v.modes)
    mat = _hermitian_checked(b, v.modes)
    out = np.zeros_like(v.amplitudes)
    for k in range(v.modes + 1):
        basis, h = _block_hamiltonian(v.modes, k, mat)
        out[basis] = h @ v.amplitudes[basis]
    return FockVector(v.modes, out)


def one_body_apply(v, b, tau):
    """Evolve a dense vector under exp(-i tau sum_ij b_ij a_i^dag a_j).

    The exponential is taken per particle-number block, so particle
    number is conserved by construction.
    """
    _check_vector_cap(v.modes)
    mat = _hermitian_checked(b, v.modes)
    out = v.amplitudes.copy()
    for k in range(v.modes + 1):
        basis, h = _block_hamiltonian(v.modes, k, mat)
        evals, vecs = np.linalg.eigh(h)
        comp = vecs.conj().T @ out[basis]
        out[basis] = vecs @ (np.exp(-1j * evals * tau) * comp)
    return FockVector(v.modes, out)


def _check_orthogonal_pair(kappa, lam):
    ip = np.vdot(kappa, lam)
    if abs(ip) > ORTHOGONAL_TOL:
        raise ModesNotOrthogonal(f"<kappa|lambda> = {abs(ip):.3e}")


def two_mode_projector_apply(v, kappa, lam, outcome):
    """Project onto total occupation 0, 1 or 2 of two orthogonal modes.

    The projectors are built operator by operator:
      P0 = a_k a_k^dag a_l a_l^dag
      P2 = a_k^dag a_k a_l^dag a_l
      P1 = a_k a_k^dag a_l^dag a_l + a_k^dag a_k a_l a_l^dag
    """
    kap = check_mode(kappa, v.modes)
    lamv = check_mode(lam, v.modes)
    _check_orthogonal_pair(kap, lamv)
    d = v.modes
    amps = v.amplitudes

    def cre(vec, a):
        return _creation_components(a, d, vec)

    def ann(vec, a):
        return _annihilation_components(a, d, vec)

    if outcome == 0:
        out = ann(kap, cre(kap, ann(lamv, cre(lamv, amps))))
    elif outcome == 2:
        out = cre(kap, ann(kap, cre(lamv, ann(lamv, amps))))
    elif outcome == 1:
        first = ann(kap, cre(kap, cre(lamv, ann(lamv, amps))))
        second = cre(kap, ann(kap, ann(lamv, cre(lamv, amps))))
        out = first + second
    else:
        raise ValueError(f"outcome must be 0, 1 or 2, got {outcome}")
    return FockVector(d, out)


def creation_matrix(d, mode):
    """Dense matrix of a_mode^dag on the full Fock space."""
    _check_density_cap(d)
    vec = check_mode(mode, d)
    dim = 1 << d
    masks = np.arange(dim)
    pops = _popcounts(d)
    mat = np.zeros((dim, dim), dtype=complex)
    for m in range(d):
        coef = vec[m]
        if coef == 0.0:
            continue
        bit = 1 << m
        src = masks[(masks & bit) == 0]
        signs = 1.0 - 2.0 * (pops[src & (bit - 1)] % 2)
        mat[src | bit, src] += coef * signs
    return mat


def density_from_vector(v, normalize=False):
    """Rank-one density matrix |v><v| (optionally normalized to trace 1)."""
    _check_density_cap(v.modes)
    amps = v.amplitudes
    if normalize:
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ZeroVector("cannot normalize the zero vector")
        amps = amps / norm
    return FockDensity(v.modes, np.outer(amps, np.conj(amps)))


def trace_out_channel(rho, zeta):
    """Decohere mode zeta: rho -> A1 rho A1^dag + A2 rho A2^dag.

    A1 = a_z a_z^dag and A2 = a_z^dag a_z are the Kraus operators of the
    channel that measures the occupation of zeta and forgets the result.
    Trace and positivity are preserved.
    """
    _check_density_cap(rho.modes)
    cmat = creation_matrix(rho.modes, zeta)
    amat = cmat.conj().T
    a1 = amat @ cmat
    a2 = cmat @ amat
    out = a1 @ rho.matrix @ a1.conj().T + a2 @ rho.matrix @ a2.conj().T
    return FockDensity(rho.modes, out)


def inner(v1, v2):
    """<v1|v2> on the occupation basis."""
    if v1.modes != v2.modes:
        raise DimensionMismatch(f"{v1.modes} modes vs {v2.modes}")
    return complex(np.vdot(v1.amplitudes, v2.amplitudes))


def norm(v):
    return float(np.linalg.norm(v.amplitudes))


def fidelity(v1, v2):
    """|<v1|v2>| with both vectors normalized; insensitive to global phase."""
    if v1.modes != v2.modes:
        raise DimensionMismatch(f"{v1.modes} modes vs {v2.modes}")
    n1 = np.linalg.norm(v1.amplitudes)
    n2 = np.linalg.norm(v2.amplitudes)
    if n1 == 0.0 or n2 == 0.0:
        raise ZeroVector("fidelity of a zero vector is undefined")
    return float(abs(np.vdot(v1.amplitudes, v2.amplitudes)) / (n1 * n2))
