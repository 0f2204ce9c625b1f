"""Sums of Slater determinants, two-mode charge measurements, and the
Slater-rank machinery for two-fermion states.

A two-mode measurement asks for the total occupation (0, 1 or 2) of two
orthogonal modes.  Outcomes 0 and 2 map each determinant to at most one
determinant; outcome 1 is a sum of two projector products and can double
the term count, which is why sums are needed at all.  Merged-outcome
groupings concatenate the projected term lists; the {0,2} vs {1} parity
grouping is the one that forces genuine growth.

Projections are applied in exact operator form, term by term, so the
relative phases between determinants are preserved to machine precision.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadContext,
    DimensionMismatch,
    ImpossibleOutcome,
    ModesNotOrthogonal,
    TermCapExceeded,
    WrongParticleNumber,
)
from .linalg import antisym_canonical, pfaffian
from .slater import (
    SlaterState,
    check_mode,
    decompose_mode,
    evolve,
    rotate_in_first,
    annihilate,
    slater_overlap,
    standard_state,
)

PRUNE_TOL = 1e-12
DEFAULT_MAX_TERMS = 1024
ORTHOGONAL_TOL = 1e-10
PROB_FLOOR = 1e-12
PAIR_THRESHOLD = 1e-9

GROUPINGS = {
    "012": ((0,), (1,), (2,)),
    "01/2": ((0, 1), (2,)),
    "0/12": ((0,), (1, 2)),
    "02/1": ((0, 2), (1,)),
}


def group_label(group):
    return "".join(str(o) for o in group)


@dataclass(frozen=True)
class SlaterSum:
    """A linear combination of determinants with identical D and N.

    Terms whose total weight |coefficient * amplitude| is at or below
    the prune tolerance are dropped on construction; exceeding max_terms
    raises TermCapExceeded.  modes/electrons may be given explicitly for
    the empty (zero-state) sum.
    """

    terms: tuple = field(default=())
    modes: int | None = None
    electrons: int | None = None
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        kept = []
        for coeff, state in self.terms:
            if abs(complex(coeff) * state.amplitude) > PRUNE_TOL:
                kept.append((complex(coeff), state))
        modes = self.modes
        electrons = self.electrons
        for _, state in kept:
            if modes is None:
                modes = state.modes
            if electrons is None:
                electrons = state.electrons
            if state.modes != modes or state.electrons != electrons:
                raise DimensionMismatch(
                    "all terms of a sum must share the same modes and electrons"
                )
        if modes is None or electrons is None:
            raise DimensionMismatch("an empty sum needs explicit modes and electrons")
        if len(kept) > self.max_terms:
            raise TermCapExceeded(f"{len(kept)} terms exceed the cap of {self.max_terms}")
        object.__setattr__(self, "terms", tuple(kept))
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "electrons", electrons)

    @classmethod
    def from_state(cls, state, max_terms=DEFAULT_MAX_TERMS):
        return cls(((1.0 + 0.0j, state),), state.modes, state.electrons, max_terms)

    @property
    def term_count(self):
        return len(self.terms)


def sum_norm(s):
    """Norm of the represented state, via pairwise determinant overlaps."""
    acc = 0.0 + 0.0j
    for ci, si in s.terms:
        for cj, sj in s.terms:
            acc += np.conj(ci) * cj * slater_overlap(si, sj)
    return float(np.sqrt(max(acc.real, 0.0)))


def scale_sum(s, factor):
    return SlaterSum(
        tuple((c * factor, st) for c, st in s.terms), s.modes, s.electrons, s.max_terms
    )


def evolve_sum(s, v):
    return SlaterSum(
        tuple((c, evolve(st, v)) for c, st in s.terms), s.modes, s.electrons, s.max_terms
    )


def _term_project(state, kap, want):
    """Exact unnormalized single-mode occupation projector on one determinant.

    Returns (scale, new_state) with projector(state) == scale * new_state,
    or None when the projection vanishes.  new_state keeps unit norm so
    the scale carries the whole magnitude change.
    """
    if state.electrons == 0:
        return (1.0, state) if want == 0 else None
    dec = decompose_mode(state, kap)
    if want == 1:
        if dec.in_orbital is None:
            return None
        rot = rotate_in_first(state, dec.in_orbital)
        new = SlaterState(
            np.column_stack([kap.reshape(-1, 1), rot.orbitals[:, 1:]]), rot.amplitude
        )
        return dec.alpha, new
    if dec.in_orbital is None:
        return 1.0, state
    if dec.out_orbital is None:
        return None
    rot = rotate_in_first(state, dec.in_orbital)
    perp = dec.beta * dec.in_orbital - dec.alpha * dec.out_orbital
    new = SlaterState(
        np.column_stack([perp.reshape(-1, 1), rot.orbitals[:, 1:]]), rot.amplitude
    )
    return dec.beta, new


def _apply_branch(coeff, state, sequence):
    for vec, want in sequence:
        res = _term_project(state, vec, want)
        if res is None:
            return None
        coeff = coeff * res[0]
        state = res[1]
    return coeff, state


def apply_two_mode_projector(s, kappa, lam, outcome):
    """Project a sum onto total occupation `outcome` of two orthogonal modes.

    The result is the exact unnormalized projected state.  Outcomes 0 and
    2 keep at most one term per input term; outcome 1 produces up to two.
    """
    kap = check_mode(kappa, s.modes)
    lamv = check_mode(lam, s.modes)
    ip = abs(np.vdot(kap, lamv))
    if ip > ORTHOGONAL_TOL:
        raise ModesNotOrthogonal(f"<kappa|lambda> = {ip:.3e}")
    if outcome == 0:
        branches = [((lamv, 0), (kap, 0))]
    elif outcome == 2:
        branches = [((lamv, 1), (kap, 1))]
    elif outcome == 1:
        branches = [((lamv, 1), (kap, 0)), ((lamv, 0), (kap, 1))]
    else:
        raise ValueError(f"outcome must be 0, 1 or 2, got {outcome}")
    new_terms = []
    for coeff, state in s.terms:
        for seq in branches:
            res = _apply_branch(coeff, state, seq)
            if res is not None:
                new_terms.append(res)
    return SlaterSum(tuple(new_terms), s.modes, s.electrons, s.max_terms)


def _pick(labels, probs, forced, rng):
    if forced is not None:
        label = str(forced)
        if label not in labels:
            raise ValueError(f"outcome {label!r} is not one of {labels}")
        return labels.index(label)
    if rng is None:
        raise ValueError("need a forced outcome or an rng to sample")
    u = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if u < acc:
            return i
    return len(probs) - 1


def measure_two_mode(s, kappa, lam, grouping, forced=None, rng=None):
    """Measure total occupation of two orthogonal modes under a grouping.

    grouping is one of "012", "01/2", "0/12", "02/1".  Returns
    (label, probability, post) with post renormalized; merged groups
    concatenate the term lists of their member projections.
    """
    if grouping not in GROUPINGS:
        raise ValueError(f"unknown grouping {grouping!r}")
    groups = GROUPINGS[grouping]
    projected = {o: apply_two_mode_projector(s, kappa, lam, o) for o in (0, 1, 2)}
    group_sums = []
    for group in groups:
        terms = tuple(t for o in group for t in projected[o].terms)
        group_sums.append(SlaterSum(terms, s.modes, s.electrons, s.max_terms))
    probs = [sum_norm(g) ** 2 for g in group_sums]
    labels = [group_label(g) for g in groups]
    idx = _pick(labels, probs, forced, rng)
    prob = probs[idx]
    if prob < PROB_FLOOR:
        raise ImpossibleOutcome(f"outcome {labels[idx]!r} has probability {prob:.3e}")
    post = scale_sum(group_sums[idx], 1.0 / np.sqrt(prob))
    return labels[idx], prob, post


def project_single_mode(s, kappa, outcome):
    """Exact unnormalized single-mode occupation projector on a sum."""
    kap = check_mode(kappa, s.modes)
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    terms = []
    for coeff, state in s.terms:
        res = _term_project(state, kap, outcome)
        if res is not None:
            terms.append((coeff * res[0], res[1]))
    return SlaterSum(tuple(terms), s.modes, s.electrons, s.max_terms)


def measure_mode_sum(s, kappa, forced=None, rng=None):
    """Single-mode occupation measurement applied to a whole sum.

    Returns (outcome, probability, post) exactly like measure_mode but
    with SlaterSum states on both ends.
    """
    projected = {want: project_single_mode(s, kappa, want) for want in (0, 1)}
    probs = [sum_norm(projected[0]) ** 2, sum_norm(projected[1]) ** 2]
    idx = _pick(["0", "1"], probs, forced, rng)
    prob = probs[idx]
    if prob < PROB_FLOOR:
        raise ImpossibleOutcome(f"outcome {idx} has probability {prob:.3e}")
    post = scale_sum(projected[idx], 1.0 / np.sqrt(prob))
    return idx, prob, post


def reduce_to_two_fermion(s, kappa, lam):
    """Annihilate the standard context modes 2..N-1, leaving two fermions.

    Assumes the usual standard form: the interesting physics lives on
    modes {0, 1, N, N+1} and the context modes 2..N-1 are filled and
    orthogonal to both measured modes.
    """
    n = s.electrons
    if n < 2:
        raise WrongParticleNumber(f"reduction needs at least 2 electrons, got {n}")
    kap = check_mode(kappa, s.modes)
    lamv = check_mode(lam, s.modes)
    context = slice(2, n)
    overlap = max(
        float(np.max(np.abs(kap[context]), initial=0.0)),
        float(np.max(np.abs(lamv[context]), initial=0.0)),
    )
    if overlap > 1e-10:
        raise BadContext(
            f"measured modes overlap the context modes 2..{n - 1} by {overlap:.3e}"
        )
    current = s
    electrons = n
    for m in range(n - 1, 1, -1):
        e_m = np.zeros(s.modes, dtype=complex)
        e_m[m] = 1.0
        terms = tuple((c, annihilate(st, e_m)) for c, st in current.terms)
        electrons -= 1
        current = SlaterSum(terms, s.modes, electrons, s.max_terms)
    return current


def two_fermion_w(s):
    """Antisymmetric amplitude matrix w of a two-fermion sum.

    w[i, j] is half the occupation amplitude on the pair (i, j) with
    i < j, so that sum_ij w_ij a_i^dag a_j^dag |0> reproduces the state.
    """
    if s.electrons != 2:
        raise WrongParticleNumber(f"w is defined for 2 electrons, got {s.electrons}")
    w = np.zeros((s.modes, s.modes), dtype=complex)
    for coeff, state in s.terms:
        u = state.orbitals[:, 0]
        v = state.orbitals[:, 1]
        w += coeff * state.amplitude * (np.outer(u, v) - np.outer(v, u))
    return w / 2.0


def slater_number_two_fermion(w):
    """Number of determinants needed for a two-fermion state: rank(w)/2."""
    _, pairs = antisym_canonical(w)
    return sum(1 for z in pairs if abs(z) > PAIR_THRESHOLD)


def generic_p1_study(theta, phi, xi, n=2):
    """Work the two-mode outcome-1 projection of a filled standard state.

    Builds the measured modes from the three angles on a lattice of
    D = n + 2 modes, projects the n-electron standard determinant onto
    total occupation 1, normalizes, reduces to two fermions and extracts
    the 4x4 w matrix on the active modes {0, 1, n, n+1}.

    Returns (w, pf, closed_form) where pf is the computed Pfaffian of w
    and closed_form evaluates sin^2(phi) sin(2 xi) / (2 f_S f_C), the
    reference expression this construction is usually quoted with.
    """
    if n < 2:
        raise WrongParticleNumber(f"the study needs at least 2 electrons, got {n}")
    d = n + 2
    e = np.eye(d, dtype=complex)
    kap = np.cos(theta) * e[:, 0] + np.sin(theta) * e[:, n]
    lam = np.cos(phi) * (-np.sin(theta) * e[:, 0] + np.cos(theta) * e[:, n]) + np.sin(
        phi
    ) * (np.cos(xi) * e[:, 1] + np.sin(xi) * e[:, n + 1])
    start = SlaterSum.from_state(standard_state(d, n))
    proj = apply_two_mode_projector(start, kap, lam, 1)
    nrm = sum_norm(proj)
    if nrm > PRUNE_TOL:
        proj = scale_sum(proj, 1.0 / nrm)
    red = reduce_to_two_fermion(proj, kap, lam)
    w_full = two_fermion_w(red)
    active = [0, 1, n, n + 1]
    w = w_full[np.ix_(active, active)]
    pf = pfaffian(w)
    f_c = np.sqrt(np.cos(phi) ** 2 + np.cos(xi) ** 2 * np.sin(phi) ** 2)
    f_s = np.sqrt(np.cos(phi) ** 2 + np.sin(xi) ** 2 * np.sin(phi) ** 2)
    if f_s * f_c < 1e-15:
        closed_form = 0.0
    else:
        closed_form = float(np.sin(phi) ** 2 * np.sin(2 * xi) / (2 * f_s * f_c))
    return w, pf, closed_form
