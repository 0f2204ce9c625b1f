"""Command-line front end.

Subcommands:

    flosim simulate <circuit.json> [--seed S] [--oracle-check] [--max-terms N]
    flosim nogo <circuit.json>
    flosim bands --sites D --electrons N [--outcome 0|1|sample] [--seed S] [--out F]
    flosim slater-rank (<state.json> | --angles THETA PHI XI [--electrons N])

Transcripts go to stdout as plain text: comment lines prefixed '# ',
then one row per measurement.  Outputs are byte-identical for identical
inputs and seeds.  Exit codes: 0 success, 1 parse or config failure,
2 parity grouping rejected, 3 numerical check failure, 4 term cap hit.
"""

import argparse
import json
import sys

import numpy as np

from . import fock
from .bands import LatticeConfig, closed_form_w0, measure_origin
from .circuits import _complex_from_json, _matrix_from_json, load_circuit
from .errors import (
    BadConfig,
    FlosimError,
    OracleCheckFailed,
    ParityGroupingUnsupported,
    ParseError,
    TermCapExceeded,
)
from .linalg import pfaffian
from .multislater import (
    DEFAULT_MAX_TERMS,
    SlaterSum,
    evolve_sum,
    generic_p1_study,
    measure_mode_sum,
    measure_two_mode,
    scale_sum,
    slater_number_two_fermion,
    sum_norm,
    two_fermion_w,
)
from .simulate import (
    MeasureOne,
    MeasureTwo,
    Rotate,
    simulate_exact_branch,
    simulate_sampled,
)
from .slater import SlaterState, check_mode, standard_state

RNG_NAME = "numpy-default-pcg64"
ORACLE_TOL = 1e-8
ORACLE_MODE_CAP = 6


def _row_line(row):
    return (
        f"step={row.step} kind={row.kind} outcome={row.outcome} "
        f"p={row.probability:.12e} cumulative={row.cumulative:.12e} "
        f"terms={row.terms}"
    )


def _print_lines(lines, handle=None):
    out = handle if handle is not None else sys.stdout
    for line in lines:
        out.write(line + "\n")


def _dense_unitary_apply(vec, u):
    """Dense reference for a one-body rotation on the occupation basis."""
    d = vec.modes
    out = np.zeros_like(vec.amplitudes)
    for mask in range(1 << d):
        amp = vec.amplitudes[mask]
        if amp == 0:
            continue
        if mask == 0:
            out[0] += amp
            continue
        cols = [m for m in range(d) if (mask >> m) & 1]
        image = fock.expand(SlaterState(u[:, cols], 1.0))
        out += amp * image.amplitudes
    return fock.FockVector(d, out)


def _oracle_replay(circuit, transcript):
    """Re-run sampled outcomes against the dense reference.

    Returns (max probability deviation, min post-state fidelity) over
    every step of the trajectory the transcript records.
    """
    d, n = circuit.modes, circuit.electrons
    rows = {row.step: row for row in transcript.rows}
    state = SlaterSum.from_state(standard_state(d, n))
    vec = fock.expand(standard_state(d, n))
    max_dev = 0.0
    min_fid = 1.0
    for idx, step in enumerate(circuit.steps):
        if isinstance(step, Rotate):
            u = step.resolve()
            state = evolve_sum(state, u)
            vec = _dense_unitary_apply(vec, u)
        elif isinstance(step, MeasureOne):
            row = rows[idx]
            kap = check_mode(step.kappa, d)
            outcome = int(row.outcome)
            _, prob, state = measure_mode_sum(state, kap, forced=outcome)
            if outcome == 1:
                proj = fock.creation_op_apply(
                    fock.annihilation_op_apply(vec, kap), kap
                )
            else:
                proj = fock.annihilation_op_apply(
                    fock.creation_op_apply(vec, kap), kap
                )
            p_oracle = fock.norm(proj) ** 2
            max_dev = max(max_dev, abs(prob - p_oracle))
            vec = fock.FockVector(d, proj.amplitudes / np.sqrt(p_oracle))
        elif isinstance(step, MeasureTwo):
            row = rows[idx]
            kap = check_mode(step.kappa, d)
            lam = check_mode(step.lam, d)
            _, prob, state = measure_two_mode(
                state, kap, lam, step.grouping, forced=row.outcome
            )
            total = np.zeros_like(vec.amplitudes)
            for digit in row.outcome:
                part = fock.two_mode_projector_apply(vec, kap, lam, int(digit))
                total += part.amplitudes
            p_oracle = float(np.linalg.norm(total)) ** 2
            max_dev = max(max_dev, abs(prob - p_oracle))
            vec = fock.FockVector(d, total / np.sqrt(p_oracle))
        min_fid = min(min_fid, fock.fidelity(fock.expand_sum(state), vec))
    return max_dev, min_fid


def cmd_simulate(args):
    circuit = load_circuit(args.path)
    transcript, final = simulate_sampled(
        circuit.steps,
        circuit.modes,
        circuit.electrons,
        seed=args.seed,
        max_terms=args.max_terms,
    )
    lines = [
        "# flosim transcript",
        "# command = simulate",
        f"# modes = {circuit.modes} electrons = {circuit.electrons} "
        f"steps = {len(circuit.steps)}",
        f"# seed = {args.seed} rng = {RNG_NAME}",
        f"# max terms = {args.max_terms}",
    ]
    lines += [_row_line(row) for row in transcript.rows]
    lines.append(f"# final terms = {final.term_count}")
    failure = None
    if args.oracle_check:
        if circuit.modes > ORACLE_MODE_CAP:
            raise BadConfig(
                f"the oracle check handles at most {ORACLE_MODE_CAP} modes, "
                f"got {circuit.modes}"
            )
        max_dev, min_fid = _oracle_replay(circuit, transcript)
        lines.append(f"# oracle max probability deviation = {max_dev:.3e}")
        lines.append(f"# oracle min fidelity = {min_fid:.12f}")
        if max_dev > ORACLE_TOL or min_fid < 1.0 - ORACLE_TOL:
            failure = OracleCheckFailed(
                f"probability deviation {max_dev:.3e}, fidelity {min_fid:.12f}"
            )
    _print_lines(lines)
    if failure is not None:
        raise failure
    return 0


def cmd_nogo(args):
    circuit = load_circuit(args.path)
    transcript, final = simulate_exact_branch(
        circuit.steps, circuit.modes, circuit.electrons
    )
    lines = [
        "# flosim transcript",
        "# command = nogo",
        f"# modes = {circuit.modes} electrons = {circuit.electrons} "
        f"steps = {len(circuit.steps)}",
    ]
    lines += [_row_line(row) for row in transcript.rows]
    lines.append("# final terms = 1")
    lines.append(
        f"# trajectory probability = {transcript.cumulative_probability:.12e}"
    )
    _print_lines(lines)
    return 0


def cmd_bands(args):
    cfg = LatticeConfig(args.sites, args.electrons)
    lines = [f"# sites = {cfg.sites} electrons = {cfg.electrons}"]
    if args.outcome == "sample":
        rng = np.random.default_rng(args.seed)
        outcome = 1 if rng.random() < cfg.filling else 0
        lines.append(f"# seed = {args.seed} rng = {RNG_NAME}")
    else:
        outcome = int(args.outcome)
    probability, _, profile = measure_origin(cfg, outcome)
    lines.append(f"# outcome = {outcome}")
    lines.append(f"# probability = {probability!r}")
    lines.append("x,density_before,density_after,orbital_re,orbital_im,closed_form")
    for r in range(cfg.sites):
        x = int(profile.x[r])
        orb = profile.first_orbital[r]
        cells = [
            str(x),
            repr(float(profile.density_before[r])),
            repr(float(profile.density_after[r])),
            repr(float(orb.real)),
            repr(float(orb.imag)),
            repr(float(closed_form_w0(cfg, x))),
        ]
        lines.append(",".join(cells))
    if args.out is None:
        _print_lines(lines)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            _print_lines(lines, handle)
    return 0


def _format_complex(z):
    z = complex(z)
    return f"{z.real:+.9e}{z.imag:+.9e}j"


def _state_sum_from_file(path):
    """Read a determinant-sum state file for the rank report."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"bad JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    d = doc.get("modes")
    n = doc.get("electrons")
    if not isinstance(d, int) or not isinstance(n, int):
        raise ParseError("state file needs integer 'modes' and 'electrons'")
    raw_terms = []
    if "orbitals" in doc:
        amp = _complex_from_json(doc.get("amplitude", 1.0), "amplitude")
        raw_terms.append((amp, doc["orbitals"]))
    elif "terms" in doc:
        if not isinstance(doc["terms"], list) or not doc["terms"]:
            raise ParseError("terms: expected a nonempty list")
        for i, term in enumerate(doc["terms"]):
            if not isinstance(term, dict) or "orbitals" not in term:
                raise ParseError(f"terms[{i}]: expected an object with 'orbitals'")
            coeff = _complex_from_json(
                term.get("coefficient", 1.0), f"terms[{i}].coefficient"
            )
            raw_terms.append((coeff, term["orbitals"]))
    else:
        raise ParseError("state file needs 'orbitals' or 'terms'")
    built = []
    for i, (coeff, rows) in enumerate(raw_terms):
        mat = _matrix_from_json(rows, (d, n), f"terms[{i}].orbitals")
        try:
            built.append((coeff, SlaterState(mat, 1.0)))
        except FlosimError as exc:
            raise ParseError(f"terms[{i}].orbitals: {exc}") from exc
    ssum = SlaterSum(terms=tuple(built), modes=d, electrons=n)
    nrm = sum_norm(ssum)
    if nrm < 1e-12:
        raise ParseError("state file describes a zero state")
    return scale_sum(ssum, 1.0 / nrm)


def cmd_slater_rank(args):
    if (args.path is None) == (args.angles is None):
        raise ParseError("give exactly one of a state file or --angles")
    if args.angles is not None:
        theta, phi, xi = args.angles
        w, pf, closed = generic_p1_study(theta, phi, xi, args.electrons)
        closed_text = repr(float(closed))
    else:
        ssum = _state_sum_from_file(args.path)
        w = two_fermion_w(ssum)
        pf = pfaffian(w) if w.shape[0] % 2 == 0 else None
        closed_text = "n/a"
    print("w =")
    for row in np.asarray(w):
        print("  " + "  ".join(_format_complex(z) for z in row))
    if pf is None:
        print("Pfaffian = n/a (odd mode count)")
    else:
        print(f"Pfaffian = {_format_complex(pf)}")
        print(f"|Pf| = {abs(complex(pf))!r}")
    print(f"closed form = {closed_text}")
    print(f"Slater number = {slater_number_two_fermion(w)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="flosim",
        description="Determinant-based simulation of fermionic linear optics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a circuit on a determinant sum")
    p_sim.add_argument("path", help="circuit file")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument(
        "--oracle-check",
        action="store_true",
        help="replay against the dense reference (needs at most 6 modes)",
    )
    p_sim.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)
    p_sim.set_defaults(func=cmd_simulate)

    p_nogo = sub.add_parser(
        "nogo", help="run a circuit keeping a single determinant throughout"
    )
    p_nogo.add_argument("path", help="circuit file")
    p_nogo.set_defaults(func=cmd_nogo)

    p_bands = sub.add_parser(
        "bands", help="filled-band origin measurement on a ring lattice"
    )
    p_bands.add_argument("--sites", type=int, required=True)
    p_bands.add_argument("--electrons", type=int, required=True)
    p_bands.add_argument("--outcome", choices=("0", "1", "sample"), default="sample")
    p_bands.add_argument("--seed", type=int, default=0)
    p_bands.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p_bands.set_defaults(func=cmd_bands)

    p_rank = sub.add_parser(
        "slater-rank", help="rank report for a two-electron state"
    )
    p_rank.add_argument("path", nargs="?", default=None, help="state file")
    p_rank.add_argument(
        "--angles",
        nargs=3,
        type=float,
        default=None,
        metavar=("THETA", "PHI", "XI"),
        help="build the two-rotation study state from three angles",
    )
    p_rank.add_argument("--electrons", type=int, default=2)
    p_rank.set_defaults(func=cmd_slater_rank)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParityGroupingUnsupported as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OracleCheckFailed as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except TermCapExceeded as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except FlosimError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
