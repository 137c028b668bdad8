"""Command-line front end.

Exit status: 0 on success, 1 when ``--strict`` is set and the analysis
finds the task infeasible (or ``paper-suite`` has a failing check), 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import qkd as qkd_mod
from .catalog import UnknownStateError, catalog_entry, catalog_names, catalog_state
from .densecoding import sdc_report
from .entropy import Bipartition, entropy_table, schmidt_decompose
from .ket import KetSyntaxError, dumps_ket, format_ket, ket_to_dict, load_state_file
from .reproduce import run_all
from .teleport import (
    InfeasibleTaskError,
    TeleportTask,
    build_measurement_basis,
    check_feasibility,
    simulate_teleportation,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports errors on a single line."""

    def error(self, message):
        self.exit(2, f"error: {message} (see {self.prog} --help)\n")


# ---------------------------------------------------------------- helpers


def load_state(source):
    path = Path(source)
    if path.suffix in (".ket", ".json"):
        try:
            return load_state_file(path)
        except OSError as exc:
            raise UsageError(f"cannot read state file {source}: {exc.strerror}") from None
        except (KetSyntaxError, ValueError) as exc:
            raise UsageError(f"bad state file {source}: {exc}") from None
    try:
        return catalog_state(source)
    except UnknownStateError as exc:
        raise UsageError(f"{exc} (or give a .ket/.json file)") from None


def parse_labels(text, n_qubits, what):
    try:
        labels = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise UsageError(f"--{what} expects comma-separated qubit labels like 1,2; got {text!r}") from None
    if not labels:
        raise UsageError(f"--{what} needs at least one qubit label")
    bad = [q for q in labels if not 1 <= q <= n_qubits]
    if bad:
        raise UsageError(f"--{what}: label(s) {bad} out of range 1..{n_qubits}")
    if len(set(labels)) != len(labels):
        raise UsageError(f"--{what}: repeated labels in {text!r}")
    if len(labels) >= n_qubits:
        raise UsageError(f"--{what} must leave at least one qubit to the other party")
    return tuple(sorted(labels))


def parse_alpha(text):
    try:
        return np.array([complex(x.strip().replace("i", "j")) for x in text.split(",")])
    except ValueError:
        raise UsageError(f"--alpha expects comma-separated complex numbers like 0.6,0.8i; got {text!r}") from None


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def emit_json(doc):
    print(json.dumps(doc, default=_json_default, allow_nan=False))


def fmt_labels(labels):
    return ",".join(map(str, labels))


# ---------------------------------------------------------------- commands


def cmd_states(args):
    if args.action == "list":
        entries = [catalog_entry(n) for n in catalog_names()]
        if args.json:
            emit_json([{"name": e.name, "n_qubits": e.state.n_qubits, "description": e.description} for e in entries])
        else:
            for e in entries:
                print(f"{e.name:<8} {e.state.n_qubits}q  {e.description}")
        return 0
    if not args.name:
        raise UsageError("states show needs a state name")
    state = load_state(args.name)
    if args.json:
        emit_json(ket_to_dict(state))
    else:
        print(format_ket(state))
    return 0


def cmd_entropy(args):
    state = load_state(args.state)
    table = entropy_table(state)
    if args.json:
        emit_json({"state": args.state, "n_qubits": state.n_qubits, "rows": [r.to_dict() for r in table]})
        return 0
    print(f"{'subsystem':<12}{'partition':<16}{'entropy':>8}")
    for row in table:
        part = row.partition
        print(f"{'rho_' + ''.join(map(str, row.key)):<12}{str(part):<16}{row.entropy_bits:>8.4f}")
    return 0


def cmd_schmidt(args):
    state = load_state(args.state)
    side_a = parse_labels(args.side_a, state.n_qubits, "side-a")
    sf = schmidt_decompose(state, Bipartition.from_side(state.n_qubits, side_a))
    if args.json:
        emit_json({
            "side_a": list(sf.partition.side_a),
            "side_b": list(sf.partition.side_b),
            "coefficients": sf.coefficients.tolist(),
            "rank": sf.rank,
            "entropy_bits": sf.entropy(),
            "left_basis": [ket_to_dict(sf.left(l))["amplitudes"] for l in range(sf.rank)],
            "right_basis": [ket_to_dict(sf.right(l))["amplitudes"] for l in range(sf.rank)],
        })
        return 0
    print(f"partition {sf.partition}  rank {sf.rank}  entropy {sf.entropy():.4f}")
    for l, c in enumerate(sf.coefficients):
        print(f"  {c:.4f}  [{format_ket(sf.left(l))}]_{fmt_labels(sf.partition.side_a)}"
              f" [{format_ket(sf.right(l))}]_{fmt_labels(sf.partition.side_b)}")
    return 0


def _teleport_task(args):
    state = load_state(args.state)
    bob = parse_labels(args.bob, state.n_qubits, "bob")
    try:
        return TeleportTask(state, bob, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_teleport(args):
    task = _teleport_task(args)
    verdict = check_feasibility(task)
    if args.action == "check":
        if args.json:
            emit_json({
                "bob": list(task.bob_qubits),
                "m": task.m,
                "feasible": verdict.feasible,
                "structural_ok": verdict.structural_ok,
                "entropy_ok": verdict.entropy_ok,
                "bob_entropy_bits": verdict.bob_entropy_bits,
                "required_entropy_bits": verdict.required_entropy_bits,
                "schmidt_spectrum": list(verdict.schmidt_spectrum),
            })
        else:
            print(verdict.summary())
        return 1 if args.strict and not verdict.feasible else 0

    if not verdict.feasible and not args.force:
        if args.json:
            emit_json({"feasible": False, "summary": verdict.summary()})
        else:
            print(f"{verdict.summary()}; not running (use --force to run the construction anyway)")
        return 1 if args.strict else 0
    if args.alpha is not None and args.seed is not None:
        raise UsageError("give either --alpha or --seed, not both")
    alpha = parse_alpha(args.alpha) if args.alpha is not None else None
    seed = None if alpha is not None else (args.seed if args.seed is not None else 0)
    try:
        basis = build_measurement_basis(task, force=args.force)
        out = simulate_teleportation(task, alpha=alpha, seed=seed, basis=basis)
    except InfeasibleTaskError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        doc = out.to_dict()
        doc.update({"bob": list(task.bob_qubits), "m": task.m, "feasible": verdict.feasible})
        emit_json(doc)
    else:
        print(verdict.summary())
        print(f"outcomes {len(out.outcome_probabilities)}, active {out.active_count}, "
              f"cbits {out.cbits_required:.4f}")
        for l in range(out.active_count):
            j, k = basis.outcome_labels[l]
            print(f"  outcome ({j},{k})  p={out.outcome_probabilities[l]:.4f}  "
                  f"fidelity={out.per_outcome_fidelity[l]:.4f}")
        print(f"min fidelity {out.min_fidelity:.10f}")
    exact = out.min_fidelity >= 1 - 1e-9
    return 1 if args.strict and not exact else 0


def cmd_sdc(args):
    state = load_state(args.state)
    sender = parse_labels(args.sender, state.n_qubits, "sender")
    rep = sdc_report(state, sender)
    if args.json:
        emit_json(rep.to_dict())
    else:
        print(f"sender {fmt_labels(rep.sender_qubits)}  entropy {rep.sender_entropy_bits:.4f}")
        print(f"orthogonal states {rep.k_orthogonal}  capacity {rep.capacity_cbits:.4f} cbits")
        print(f"witness {' '.join(rep.orthogonal_set)}")
    enhanced = rep.capacity_cbits >= len(sender) + 1 - 1e-12
    return 1 if args.strict and not enhanced else 0


def _qkd_split(args, state):
    alice = parse_labels(args.alice, state.n_qubits, "alice")
    if state.n_qubits != 4 or len(alice) != 2:
        raise UsageError("qkd needs a 4-qubit state and two Alice qubits, e.g. --alice 1,3")
    return alice, qkd_mod.complement(alice)


def _fmt_matrix(p, names_a, names_b):
    lines = ["        " + "".join(f"{n:>8}" for n in names_b)]
    for i, row in enumerate(p):
        lines.append(f"{names_a[i]:>8}" + "".join(f"{x:>8.4f}" for x in row))
    return "\n".join(lines)


def cmd_qkd(args):
    state = load_state(args.state)
    alice, bob = _qkd_split(args, state)
    if args.action == "run":
        if args.rounds < 1:
            raise UsageError("--rounds must be at least 1")
        run = qkd_mod.simulate_qkd(state, alice, bob, args.rounds, args.seed)
        sift, agree = qkd_mod.analytic_rates(state, alice, bob)
        if args.json:
            doc = run.to_dict()
            doc.update({"alice": list(alice), "bob": list(bob), "analytic_sift_rate": sift,
                        "analytic_agreement_rate": None if math.isnan(agree) else agree})
            emit_json(doc)
        else:
            print(f"rounds {run.rounds}  seed {run.seed}  sifted {run.n_sifted}")
            print(f"sift rate {run.sift_rate:.4f} (analytic {sift:.4f})")
            print(f"agreement {run.agreement_rate:.4f} (analytic {agree:.4f})")
            if run.n_sifted <= 64:
                print(f"alice key {run.alice_key}\nbob key   {run.bob_key}")
        return 1 if args.strict and not run.agreement_rate == 1.0 else 0

    reports = [qkd_mod.correlation_check(state, alice, bob, b) for b in qkd_mod.FAMILIES]
    verdict = qkd_mod.qkd_suitability(state)
    if args.json:
        emit_json({
            "alice": list(alice),
            "bob": list(bob),
            "correlations": [r.to_dict() for r in reports],
            "perfectly_correlated": all(r.perfectly_correlated for r in reports),
            "suitability": verdict.to_dict(),
        })
    else:
        for r in reports:
            b = r.basis_a
            print(f"{b.name} basis, alice {fmt_labels(alice)} | bob {fmt_labels(bob)}")
            print(_fmt_matrix(r.joint, b.outcome_names, b.outcome_names))
            print(f"  perfectly correlated: {r.perfectly_correlated}  agreement {r.agreement_rate:.4f}")
        where = ""
        if verdict.witness is not None:
            w = verdict.witness
            encs = "; ".join(
                f"{r.basis_a.name}: alice {r.basis_a.describe_encoding()} bob {r.basis_b.describe_encoding()}"
                for r in w.reports
            )
            where = f" (split {fmt_labels(w.alice)}|{fmt_labels(w.bob)}; {encs})"
        print(f"suitable: {verdict.suitable}{where}")
    return 1 if args.strict and not verdict.suitable else 0


def cmd_paper_suite(args):
    checks = run_all()
    if args.json:
        emit_json({"passed": all(c.passed for c in checks), "checks": [c.to_dict() for c in checks]})
    else:
        for c in checks:
            print(c.line())
        n_fail = sum(not c.passed for c in checks)
        print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return 0 if all(c.passed for c in checks) else 1


# ---------------------------------------------------------------- parser


def build_parser():
    p = _Parser(prog="qresource", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, state=True):
        if state:
            sp.add_argument("--state", required=True, help="catalog name, or a .ket / .json file")
        sp.add_argument("--json", action="store_true", help="emit one JSON document")
        sp.add_argument("--strict", action="store_true", help="exit 1 if the analysis fails")

    sp = sub.add_parser("states", help="list or show catalog states")
    sp.add_argument("action", choices=["list", "show"])
    sp.add_argument("name", nargs="?")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_states)

    sp = sub.add_parser("entropy", help="entropy of every bipartition")
    common(sp)
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("schmidt", help="Schmidt decomposition across a cut")
    common(sp)
    sp.add_argument("--side-a", required=True, help="qubit labels on the left side, e.g. 1,2")
    sp.set_defaults(func=cmd_schmidt)

    sp = sub.add_parser("teleport", help="exact teleportation feasibility and simulation")
    sp.add_argument("action", choices=["check", "run"])
    common(sp)
    sp.add_argument("--bob", required=True, help="Bob's qubit labels, e.g. 3,4")
    sp.add_argument("--m", type=int, required=True, help="number of terms in the unknown state")
    sp.add_argument("--alpha", help="comma-separated coefficients (run only)")
    sp.add_argument("--seed", type=int, help="seed for random coefficients (run only)")
    sp.add_argument("--force", action="store_true", help="run the construction even if infeasible")
    sp.set_defaults(func=cmd_teleport)

    sp = sub.add_parser("sdc", help="superdense-coding capacity")
    common(sp)
    sp.add_argument("--sender", required=True, help="sender's qubit labels, e.g. 1,2")
    sp.set_defaults(func=cmd_sdc)

    sp = sub.add_parser("qkd", help="two-basis QKD analysis")
    sp.add_argument("action", choices=["check", "run"])
    common(sp)
    sp.add_argument("--alice", required=True, help="Alice's two qubit labels, e.g. 1,3")
    sp.add_argument("--rounds", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=42)
    sp.set_defaults(func=cmd_qkd)

    sp = sub.add_parser("paper-suite", help="run the full reference battery")
    common(sp, state=False)
    sp.set_defaults(func=cmd_paper_suite)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
