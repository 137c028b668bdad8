"""Reference battery: entropy table, teleportation matrix, dense-coding
capacities and QKD verdicts for the four-qubit states.

Each check returns a :class:`Check`; :func:`run_all` is what the
``paper-suite`` CLI command prints.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .catalog import catalog_state
from .densecoding import sdc_report
from .entropy import entropy_table
from .qkd import BELL, COMPUTATIONAL, correlation_check, qkd_suitability
from .teleport import TeleportTask, check_feasibility

TABLE_TOL = 5e-3

# Rows in column order S(1), S(2), S(3), S(4), S(12), S(13), S(14).
ENTROPY_TABLE = {
    "GHZ4": (1, 1, 1, 1, 1, 1, 1),
    "OMEGA": (1, 1, 1, 1, 2, 2, 1),
    "W4": (0.81, 0.81, 0.81, 0.81, 1, 1, 1),
    "S1": (0.81, 1, 0.81, 0.81, 1.5, 1.22, 1.22),
    "S2": (0.81, 1, 1, 1, 1.5, 1.5, 1.5),
}

# (state, bob qubits, m) -> feasible
TELEPORT_MATRIX = (
    [(("GHZ4", (q,), 2), True) for q in range(1, 5)]
    + [(("W4", (q,), 2), False) for q in range(1, 5)]
    + [(("S1", (q,), 2), q == 2) for q in range(1, 5)]
    + [(("S2", (q,), 2), q != 1) for q in range(1, 5)]
    + [(("OMEGA", (q,), 2), True) for q in range(1, 5)]
    + [(("OMEGA", bob, 4), bob in {(1, 2), (3, 4), (1, 3), (2, 4)}) for bob in combinations(range(1, 5), 2)]
    + [(("GHZ4", bob, 4), False) for bob in combinations(range(1, 5), 2)]
)

# (state, sender) -> capacity in cbits
CAPACITIES = (
    [(("GHZ4", (q,)), 2) for q in range(1, 5)]
    + [(("GHZ4", (1, 2)), 3), (("GHZ4", (1, 2, 3)), 4)]
    + [(("OMEGA", (1, 2)), 4), (("OMEGA", (1, 3)), 4), (("OMEGA", (1, 4)), 3)]
    + [(("OMEGA", (q,)), 2) for q in range(1, 5)]
    + [(("W4", (1, 2)), 3)]
    + [(("S1", (2,)), 2), (("S1", (1, 2)), 3), (("S1", (1, 3)), 2), (("S1", (1, 4)), 2), (("S1", (1, 3, 4)), 4)]
    + [(("S2", pair), 3) for pair in combinations(range(1, 5), 2)]
)

QKD_VERDICTS = {"GHZ4": True, "W4": True, "OMEGA": True, "S1": False, "S2": False}


@dataclass(frozen=True)
class Check:
    group: str
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.group}: {self.name} ({self.detail})"

    def to_dict(self):
        return {"group": self.group, "name": self.name, "passed": self.passed, "detail": self.detail}


def entropy_checks():
    for name, expected in ENTROPY_TABLE.items():
        got = [row.entropy_bits for row in entropy_table(catalog_state(name))]
        worst = max(abs(g - e) for g, e in zip(got, expected))
        yield Check(
            "entropy", name, worst <= TABLE_TOL,
            " ".join(f"{g:.4f}" for g in got) + f"; max dev {worst:.4f}",
        )


def teleport_checks():
    for (name, bob, m), expected in TELEPORT_MATRIX:
        v = check_feasibility(TeleportTask(catalog_state(name), bob, m))
        label = f"{name} bob={','.join(map(str, bob))} m={m}"
        yield Check("teleport", label, v.feasible == expected, v.summary())


def capacity_checks():
    for (name, sender), cbits in CAPACITIES:
        r = sdc_report(catalog_state(name), sender)
        label = f"{name} sender={','.join(map(str, sender))}"
        yield Check(
            "sdc", label, abs(r.capacity_cbits - cbits) < 1e-12,
            f"k={r.k_orthogonal}, {r.capacity_cbits:g} cbits, expected {cbits}",
        )
    # Single-qubit S1 shares other than qubit 2 give fewer than four states.
    for q in (1, 3, 4):
        r = sdc_report(catalog_state("S1"), (q,))
        yield Check("sdc", f"S1 sender={q}", r.k_orthogonal < 4, f"k={r.k_orthogonal}, expected < 4")


def qkd_checks():
    ghz = catalog_state("GHZ4")
    for basis in (COMPUTATIONAL, BELL):
        rep = correlation_check(ghz, (1, 3), (2, 4), basis)
        yield Check("qkd", f"GHZ4 13|24 {basis.name}", rep.perfectly_correlated, f"agreement {rep.agreement_rate:.4f}")
    for name in ("S1", "S2"):
        reps = [correlation_check(catalog_state(name), (1, 3), (2, 4), b) for b in (COMPUTATIONAL, BELL)]
        ok = not all(r.perfectly_correlated for r in reps)
        yield Check("qkd", f"{name} 13|24 not correlated", ok, ", ".join(str(r.perfectly_correlated) for r in reps))
    for name, expected in QKD_VERDICTS.items():
        v = qkd_suitability(catalog_state(name))
        where = "" if v.witness is None else f" via {''.join(map(str, v.witness.alice))}|{''.join(map(str, v.witness.bob))}"
        yield Check("qkd", f"{name} suitability", v.suitable == expected, f"suitable={v.suitable}{where}")


def run_all():
    checks = []
    for group in (entropy_checks, teleport_checks, capacity_checks, qkd_checks):
        checks.extend(group())
    return checks
