"""Shared, session-scoped algebra and twist fixtures."""

from __future__ import annotations

from dataclasses import dataclass

import pytest

from qtwist import cartan as C
from qtwist import twist as TW
from qtwist import uq_engine as U


@dataclass
class TwistCase:
    alg: U.UqAlgebra
    ld: C.LatticeData
    sol: C.BicharSolution
    td: TW.TwistData
    J: U.TensorElement
    H: TW.TwistedHopf


def make_case(typ: str, rank: int, l: int, pairs: dict, index: int = 0) -> TwistCase:
    alg = U.algebra_for(typ, rank, l)
    ld = C.compute_lattices(alg.rs, C.make_triple(pairs), l)
    sol = C.solve_eqs(ld)[index]
    td, J = TW.twist_for(alg, ld, sol)
    return TwistCase(alg, ld, sol, td, J, TW.TwistedHopf(J))


def a3_solutions(ld: C.LatticeData) -> dict:
    """The three bicharacter solutions of the A3 triple a1 -> a3, keyed by S(a1+a3, a2) as a q-power."""
    return {s.value((1, 0, 1), (0, 1, 0), 3): s for s in C.solve_eqs(ld)}


@pytest.fixture(scope="session")
def a1():
    return U.algebra_for("A", 1, 3)


@pytest.fixture(scope="session")
def a1_l5():
    return U.algebra_for("A", 1, 5)


@pytest.fixture(scope="session")
def a2():
    return U.algebra_for("A", 2, 3)


@pytest.fixture(scope="session")
def a3():
    return U.algebra_for("A", 3, 3)


@pytest.fixture(scope="session")
def a2_max() -> TwistCase:
    return make_case("A", 2, 3, {0: 1})


@pytest.fixture(scope="session")
def a2_empty() -> TwistCase:
    return make_case("A", 2, 3, {})


@pytest.fixture(scope="session")
def a1_empty() -> TwistCase:
    return make_case("A", 1, 3, {})


@pytest.fixture(scope="session")
def a3_lattices(a3):
    return C.compute_lattices(a3.rs, C.make_triple({0: 2}), 3)


@pytest.fixture(scope="session")
def a3_cases(a3, a3_lattices) -> dict:
    """Twists of the A3 triple a1 -> a3, keyed by S(a1+a3, a2) exponent (1 is the q-solution)."""
    out = {}
    for key, sol in a3_solutions(a3_lattices).items():
        td, J = TW.twist_for(a3, a3_lattices, sol)
        out[key] = TwistCase(a3, a3_lattices, sol, td, J, TW.TwistedHopf(J))
    return out


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
