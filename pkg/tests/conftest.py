from __future__ import annotations

import pytest

from fuscomp.fusion import fusion_from_group
from fuscomp.green import example_system, klein_fours, local_summand_element, example_element
from fuscomp.grp import load_group, sylow_subgroup
from fuscomp.linalg import fp
from fuscomp import mackeymod as mm


def sylow_system(name: str):
    G = load_group(name)
    return fusion_from_group(G, sylow_subgroup(G, 2), 2, label=f"F_S({name})")


@pytest.fixture(scope="session")
def F2():
    return fp(2)


@pytest.fixture(scope="session")
def D8():
    return load_group("D8")


@pytest.fixture(scope="session")
def S4():
    return load_group("S4")


@pytest.fixture(scope="session")
def GL32():
    return load_group("GL3_2")


@pytest.fixture(scope="session")
def GL23():
    return load_group("GL2_3")


@pytest.fixture(scope="session")
def F_D8():
    return sylow_system("D8")


@pytest.fixture(scope="session")
def F_S4():
    return sylow_system("S4")


@pytest.fixture(scope="session")
def F_C2():
    return sylow_system("C2")


@pytest.fixture(scope="session")
def F1():
    """The fusion system of GL3(2) on a Sylow 2-subgroup (dihedral of order 8)."""
    return example_system("GL3_2")


@pytest.fixture(scope="session")
def H1(F1):
    return klein_fours(F1)[0]


@pytest.fixture(scope="session")
def example_module(F1, H1, F2):
    """The indecomposable summand of the cyclic module of the example idempotent."""
    Q = mm.centric_quotient(F1, F2)
    e = Q.vec(example_element(F1, H1, F2))
    return mm.cyclic_module(F1, F2, local_summand_element(F1, F2, e), label="P")


@pytest.fixture(scope="session")
def literal_example_module(F1, H1, F2):
    Q = mm.centric_quotient(F1, F2)
    return mm.cyclic_module(F1, F2, example_element(F1, H1, F2), label="M")


def regular_module(F, R):
    Q = mm.centric_quotient(F, R)
    return mm.generated_module(F, R, Q.unit_vector(), label="mu/I")


# one entry per acceptance criterion run, printed after the session
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record(criterion: str, passed: bool, detail: str = "") -> bool:
    ACCEPTANCE_RESULTS.append((criterion, bool(passed), detail))
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        line = f"{'PASS' if passed else 'FAIL'}  {criterion}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)
