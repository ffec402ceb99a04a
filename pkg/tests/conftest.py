import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qfuzz.dsl import parse  # noqa: E402

# the motivating listing, comment lines included
MOTIVATING = """\
procedure example(){
//define a quantum register with 5 qubits
	qureg q[5];
//make all states have the same probability
	Mix(q);
//meaasure the value of q[5] and check
	if (measure(q)==5)
	{
		print "crash";
		int i=1/0;   //bug code
	}
	print "safe";
}
"""

PROGRAMS_DIR = Path(__file__).parent / "programs"
GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def motivating():
    return parse(MOTIVATING)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
