import numpy as np
import pytest

from conftest import PROGRAMS_DIR
from oracle import kron_apply
from qfuzz.analysis import BranchKind, HookKind, extract_sensitive
from qfuzz.dsl import BinOp, IntLit, parse, parse_file
from qfuzz.interpreter import (
    UnsupportedProgramError, WeightEvaluator, WidthMismatchError, _eval, coverage,
    execute_sampled, run_to_measurement, sample_outcome, weight_analysis,
)
from qfuzz.statevec import (
    GateKind, StateVector, basis_state, mix, prob_of_value, random_state, random_states,
)


def site0(p):
    return extract_sensitive(p).sites[0]


def test_run_to_measurement(motivating):
    ket = run_to_measurement(motivating, basis_state(5, 0), site0(motivating))
    assert np.allclose(ket.amps, 1 / np.sqrt(32), atol=1e-15)


def test_run_to_measurement_no_gates(rng):
    p = parse("procedure t(){ qureg q[3]; if (measure(q)==2) { } }")
    init = random_state(3, rng)
    assert np.array_equal(run_to_measurement(p, init, site0(p)).amps, init.amps)


def test_run_to_measurement_single_gate():
    p = parse("procedure t(){ qureg q[5]; X(q[4]); if (measure(q)==5) { } }")
    init = basis_state(5, 0b00100)
    ket = run_to_measurement(p, init, site0(p))
    assert ket.allclose(kron_apply(init, GateKind.X, 4), atol=1e-12)
    assert ket.allclose(basis_state(5, 5))


def test_weight_examples(motivating):
    s = site0(motivating)
    assert weight_analysis(motivating, basis_state(5, 0), s) == pytest.approx(0.03125, abs=1e-12)
    assert weight_analysis(motivating, mix(basis_state(5, 0)), s) == pytest.approx(0.0, abs=1e-12)
    p = parse("procedure t(){ qureg q[5]; if (measure(q)==5) { } }")
    assert weight_analysis(p, basis_state(5, 5), site0(p)) == 1.0


def test_weight_is_prob_of_ket(rng):
    p = parse_file(PROGRAMS_DIR / "gates.qpl")
    s = site0(p)
    for _ in range(20):
        init = random_state(4, rng)
        assert weight_analysis(p, init, s) == prob_of_value(run_to_measurement(p, init, s), s.target_value)


def test_weight_evaluator_matches_and_counts(rng):
    p = parse_file(PROGRAMS_DIR / "gates.qpl")
    s = site0(p)
    ev = WeightEvaluator(p, s)
    rows = random_states(4, 9, rng)
    w = ev.weights(rows)
    assert ev.evaluations == 9
    for r, x in zip(rows, w):
        assert x == pytest.approx(weight_analysis(p, StateVector(4, r), s), abs=1e-15)
    ev(StateVector(4, rows[0]))
    assert ev.evaluations == 10


def test_width_mismatch(motivating):
    with pytest.raises(WidthMismatchError):
        weight_analysis(motivating, basis_state(4, 0), site0(motivating))
    with pytest.raises(WidthMismatchError):
        execute_sampled(motivating, basis_state(3, 0), np.random.default_rng(0))


def test_weight_mode_needs_first_measurement():
    p = parse_file(PROGRAMS_DIR / "two_sites.qpl")
    second = extract_sensitive(p).sites[1]
    with pytest.raises(UnsupportedProgramError):
        weight_analysis(p, basis_state(3, 0), second)
    # the first site is fine
    assert weight_analysis(p, basis_state(3, 0), extract_sensitive(p).sites[0]) == pytest.approx(0.0, abs=1e-15)


def test_nested_site_rejected_in_weight_mode():
    p = parse("procedure t(){ qureg q[1]; if (measure(q)==1) { if (measure(q)==1) { } } }")
    with pytest.raises(UnsupportedProgramError):
        weight_analysis(p, basis_state(1, 0), extract_sensitive(p).sites[1])


def test_sample_outcome():
    probs = np.array([0.0, 0.25, 0.0, 0.75])
    assert sample_outcome(probs, 0.0) == 1
    assert sample_outcome(probs, 0.2499) == 1
    assert sample_outcome(probs, 0.25) == 3
    assert sample_outcome(probs, np.nextafter(1.0, 0)) == 3
    assert sample_outcome(np.array([0.5, 0.5, 0.0]), np.nextafter(1.0, 0)) == 1


def test_motivating_sampling(motivating):
    rng = np.random.default_rng(2024)
    report = extract_sensitive(motivating)
    site = report.sites[0]
    counts = np.zeros(32, int)
    for _ in range(3200):
        tr = execute_sampled(motivating, basis_state(5, 0), rng, report=report)
        (sid, v), = tr.measurement_results
        counts[v] += 1
        assert (site.then_branch_id in tr.branches_taken) == (v == 5)
        assert (tr.crash is not None) == (v == 5)
        assert (report.exit_branch in tr.branches_taken) == (v != 5)
    # every value shows up; uniform expectation 100 each
    assert counts.min() > 50 and counts.max() < 150


def test_certain_crash():
    p = parse('procedure t(){ qureg q[5]; if (measure(q)==5) { print "crash"; int i=1/0; } print "safe"; }')
    tr = execute_sampled(p, basis_state(5, 5), np.random.default_rng(0))
    assert tr.crash.kind == "division-by-zero"
    assert tr.crash.span.line == 1
    assert tr.log == ["crash"]
    assert extract_sensitive(p).exit_branch not in tr.branches_taken


def test_then_frequency(motivating):
    cov = coverage(motivating, basis_state(5, 0), 10000, seed=77)
    assert cov.sensitive_hit_frequency[0] == pytest.approx(0.03125, abs=0.005)
    assert cov.crashes == round(cov.sensitive_hit_frequency[0] * 10000)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_sampling_consistency(seed):
    p = parse_file(PROGRAMS_DIR / "gates.qpl")
    s = site0(p)
    init = random_state(4, np.random.default_rng(seed))
    w = weight_analysis(p, init, s)
    n = 4000
    freq = coverage(p, init, n, seed).sensitive_hit_frequency[0]
    assert abs(freq - w) <= 3 * np.sqrt(w * (1 - w) / n) + 1e-12


def test_execution_deterministic(rng):
    p = parse_file(PROGRAMS_DIR / "two_sites.qpl")
    init = random_state(3, rng)
    a = execute_sampled(p, init, np.random.default_rng(5))
    b = execute_sampled(p, init, np.random.default_rng(5))
    assert a == b


def test_collapse_repeatable(rng):
    p = parse("procedure t(){ qureg q[3]; Mix(q); if (measure(q)==1) { } if (measure(q)==1) { } }")
    for seed in range(50):
        tr = execute_sampled(p, random_state(3, rng), np.random.default_rng(seed))
        assert tr.measurement_results[0][1] == tr.measurement_results[1][1]


def test_classical_semantics():
    p = parse("""procedure t(){ int a=0-7; int b=a/2; int c=7/(0-2); int m=9223372036854775807;
        int w=m+1; print "ok"; }""")
    tr = execute_sampled(p, None, np.random.default_rng(0))
    assert tr.crash is None
    assert tr.log == ["ok"]


def test_truncating_division_and_wraparound():
    assert _eval(BinOp("/", IntLit(-7), IntLit(2)), {}) == -3
    assert _eval(BinOp("/", IntLit(7), IntLit(-2)), {}) == -3
    assert _eval(BinOp("/", IntLit(-7), IntLit(-2)), {}) == 3
    big = 2**63 - 1
    assert _eval(BinOp("+", IntLit(big), IntLit(1)), {}) == -(2**63)
    assert _eval(BinOp("*", IntLit(big), IntLit(2)), {}) == -2


def test_division_by_variable_zero():
    p = parse_file(PROGRAMS_DIR / "gates.qpl")
    s = site0(p)
    # first basis input that reaches the target at all
    init = None
    for v in range(16):
        cand = basis_state(4, v)
        if weight_analysis(p, cand, s) > 0:
            init = cand
            break
    assert init is not None
    rep = coverage(p, init, 200, seed=3)
    assert rep.crashes > 0
    assert rep.crashes == round(rep.sensitive_hit_frequency[0] * 200)


def test_observer_order(motivating):
    seen = []
    execute_sampled(motivating, basis_state(5, 0), np.random.default_rng(0),
                    observer=lambda kind, span, payload: seen.append(kind))
    assert seen == [HookKind.INPUT_READ, HookKind.KET_TRANSFORM,
                    HookKind.KET_BEFORE_MEASURE, HookKind.MEASURE_RESULT]


def test_coverage_no_measurement():
    p = parse_file(PROGRAMS_DIR / "classical.qpl")
    rep = coverage(p, None, 1, seed=0)
    assert rep.coverage_ratio == 1.0
    assert [b.kind for b in rep.universe] == [BranchKind.PROGRAM_EXIT]


def test_coverage_default_input(motivating):
    # 10 trials at weight 1/32: then-branch hit chance 1 - (31/32)**10
    hits = else_hits = 0
    runs = 400
    s = site0(motivating)
    for seed in range(runs):
        rep = coverage(motivating, basis_state(5, 0), 10, seed)
        hits += s.then_branch_id in rep.covered
        else_hits += s.else_branch_id in rep.covered
    expected = 1 - (31 / 32) ** 10
    assert hits / runs == pytest.approx(expected, abs=3 * np.sqrt(expected * (1 - expected) / runs))
    assert else_hits == runs


def test_coverage_high_weight_input(motivating):
    # a state with weight 1/2 on value 5 before Mix
    s = site0(motivating)
    init = mix(basis_state(5, 5)).amps + mix(basis_state(5, 6)).amps
    init = StateVector.from_amplitudes(init / np.linalg.norm(init))
    assert weight_analysis(motivating, init, s) == pytest.approx(0.5, abs=1e-12)
    for seed in range(100):
        assert s.then_branch_id in coverage(motivating, init, 10, seed).covered


def test_coverage_trials_validation(motivating):
    with pytest.raises(ValueError):
        coverage(motivating, basis_state(5, 0), 0, seed=0)
