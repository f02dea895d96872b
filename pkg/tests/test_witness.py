"""
Unit tests for witnesses and report aggregation
"""

import numpy as np
import pytest

from src.dynamics import TimeGrid, propagate_commutative, propagate_ode, trajectory_from_maps
from src.exceptions import DimensionError
from src.linalg.bases import PAULI
from src.models.generators import amplitude_damping, custom_generator, dephasing_qubit, pauli_channel
from src.models.microscopic import perfect_decoherence, two_level_decoherence
from src.models.rates import closed_form
from src.witness import (
    WitnessRecord,
    WitnessReport,
    aggregate,
    body_descriptor,
    w_blp,
    w_body_containment,
    w_cp_divisibility,
    w_eigen_moduli,
    w_ew_functional,
    w_f_monotone,
    w_hs_norm,
    w_volume,
)
from src.witness.report import CP_ONLY, NO_DETECTION, monotone_record, record_from_margins


def all_records(traj, gen, seed=0, blp_samples=50, hs_samples=30):
    return [
        w_volume(traj, gen),
        w_eigen_moduli(traj, gen),
        w_f_monotone(traj),
        w_ew_functional(gen, traj.grid),
        w_blp(traj, samples=blp_samples, seed=seed),
        w_hs_norm(traj, samples=hs_samples, seed=seed),
        w_body_containment(traj),
        w_cp_divisibility(gen, traj.grid),
    ]


@pytest.fixture(scope="module")
def markovian():
    """Constant-rate qubit dephasing"""
    gen = dephasing_qubit(1.0)
    return gen, propagate_commutative(gen, TimeGrid.uniform(5.0, 101))


@pytest.fixture(scope="module")
def oscillating():
    """Qubit dephasing with gamma(t) = sin t, negative after t = pi"""
    gen = dephasing_qubit(closed_form("sin", 1.0, 1.0, 0.0))
    return gen, propagate_commutative(gen, TimeGrid.uniform(10.0, 201))


@pytest.fixture(scope="module")
def eternal():
    """Pauli channel with rates (1, 1, -tanh t)"""
    gen = pauli_channel(1.0, 1.0, closed_form("tanh", -1.0, 1.0, 0.0))
    return gen, propagate_commutative(gen, TimeGrid.uniform(5.0, 101))


def test_markovian_dephasing_is_clean(markovian):
    """Test every witness is monotone on constant-rate dephasing"""
    gen, traj = markovian
    records = all_records(traj, gen)
    for r in records:
        assert r.applicable, r.name
        assert r.verdict == "monotone", r.name
        assert r.first_violation_time is None

    report = aggregate(records, "markovian", traj.family, traj.dim, traj.route, seed=0)
    assert not report.any_violation
    assert report.summary.messages == [NO_DETECTION]
    assert report.summary.cp_divisible is True
    assert report.summary.p_divisibility_evidence is True
    assert report.record("volume").details["generator_trace"]["violated"] is False


def test_oscillating_dephasing_detected(oscillating):
    """Test the rate sign change at t = pi is flagged by every witness"""
    gen, traj = oscillating
    dt = traj.grid.spacing
    records = {r.name: r for r in all_records(traj, gen)}

    for name in ("volume", "eigen_moduli", "f_monotone", "hs_norm", "body_containment",
                 "ew_functional", "cp_divisibility"):
        assert records[name].violated, name
        assert abs(records[name].first_violation_time - np.pi) <= 2 * dt, name

    assert records["eigen_moduli"].details["analytic_rates"]["violated"]
    assert records["volume"].details["generator_trace"]["violated"]
    assert records["cp_divisibility"].details["cp_rate_conditions"]["violated"]

    report = aggregate(list(records.values()), "sin", traj.family, traj.dim, traj.route)
    assert report.summary.cp_divisible is False
    assert report.summary.p_divisibility_evidence is False
    assert report.summary.essentially_non_markovian_evidence
    assert any(m.startswith("P-divisibility violated") for m in report.summary.messages)
    assert NO_DETECTION not in report.summary.messages


def test_oscillating_violation_intervals(oscillating):
    """Test the eigenvalue modulus grows on (pi, 2 pi) only"""
    _, traj = oscillating
    record = w_f_monotone(traj)
    assert len(record.violation_intervals) >= 1
    first = record.violation_intervals[0]
    assert first.start == pytest.approx(np.pi, abs=0.1)
    assert first.end == pytest.approx(2 * np.pi, abs=0.1)


def test_eternal_pauli_cp_only(eternal):
    """Test CP-indivisible but P-divisible dynamics"""
    gen, traj = eternal
    records = {r.name: r for r in all_records(traj, gen)}

    cp = records["cp_divisibility"]
    assert cp.violated
    assert cp.first_violation_time == pytest.approx(traj.times[1])
    assert cp.details["cp_rate_conditions"]["violated"]
    assert not cp.details["p_rate_conditions"]["violated"]
    assert cp.details["p_rate_conditions"]["conditions"]

    for name in ("volume", "eigen_moduli", "f_monotone", "hs_norm", "blp", "body_containment"):
        assert records[name].verdict == "monotone", name
    assert "no violation found" in records["blp"].details["note"]

    report = aggregate(list(records.values()), "eternal", traj.family, traj.dim, traj.route)
    assert report.summary.cp_divisible is False
    assert report.summary.p_divisibility_evidence is True
    assert CP_ONLY in report.summary.messages
    assert "CP-divisibility violated (conditional complete positivity)" in report.summary.messages


def test_eternal_pauli_two_positivity_probe(eternal):
    """Test a correlated two-qubit probe whose trace norm grows after t = ln(1/0.3) / 2"""
    _, traj = eternal
    probe = 0.25 * (
        -0.3 * np.kron(np.eye(2), np.eye(2))
        + 0.6 * np.kron(PAULI["X"], PAULI["X"])
        + 0.6 * np.kron(PAULI["Y"], PAULI["Y"])
        + np.kron(PAULI["Z"], PAULI["Z"])
    )
    record = w_blp(traj, k=2, samples=0, probes=[probe])
    assert record.violated
    assert 0.55 <= record.first_violation_time <= 0.65
    assert record.details["order"] == 2
    assert record.details["probes"] == 1

    report = aggregate([record], "eternal", traj.family, traj.dim, traj.route)
    assert "k-divisibility violated (2-positivity)" in report.summary.messages
    assert report.summary.p_divisibility_evidence is None


def test_eternal_pauli_sampled_two_positivity(eternal):
    """Test random samples on C^2 (x) C^2 find the CP-indivisibility"""
    _, traj = eternal
    record = w_blp(traj, k=2, samples=200, seed=0)
    assert record.violated
    assert record.details["probes"] == 0
    assert record.details["note"].startswith("violation found in")

    report = aggregate([record], "eternal", traj.family, traj.dim, traj.route, seed=0)
    assert "k-divisibility violated (2-positivity)" in report.summary.messages
    assert not report.summary.essentially_non_markovian_evidence


def test_blp_seed_is_reproducible(eternal):
    """Test identical seeds give identical series"""
    _, traj = eternal
    a = w_blp(traj, samples=20, seed=5)
    b = w_blp(traj, samples=20, seed=5)
    assert a.series == b.series


def test_blp_order_checked(markovian):
    """Test k outside 1..d is rejected"""
    _, traj = markovian
    with pytest.raises(DimensionError):
        w_blp(traj, k=3)
    with pytest.raises(DimensionError):
        w_blp(traj, k=0)


def test_empty_samples_inapplicable(markovian):
    """Test zero samples give an inapplicable record"""
    _, traj = markovian
    assert not w_blp(traj, samples=0).applicable
    assert not w_hs_norm(traj, samples=0).applicable


def test_hs_norm_identity_residual(markovian):
    """Test |X|_2^2 = d |x_0|^2 + |Delta x|^2 holds along the trajectory"""
    _, traj = markovian
    record = w_hs_norm(traj, samples=40, seed=3)
    assert record.details["bloch_identity_residual"] < 1e-10


def test_hs_norm_needs_unital():
    """Test amplitude damping is out of scope for the norm witness"""
    model = amplitude_damping(lambda t: np.exp(-0.5 * t), lambda t: -0.5 * np.exp(-0.5 * t))
    traj = trajectory_from_maps(model.maps, TimeGrid.uniform(3.0, 31), model.generator)
    record = w_hs_norm(traj)
    assert not record.applicable
    assert "unital" in record.reason


def test_complex_spectrum_inapplicable():
    """Test f(t) needs a real spectrum and containment falls back to normal mode"""
    model = two_level_decoherence(0.4, eps=(0.0, 1.0))
    traj = trajectory_from_maps(perfect_decoherence(model), TimeGrid.uniform(5.0, 101))

    f_record = w_f_monotone(traj)
    assert not f_record.applicable
    assert "not real" in f_record.reason

    body = w_body_containment(traj)
    assert body.applicable
    assert body.details["mode"] == "normal, up to rotation"
    # |cos(0.8 t)| turns around at t = pi / 1.6
    assert body.violated
    assert body.first_violation_time == pytest.approx(np.pi / 1.6, abs=0.1)

    assert not w_cp_divisibility(None, traj.grid).applicable


def test_non_commutative_inapplicable():
    """Test spectral witnesses need commutative dynamics"""
    def hook(t):
        h = np.cos(t) * PAULI["Z"] + np.sin(t) * PAULI["X"]
        return -1j * (np.kron(h, np.eye(2)) - np.kron(np.eye(2), h.T))

    traj = propagate_ode(custom_generator(2, hook), TimeGrid.uniform(2.0, 21))
    for witness in (w_eigen_moduli, w_f_monotone, w_body_containment):
        record = witness(traj)
        assert not record.applicable
        assert "not commutative" in record.reason
    assert w_volume(traj).applicable


def test_body_descriptor(markovian):
    """Test the body centre and semi-axes at a grid time"""
    _, traj = markovian
    body = body_descriptor(traj, 20)
    np.testing.assert_allclose(body.center, 0.0, atol=1e-12)
    np.testing.assert_allclose(np.sort(body.semi_axes), np.sort([np.exp(-1.0)] * 2 + [1.0]), atol=1e-10)
    assert body.axes is not None


def test_ew_functional_violation_is_p_level(oscillating):
    """Test a positive generator functional means growing volume, not only CP-indivisibility"""
    gen, traj = oscillating
    record = w_ew_functional(gen, traj.grid)
    assert record.violated

    report = aggregate([record], "sin", traj.family, traj.dim, traj.route)
    assert report.summary.essentially_non_markovian_evidence
    assert report.summary.p_divisibility_evidence is False
    assert report.summary.cp_divisible is None
    assert CP_ONLY not in report.summary.messages
    assert "P-divisibility violated (entanglement-witness functional)" in report.summary.messages


def test_eigen_moduli_violation_implies_cp_violation(oscillating):
    """Test every growing-modulus interval overlaps a CP-indivisible interval"""
    gen, traj = oscillating
    dt = traj.grid.spacing
    moduli = w_eigen_moduli(traj, gen)
    cp = w_cp_divisibility(gen, traj.grid)
    assert moduli.violated and cp.violated

    for interval in moduli.violation_intervals:
        assert any(
            c.start <= interval.end + dt and interval.start <= c.end + dt
            for c in cp.violation_intervals
        ), (interval.start, interval.end)


def test_record_from_margins_intervals():
    """Test consecutive violated entries merge into intervals"""
    starts = np.arange(5.0)
    margins = np.array([-1.0, 0.5, 0.2, np.nan, 0.3])
    record = record_from_margins("x", starts, starts + 1.0, margins)
    assert record.verdict == "violated"
    assert record.first_violation_time == 1.0
    assert record.worst_margin == 0.5
    assert [(i.start, i.end) for i in record.violation_intervals] == [(1.0, 3.0), (4.0, 5.0)]


def test_monotone_record_tolerance():
    """Test growth below tol * max(1, |values|) is ignored"""
    times = np.array([0.0, 1.0, 2.0])
    assert monotone_record("x", times, np.array([1.0, 1.0 + 5e-10, 0.9]), 1e-9).verdict == "monotone"
    record = monotone_record("x", times, np.array([1.0, 1.0 + 5e-9, 0.9]), 1e-9)
    assert record.verdict == "violated"
    assert record.first_violation_time == 0.0

    undefined = monotone_record("x", times, np.array([1.0, np.nan, 0.9]), 1e-9)
    assert undefined.verdict == "monotone"
    assert undefined.undefined_times == [1.0]
    assert undefined.series[1] is None


def test_aggregate_orders_records():
    """Test records come out in the fixed witness order"""
    records = [
        WitnessRecord(name="cp_divisibility", applicable=True, verdict="monotone"),
        WitnessRecord(name="volume", applicable=True, verdict="monotone"),
        WitnessRecord(name="blp", applicable=False, reason="skipped"),
    ]
    report = aggregate(records, "s", "f", 2, "maps")
    assert [r.name for r in report.records] == ["volume", "blp", "cp_divisibility"]
    assert report.summary.messages == [NO_DETECTION]
    with pytest.raises(KeyError):
        report.record("hs_norm")


def test_report_json_roundtrip(oscillating):
    """Test the report survives JSON serialization"""
    gen, traj = oscillating
    report = aggregate(all_records(traj, gen, seed=2), "sin", traj.family, traj.dim, traj.route, seed=2)
    restored = WitnessReport.model_validate_json(report.to_json())
    assert restored.model_dump() == report.model_dump()
    assert report.to_json() == restored.to_json()
