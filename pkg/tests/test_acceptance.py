"""Acceptance gate: one test per numbered criterion, at stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion; a failed assertion surfaces as the usual pytest failure.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from oscaudit.fourier import TrigSeries
from oscaudit.models import duffing
from oscaudit.hpm import order1_forcing
from oscaudit.action import (
    assemble,
    double_shape_space,
    single_shape_space,
    solve_B,
    solve_stationary,
)
from oscaudit.audit import (
    full_audit,
    resonance_frequency,
    two_shape_coefficients,
    two_shape_frequency,
)
from oscaudit.oracle import exact_period_ode, exact_period_quadrature

from conftest import gauss_integral, random_series_maps, series_evaluator

EPS_GRID = (0.1, 1.0, 10.0)
A_GRID = (0.5, 1.0, 2.0)

# pinned from the exact-period oracle (quadrature, cross-checked by the
# adaptive integrator); see test_oracle for the independent confirmations
OMEGA_EXACT_UNIT_CUBIC = 1.3177760649655266
REL_ERR_SINGLE_PINNED = 0.003869846100826086
REL_ERR_DOUBLE_PINNED = 0.004766556580684372


def _passed(number, detail):
    print(f"ACCEPTANCE {number:02d} PASS: {detail}")


@pytest.fixture(scope="module")
def single_space_audits():
    return {
        (eps, amplitude): full_audit(duffing(amplitude, eps), single_shape_space())
        for eps in EPS_GRID
        for amplitude in A_GRID
    }


def test_criterion_01_single_shape_reproduces_trivial_branch():
    for eps in EPS_GRID:
        for amplitude in A_GRID:
            points = solve_stationary(duffing(amplitude, eps), single_shape_space())
            reference = math.sqrt(1.0 + 0.75 * eps * amplitude**2)
            matching = [
                p
                for p in points
                if np.max(np.abs(p.amplitudes), initial=0.0) <= 1e-10 * amplitude
                and abs(p.omega - reference) <= 1e-10 * p.omega
            ]
            assert matching, (eps, amplitude, [(p.omega, p.amplitudes) for p in points])
    _passed(1, "single-shape branch has B = 0 and the resonance-balance frequency")


def test_criterion_02_double_shape_amplitudes_cross_validate():
    omega = two_shape_frequency(1.0)
    form = assemble(duffing(1.0, 1.0), double_shape_space(), omega)
    solved = solve_B(form)
    closed = two_shape_coefficients(1.0, 1.0, omega)
    for got, want in zip(solved, closed):
        assert abs(got - want) <= 1e-8 * abs(want), (solved, closed)
    _passed(2, "solver amplitudes match the closed forms at the radical frequency")


def test_criterion_03_double_shape_frequency_cross_validates():
    report = full_audit(duffing(1.0, 1.0), double_shape_space())
    closed = two_shape_frequency(1.0)
    deviation = abs(report.selected.omega - closed)
    within = deviation <= 1e-6 * report.selected.omega
    if not within:
        # excess deviation is acceptable only as a documented finding
        # carrying both frequencies
        mismatches = [
            f for f in report.findings if f.code == "CLOSED_FORM_MISMATCH"
        ]
        assert mismatches, (report.selected.omega, closed)
        assert any(
            "omega_solver" in f.data and "omega_closed_form" in f.data
            for f in mismatches
        )
    _passed(3, f"solver vs closed-form frequency deviation {deviation:.3e}")


def test_criterion_04_boundary_violation_reproduced():
    report = full_audit(duffing(1.0, 1.0), double_shape_space())
    omega = report.selected.omega
    rho = report.rho
    expected = -1.0 * (68.0 * omega**2 - 49.0 * rho - 68.0) / (16.0 * omega**2)
    assert abs(report.bc_u1_at_0 - expected) <= 1e-10 * abs(expected)
    assert abs(report.bc_u1_at_0) > 1e-10 * 1.0  # nonzero for eps > 0
    _passed(4, f"u1(0) = {report.bc_u1_at_0:.6e} equals the closed-form residual")


def test_criterion_05_amplitude_mismatch_identity(single_space_audits):
    reports = list(single_space_audits.values()) + [
        full_audit(duffing(1.0, 1.0), double_shape_space()),
        full_audit(duffing(1.0, 0.0), single_shape_space()),
    ]
    for report in reports:
        assert report.amplitude_mismatch == report.bc_u1_at_0
    _passed(5, "amplitude_mismatch is bit-for-bit u1(0) in every audit")


def test_criterion_06_trivial_correction_found_on_grid(single_space_audits):
    for (eps, amplitude), report in single_space_audits.items():
        assert "TRIVIAL_CORRECTION" in report.finding_codes(), (eps, amplitude)
        assert report.trivial is True
    _passed(6, "single-shape audit flags TRIVIAL_CORRECTION for all (eps, A)")


def test_criterion_07_oracle_integrity():
    for eps in EPS_GRID:
        for amplitude in A_GRID:
            problem = duffing(amplitude, eps)
            quad = exact_period_quadrature(problem)
            ode = exact_period_ode(problem)
            assert abs(quad.period - ode.period) <= 1e-8 * quad.period
            assert ode.est_error <= 1e-8
    linear = exact_period_quadrature(duffing(1.0, 0.0))
    assert abs(linear.frequency - 1.0) <= 1e-12
    scaled = exact_period_quadrature(duffing(0.5, 4.0)).frequency
    unit = exact_period_quadrature(duffing(1.0, 1.0)).frequency
    assert abs(scaled - unit) <= 1e-10 * unit
    _passed(7, "quadrature/ODE agreement, energy drift, linear limit, scaling")


def test_criterion_08_accuracy_context():
    exact = exact_period_quadrature(duffing(1.0, 1.0)).frequency
    assert exact == pytest.approx(OMEGA_EXACT_UNIT_CUBIC, abs=1e-10)
    rel_single = abs(resonance_frequency(duffing(1.0, 1.0)) - exact) / exact
    rel_double = abs(two_shape_frequency(1.0) - exact) / exact
    assert rel_single < 0.01
    assert rel_double < 0.01
    assert rel_single == pytest.approx(REL_ERR_SINGLE_PINNED, abs=1e-9)
    assert rel_double == pytest.approx(REL_ERR_DOUBLE_PINNED, abs=1e-9)
    _passed(
        8,
        f"rel errors vs exact: single {rel_single:.4%}, double {rel_double:.4%} (< 1%)",
    )


def test_criterion_09_algebra_property_suite():
    w = 1.3
    # orthogonality
    for k in range(1, 13):
        for m in range(1, 13):
            value = (
                TrigSeries.cosine(w, k) * TrigSeries.cosine(w, m)
            ).integrate_over_period()
            expected = math.pi / w if k == m else 0.0
            assert abs(value - expected) <= 1e-14
    # evaluation homomorphism
    rng = np.random.default_rng(2718)
    a = TrigSeries(w, *random_series_maps(rng))
    b = TrigSeries(w, *random_series_maps(rng))
    product = a * b
    for t in rng.uniform(0.0, 2 * math.pi / w, size=32):
        direct = a.evaluate(t) * b.evaluate(t)
        assert abs(product.evaluate(t) - direct) <= 1e-12 * (1.0 + abs(direct))
    # derivative finite-difference convergence
    series = TrigSeries(w, *random_series_maps(rng, max_harmonic=6))
    derivative = series.differentiate()
    times = rng.uniform(0.0, 4.0, size=12)

    def worst(h):
        return max(
            abs(
                (series.evaluate(t + h) - series.evaluate(t - h)) / (2 * h)
                - derivative.evaluate(t)
            )
            for t in times
        )

    ratio = worst(1e-3) / worst(5e-4)
    assert 3.5 < ratio < 4.5
    # assemble vs quadrature, and symmetry
    for _ in range(3):
        omega = rng.uniform(0.5, 3.0)
        problem = duffing(rng.uniform(0.5, 2.0), rng.uniform(0.0, 10.0))
        space = double_shape_space()
        form = assemble(problem, space, omega)
        assert np.array_equal(form.matrix, form.matrix.T)
        period = 2.0 * math.pi / omega
        for i, shape_i in enumerate(space.shapes):
            phi_i = series_evaluator(omega, shape_i)

            def forcing(t):
                u0 = problem.amplitude * math.cos(omega * t)
                return problem.epsilon * problem.nonlinearity(u0) + (
                    problem.omega0_sq - omega**2
                ) * u0

            g_ref = gauss_integral(lambda t: forcing(t) * phi_i(t), 0.0, period)
            assert abs(form.vector[i] - g_ref) <= 1e-12 * (1.0 + abs(g_ref))
            for j, shape_j in enumerate(space.shapes):
                phi_j = series_evaluator(omega, shape_j)

                def dphi(shape):
                    return lambda t: sum(
                        -c * k * omega * math.sin(k * omega * t)
                        for k, c in shape.items()
                    )

                m_ref = gauss_integral(
                    lambda t: -dphi(shape_i)(t) * dphi(shape_j)(t)
                    + omega**2 * phi_i(t) * phi_j(t),
                    0.0,
                    period,
                )
                assert abs(form.matrix[i, j] - m_ref) <= 1e-12 * (1.0 + abs(m_ref))
    _passed(9, "orthogonality, homomorphism, derivative order, assembly, symmetry")


def test_criterion_10_closed_form_limits():
    assert abs(two_shape_frequency(0.0) - 1.0) <= 1e-15
    for problem in (duffing(1.0, 1.0), duffing(2.0, 0.1), duffing(0.5, 10.0)):
        def fundamental(w):
            return order1_forcing(problem, w).cos_coeff(1)

        root = brentq(fundamental, 0.25, 8.0, xtol=1e-15, rtol=8.9e-16)
        assert abs(resonance_frequency(problem) - root) <= 1e-12 * root
    _passed(10, "radical limit at rho = 0 and resonance-elimination equivalence")
