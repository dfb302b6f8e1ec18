"""Numerically exact oscillation frequency of the conservative problem.

Two independent routes provide the ground truth against which approximate
frequencies are judged:

* energy integral: for a well V with V(A) > V(u) on [0, A) the quarter
  period is  integral_0^A du / sqrt(2 (V(A) - V(u))).  Substituting
  u = A sin(theta) and factoring V(A) - V(u) = (A - u) S(u) removes the
  endpoint singularity analytically, so Gauss-Legendre quadrature with a
  node-doubling schedule converges to near machine precision;
* time integration: an adaptive high-order Runge-Kutta scheme run from
  (u, u') = (A, 0) until the first zero crossing of u, which for odd f is
  a quarter period by symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp

from .models import OscillatorProblem, effective_omega0, total_potential

QUAD_START_NODES = 16
QUAD_MAX_NODES = 1024
QUAD_REL_TOL = 1e-13
ODE_TOL = 1e-12
ODE_PERIOD_BUDGET = 100.0


class NonOscillatoryError(ValueError):
    """The potential does not confine a well of oscillation up to A."""


class DivergenceError(RuntimeError):
    """Time integration found no zero crossing within the time budget."""


class QuadratureConvergenceError(RuntimeError):
    """Node doubling did not converge within the node budget."""


@dataclass(frozen=True)
class ExactResult:
    period: float
    frequency: float
    method: str
    est_error: float


def _well_slope(problem: OscillatorProblem):
    """S with V(A) - V(u) = (A - u) S(u), evaluated without cancellation.

    Term-wise, A^p - u^p = (A - u) (A^{p-1} + A^{p-2} u + ... + u^{p-1}).
    """
    coeffs = total_potential(problem).coefficients
    amplitude = problem.amplitude

    def slope(u):
        total = np.zeros_like(np.asarray(u, dtype=float))
        for p, c in coeffs.items():
            if p == 0:
                continue
            inner = np.zeros_like(total)
            for j in range(p):
                inner += amplitude**j * np.asarray(u, dtype=float) ** (p - 1 - j)
            total += c * inner
        return total

    return slope


def _check_oscillatory(problem: OscillatorProblem, samples: int = 512):
    """V(A) must strictly dominate V(u) on [0, A)."""
    slope = _well_slope(problem)
    u = np.linspace(0.0, problem.amplitude, samples + 1)[:-1]
    if np.any(slope(u) <= 0.0):
        raise NonOscillatoryError(
            "V(A) does not dominate V(u) on [0, A); the configuration "
            "does not oscillate with this amplitude"
        )
    return slope


def exact_period_quadrature(problem: OscillatorProblem) -> ExactResult:
    """Energy-integral period with a node-doubling convergence schedule."""
    slope = _check_oscillatory(problem)
    amplitude = problem.amplitude
    previous = None
    nodes = QUAD_START_NODES
    while nodes <= QUAD_MAX_NODES:
        x, weights = leggauss(nodes)
        theta = (x + 1.0) * (math.pi / 4.0)
        sin_theta = np.sin(theta)
        s_vals = slope(amplitude * sin_theta)
        if np.any(s_vals <= 0.0):
            raise NonOscillatoryError(
                "well slope non-positive at a quadrature node"
            )
        integrand = amplitude * np.sqrt(
            (1.0 + sin_theta) / (2.0 * amplitude * s_vals)
        )
        period = 4.0 * (math.pi / 4.0) * float(weights @ integrand)
        if previous is not None:
            delta = abs(period - previous)
            if delta < QUAD_REL_TOL * abs(period):
                return ExactResult(
                    period=period,
                    frequency=2.0 * math.pi / period,
                    method="quadrature",
                    est_error=delta / abs(period),
                )
        previous = period
        nodes *= 2
    raise QuadratureConvergenceError(
        f"period quadrature did not converge within {QUAD_MAX_NODES} nodes"
    )


def _time_scale(problem: OscillatorProblem) -> float:
    w_eff = effective_omega0(problem)
    if w_eff > 0.0:
        return w_eff
    # No usable linearised frequency (for example a pure quintic well):
    # fall back to the energy scale of the well itself.
    depth = total_potential(problem)(problem.amplitude)
    if depth <= 0.0:
        raise NonOscillatoryError("potential well has no positive depth at A")
    return math.sqrt(2.0 * depth) / problem.amplitude


def _rhs(problem: OscillatorProblem):
    def rhs(_t, y):
        return (y[1], problem.acceleration(y[0]))

    return rhs


def exact_period_ode(problem: OscillatorProblem) -> ExactResult:
    """Event-detected quarter period from adaptive time integration.

    The reported error estimate is the relative energy drift over one full
    period, re-integrated at the same tolerances.
    """
    _check_oscillatory(problem)
    amplitude = problem.amplitude
    t_max = ODE_PERIOD_BUDGET * 2.0 * math.pi / _time_scale(problem)

    def crossing(_t, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = -1.0

    solution = solve_ivp(
        _rhs(problem),
        (0.0, t_max),
        [amplitude, 0.0],
        method="DOP853",
        rtol=ODE_TOL,
        atol=ODE_TOL,
        events=crossing,
    )
    if not solution.t_events[0].size:
        raise DivergenceError(
            f"no zero crossing of u within {ODE_PERIOD_BUDGET} linearised periods"
        )
    period = 4.0 * float(solution.t_events[0][0])

    potential_poly = total_potential(problem)

    def energy(u, v):
        return 0.5 * v * v + potential_poly(u)

    full = solve_ivp(
        _rhs(problem),
        (0.0, period),
        [amplitude, 0.0],
        method="DOP853",
        rtol=ODE_TOL,
        atol=ODE_TOL,
    )
    e0 = energy(amplitude, 0.0)
    e1 = energy(full.y[0, -1], full.y[1, -1])
    drift = abs(e1 - e0) / abs(e0)
    return ExactResult(
        period=period,
        frequency=2.0 * math.pi / period,
        method="ode-event",
        est_error=drift,
    )


def trajectory(problem: OscillatorProblem, times) -> np.ndarray:
    """Displacement samples u(t) from the same integrator settings."""
    times = np.asarray(times, dtype=float)
    solution = solve_ivp(
        _rhs(problem),
        (0.0, float(times[-1])),
        [problem.amplitude, 0.0],
        method="DOP853",
        rtol=ODE_TOL,
        atol=ODE_TOL,
        t_eval=times,
    )
    return solution.y[0]
