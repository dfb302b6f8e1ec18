"""First-order homotopy hierarchy for odd nonlinear oscillators.

The original equation is deformed with an embedding parameter p:

    u'' + w^2 u + p [eps f(u) + (w0^2 - w^2) u] = 0

At p^0 the solution satisfying the initial conditions is u0 = A cos(w t).
Collecting p^1 gives a forced linear equation for the first correction u1:

    u1'' + w^2 u1 + eps f(u0) + (w0^2 - w^2) u0 = 0,   u1(0) = u1'(0) = 0.

Only orders 0 and 1 are materialised; nothing beyond u1 is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fourier import FrequencyMismatchError, TrigSeries
from .models import OscillatorProblem


def order0_solution(problem: OscillatorProblem, omega: float) -> TrigSeries:
    """A cos(w t): satisfies u(0) = A, u'(0) = 0 by construction."""
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    return TrigSeries.cosine(omega, 1, problem.amplitude)


def order1_forcing(problem: OscillatorProblem, omega: float) -> TrigSeries:
    """Inhomogeneous part of the first-order equation, expanded in harmonics.

    For odd polynomial f this contains only odd cosine harmonics; its
    fundamental component vanishes exactly at the resonance-balance
    frequency.
    """
    u0 = order0_solution(problem, omega)
    nonlinear = problem.nonlinearity.of_series(u0)
    return problem.epsilon * nonlinear + (problem.omega0_sq - omega * omega) * u0


@dataclass(frozen=True)
class HomotopyHierarchy:
    """Orders 0 and 1 of the deformation at an assumed base frequency."""

    problem: OscillatorProblem
    omega: float
    order0: TrigSeries
    forcing1: TrigSeries

    @classmethod
    def build(cls, problem: OscillatorProblem, omega: float) -> "HomotopyHierarchy":
        return cls(
            problem=problem,
            omega=float(omega),
            order0=order0_solution(problem, omega),
            forcing1=order1_forcing(problem, omega),
        )


def order1_residual(hierarchy: HomotopyHierarchy, u1: TrigSeries) -> TrigSeries:
    """u1'' + w^2 u1 + forcing; the zero series iff u1 solves order one exactly."""
    if u1.base_freq != hierarchy.omega:
        raise FrequencyMismatchError(
            f"u1 base frequency {u1.base_freq} != hierarchy omega {hierarchy.omega}"
        )
    second = u1.differentiate().differentiate()
    return second + hierarchy.omega**2 * u1 + hierarchy.forcing1


def deformed_residual(
    problem: OscillatorProblem, u: TrigSeries, pbar: float, omega: float
) -> TrigSeries:
    """Residual of the deformed equation at embedding value ``pbar``.

    At pbar = 0 the order-0 solution is exact; at pbar = 1 this is the
    residual of the original equation, which no finite series annihilates
    once the nonlinearity is switched on.
    """
    if not 0.0 <= pbar <= 1.0:
        raise ValueError(f"embedding parameter must lie in [0, 1], got {pbar}")
    second = u.differentiate().differentiate()
    linear = second + omega * omega * u
    if pbar == 0.0:
        return linear
    nonlinear = problem.epsilon * problem.nonlinearity.of_series(u)
    shift = (problem.omega0_sq - omega * omega) * u
    return linear + pbar * (nonlinear + shift)


def residual_norms(residual: TrigSeries) -> tuple[float, float]:
    """(max-abs harmonic coefficient, L2 norm over one period)."""
    return residual.max_abs_coeff(), residual.l2_norm_over_period()
