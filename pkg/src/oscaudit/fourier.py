"""Finite trigonometric polynomials over a single base frequency.

A series is a finite sum

    c_0 + sum_{k>=1} c_k cos(k w t) + sum_{k>=1} s_k sin(k w t)

with integer harmonic indices and double-precision coefficients. Products
are expanded exactly through the product-to-sum identities, so the algebra
is closed and period integrals reduce to coefficient arithmetic. Absent
harmonics are semantically zero; coefficients that are exactly 0.0 are not
stored. Instances are treated as immutable values.
"""

from __future__ import annotations

import math

#: Largest harmonic index any operation will accept or produce. Exceeding
#: it raises instead of silently truncating.
MAX_HARMONIC = 64


class FrequencyMismatchError(ValueError):
    """Series defined on different base frequencies cannot be combined."""


class HarmonicRangeError(ValueError):
    """Harmonic index outside the supported range [0, MAX_HARMONIC]."""


def _cleaned(coeffs, lowest, label):
    out = {}
    for k, v in coeffs.items():
        if k != int(k):
            raise ValueError(f"{label} harmonic index must be an integer, got {k!r}")
        k = int(k)
        if k < lowest or k > MAX_HARMONIC:
            raise HarmonicRangeError(
                f"{label} harmonic {k} outside [{lowest}, {MAX_HARMONIC}]"
            )
        v = float(v)
        if v != 0.0:
            out[k] = v
    return out


class TrigSeries:
    """Finite Fourier polynomial on the base angular frequency ``base_freq``."""

    __slots__ = ("base_freq", "cos_coeffs", "sin_coeffs")

    def __init__(self, base_freq, cos_coeffs=None, sin_coeffs=None):
        if not base_freq > 0.0:
            raise ValueError(f"base frequency must be positive, got {base_freq}")
        self.base_freq = float(base_freq)
        self.cos_coeffs = _cleaned(cos_coeffs or {}, 0, "cosine")
        self.sin_coeffs = _cleaned(sin_coeffs or {}, 1, "sine")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, base_freq):
        return cls(base_freq)

    @classmethod
    def constant(cls, base_freq, value):
        return cls(base_freq, {0: value})

    @classmethod
    def cosine(cls, base_freq, harmonic=1, amplitude=1.0):
        return cls(base_freq, {harmonic: amplitude})

    @classmethod
    def sine(cls, base_freq, harmonic=1, amplitude=1.0):
        return cls(base_freq, sin_coeffs={harmonic: amplitude})

    # -- basic accessors ---------------------------------------------------

    @property
    def period(self):
        return 2.0 * math.pi / self.base_freq

    @property
    def max_harmonic(self):
        indices = list(self.cos_coeffs) + list(self.sin_coeffs)
        return max(indices) if indices else 0

    def cos_coeff(self, harmonic):
        return self.cos_coeffs.get(harmonic, 0.0)

    def sin_coeff(self, harmonic):
        return self.sin_coeffs.get(harmonic, 0.0)

    def _require_same_freq(self, other):
        if self.base_freq != other.base_freq:
            raise FrequencyMismatchError(
                f"base frequencies differ: {self.base_freq} vs {other.base_freq}"
            )

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TrigSeries):
            return NotImplemented
        self._require_same_freq(other)
        cos = dict(self.cos_coeffs)
        for k, v in other.cos_coeffs.items():
            cos[k] = cos.get(k, 0.0) + v
        sin = dict(self.sin_coeffs)
        for k, v in other.sin_coeffs.items():
            sin[k] = sin.get(k, 0.0) + v
        return TrigSeries(self.base_freq, cos, sin)

    def __sub__(self, other):
        if not isinstance(other, TrigSeries):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def scale(self, factor):
        factor = float(factor)
        return TrigSeries(
            self.base_freq,
            {k: factor * v for k, v in self.cos_coeffs.items()},
            {k: factor * v for k, v in self.sin_coeffs.items()},
        )

    def __mul__(self, other):
        if isinstance(other, TrigSeries):
            return self._product(other)
        if isinstance(other, (int, float)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(other)
        return NotImplemented

    def _product(self, other):
        """Exact product via the product-to-sum identities."""
        self._require_same_freq(other)
        top = self.max_harmonic + other.max_harmonic
        if top > MAX_HARMONIC:
            raise HarmonicRangeError(
                f"product would reach harmonic {top} > {MAX_HARMONIC}"
            )
        cos, sin = {}, {}

        def bump(table, k, v):
            table[k] = table.get(k, 0.0) + v

        for k, a in self.cos_coeffs.items():
            for m, b in other.cos_coeffs.items():
                half = 0.5 * a * b
                bump(cos, k + m, half)
                bump(cos, abs(k - m), half)
            for m, b in other.sin_coeffs.items():
                # cos(k)sin(m) = [sin(k+m) - sin(k-m)] / 2
                half = 0.5 * a * b
                bump(sin, k + m, half)
                d = k - m
                if d > 0:
                    bump(sin, d, -half)
                elif d < 0:
                    bump(sin, -d, half)
        for k, a in self.sin_coeffs.items():
            for m, b in other.cos_coeffs.items():
                # sin(k)cos(m) = [sin(k+m) + sin(k-m)] / 2
                half = 0.5 * a * b
                bump(sin, k + m, half)
                d = k - m
                if d > 0:
                    bump(sin, d, half)
                elif d < 0:
                    bump(sin, -d, -half)
            for m, b in other.sin_coeffs.items():
                # sin(k)sin(m) = [cos(k-m) - cos(k+m)] / 2
                half = 0.5 * a * b
                bump(cos, abs(k - m), half)
                bump(cos, k + m, -half)
        return TrigSeries(self.base_freq, cos, sin)

    def power(self, exponent):
        """Repeated product; ``power(0)`` is the constant 1."""
        if exponent != int(exponent) or exponent < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {exponent}")
        result = TrigSeries.constant(self.base_freq, 1.0)
        for _ in range(int(exponent)):
            result = result * self
        return result

    # -- calculus ----------------------------------------------------------

    def differentiate(self):
        """Time derivative; the constant term drops out."""
        w = self.base_freq
        cos = {k: v * k * w for k, v in self.sin_coeffs.items()}
        sin = {k: -v * k * w for k, v in self.cos_coeffs.items() if k > 0}
        return TrigSeries(w, cos, sin)

    def integrate_over_period(self):
        """Integral over [0, T]; every k >= 1 harmonic averages to zero."""
        return self.period * self.cos_coeffs.get(0, 0.0)

    def definite_integral(self, t0, t1):
        """Integral over an arbitrary interval [t0, t1]."""
        w = self.base_freq
        total = self.cos_coeffs.get(0, 0.0) * (t1 - t0)
        for k, v in self.cos_coeffs.items():
            if k > 0:
                total += v * (math.sin(k * w * t1) - math.sin(k * w * t0)) / (k * w)
        for k, v in self.sin_coeffs.items():
            total += v * (math.cos(k * w * t0) - math.cos(k * w * t1)) / (k * w)
        return total

    def inner_product(self, other):
        """Closed form of ``integral_0^T self * other dt`` (Parseval)."""
        self._require_same_freq(other)
        total = self.cos_coeffs.get(0, 0.0) * other.cos_coeffs.get(0, 0.0)
        acc = 0.0
        for k, v in self.cos_coeffs.items():
            if k > 0:
                b = other.cos_coeffs.get(k)
                if b is not None:
                    acc += v * b
        for k, v in self.sin_coeffs.items():
            b = other.sin_coeffs.get(k)
            if b is not None:
                acc += v * b
        return self.period * (total + 0.5 * acc)

    # -- evaluation and norms ------------------------------------------------

    def evaluate(self, t):
        wt = self.base_freq * t
        value = 0.0
        for k, v in self.cos_coeffs.items():
            value += v * math.cos(k * wt)
        for k, v in self.sin_coeffs.items():
            value += v * math.sin(k * wt)
        return value

    def max_abs_coeff(self):
        values = [abs(v) for v in self.cos_coeffs.values()]
        values += [abs(v) for v in self.sin_coeffs.values()]
        return max(values) if values else 0.0

    def l2_norm_over_period(self):
        return math.sqrt(max(self.inner_product(self), 0.0))

    def prune(self, threshold):
        """Drop stored harmonics with |coefficient| below ``threshold``.

        Pruning is opt-in; the default representation keeps every nonzero
        coefficient so that no term is lost silently.
        """
        if threshold < 0:
            raise ValueError("prune threshold must be non-negative")
        return TrigSeries(
            self.base_freq,
            {k: v for k, v in self.cos_coeffs.items() if abs(v) >= threshold},
            {k: v for k, v in self.sin_coeffs.items() if abs(v) >= threshold},
        )

    # -- misc ----------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TrigSeries):
            return NotImplemented
        return (
            self.base_freq == other.base_freq
            and self.cos_coeffs == other.cos_coeffs
            and self.sin_coeffs == other.sin_coeffs
        )

    def __hash__(self):
        return hash(
            (
                self.base_freq,
                tuple(sorted(self.cos_coeffs.items())),
                tuple(sorted(self.sin_coeffs.items())),
            )
        )

    def __repr__(self):
        return (
            f"TrigSeries(base_freq={self.base_freq!r}, "
            f"cos={self.cos_coeffs!r}, sin={self.sin_coeffs!r})"
        )
