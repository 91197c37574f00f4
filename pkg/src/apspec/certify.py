"""Certified sup-norm brackets and lower-bound certificates.

The upper bounds are rigorous (up to documented floating-point cushions):
each rational ray of the spectrum is periodic after rescaling, so a dense
FFT scan over one period plus a Bernstein-type step inflation bounds its
sup; the triangle inequality sums the rays.  Lower bounds come from direct
evaluation on a finite window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from apspec.errors import NonConvergence
from apspec.frequency import ExactFrequency, rational_ratio
from apspec.trigpoly import DenseBlock, ProductPoly, TrigPoly, spectrum

EF = ExactFrequency

# multiplicative cushion applied to certified upper bounds to absorb the
# last-ulp effects of FFT evaluation; scans use ~1e-15-accurate values
FP_CUSHION = 1.0 + 1e-12

MAX_GRID_POINTS = 1 << 23


@dataclass(frozen=True)
class NormBracket:
    """Two-sided bracket: lower <= sup|f| <= upper."""

    lower: float
    upper: float


def integer_lattice_sup(keys: np.ndarray, coeffs: np.ndarray, rel_gap: float = 1.0 / 16) -> NormBracket:
    """Certified sup of t -> sum c_k exp(i k t) over one 2*pi period.

    keys are distinct integers.  The grid max is exact to fp accuracy at
    the sample points (lower bound); the upper bound inflates it by
    1/(1 - s*tau) where s is the grid step and tau = max|k|, and is
    rigorous for s*tau < 1.
    """
    keys = np.asarray(keys, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(keys) == 0:
        return NormBracket(0.0, 0.0)
    maxk = int(np.max(np.abs(keys)))
    if maxk == 0:
        v = abs(complex(coeffs.sum()))
        return NormBracket(v, v * FP_CUSHION)
    n = 1 << max(10, (int(2 * math.pi * maxk / rel_gap)).bit_length())
    n = min(n, 1 << 24)  # memory guard; the s*tau check below keeps rigor
    if 2 * math.pi * maxk / n >= 1:
        raise NonConvergence(
            f"degree {maxk} needs more than {1 << 24} certification points"
        )
    bins = np.zeros(n, dtype=complex)
    np.add.at(bins, np.mod(keys, n), coeffs)
    vals = np.fft.ifft(bins) * n
    lower = float(np.max(np.abs(vals)))
    s_tau = 2 * math.pi * maxk / n
    if s_tau >= 1:
        raise NonConvergence(f"grid step times type {s_tau:.3g} >= 1; cannot certify")
    upper = lower / (1 - s_tau) * FP_CUSHION
    return NormBracket(lower, upper)


def _normalized_direction(w: EF) -> tuple:
    """Hashable ray label: coordinates scaled so the first nonzero one is 1."""
    coords = [(0, w.rational)] + [(d, c) for d, c in w.radicals]
    coords = [(d, c) for d, c in coords if c != 0]
    lead = coords[0][1]
    return tuple((d, c / lead) for d, c in coords)


def ray_partition(f: TrigPoly) -> tuple[complex, list[DenseBlock]]:
    """Split f into its constant term and one periodic piece per rational ray.

    Each returned block has a positive base frequency and integer exponent
    keys with gcd 1; block frequencies base*k enumerate one commensurable
    class of the spectrum.
    """
    const = f.coefficient(EF(0))
    groups: dict[tuple, list[tuple[EF, Fraction, complex]]] = {}
    units: dict[tuple, EF] = {}
    for w, c in f.sorted_terms():
        if w.is_zero():
            continue
        key = _normalized_direction(w)
        if key not in groups:
            unit = w
            if unit.sign() < 0:
                unit = -unit
            units[key] = unit
            groups[key] = []
        t = rational_ratio(w, units[key])
        groups[key].append((w, t, c))
    blocks: list[DenseBlock] = []
    for key, members in groups.items():
        unit = units[key]
        den_lcm = 1
        for _, t, _ in members:
            den_lcm = den_lcm * t.denominator // math.gcd(den_lcm, t.denominator)
        nums = [int(t * den_lcm) for _, t, _ in members]
        g = 0
        for v in nums:
            g = math.gcd(g, v)
        g = max(g, 1)
        base = unit * Fraction(g, den_lcm)
        ks = np.array([v // g for v in nums], dtype=np.int64)
        cs = np.array([c for _, _, c in members], dtype=complex)
        order = np.argsort(ks)
        blocks.append(DenseBlock(EF(0), base, ks[order], cs[order]))
    blocks.sort(key=lambda b: float(b.base))
    return const, blocks


def _block_sup(block: DenseBlock, rel_gap: float) -> NormBracket:
    # the offset is a unimodular factor; it does not change |block|
    return integer_lattice_sup(block.keys, block.coeffs, rel_gap)


def sup_norm_certified(
    f: "TrigPoly | ProductPoly",
    window: tuple[float, float] | None = None,
    grid_step: float | None = None,
    rel_gap: float = 1.0 / 16,
) -> NormBracket:
    """Certified bracket for sup over the reals of |f|.

    Upper bound: sum of per-ray periodic certificates (triangle inequality),
    using the lattice decomposition when one is attached.  Lower bound: max
    of |f| over a window scan (one period for purely periodic f, otherwise
    [-64*pi, 64*pi] by default).  For factored squared moduli both sides are
    the squared bracket of the factor.
    """
    if isinstance(f, ProductPoly):
        b = sup_norm_certified(f.factor, window, grid_step, rel_gap)
        return NormBracket(b.lower * b.lower, b.upper * b.upper)
    if f.is_zero():
        return NormBracket(0.0, 0.0)
    lat = f.lattice()
    if lat is not None:
        const = 0.0
        blocks = list(lat)
    else:
        c0, blocks = ray_partition(f)
        const = abs(c0)
    upper = const * FP_CUSHION
    brackets = [_block_sup(b, rel_gap) for b in blocks]
    upper += math.fsum(b.upper for b in brackets)

    # lower bound by direct scan
    if len(blocks) == 1 and const == 0 and blocks[0].offset.is_zero():
        lower = brackets[0].lower
    else:
        if window is None:
            if len(blocks) == 1:
                period = 2 * math.pi / float(blocks[0].base)
                window = (0.0, period)
            else:
                window = (-64 * math.pi, 64 * math.pi)
        tau = float(spectrum(f).tau)
        step = grid_step if grid_step is not None else 1.0 / (8 * tau) if tau > 0 else 1.0
        npts = min(MAX_GRID_POINTS, max(2, int((window[1] - window[0]) / step) + 1))
        xs = np.linspace(window[0], window[1], npts)
        vals = np.abs(f.evaluate(xs))
        lower = float(np.max(vals))
    lower = min(lower, upper)  # guard against cushion inversion on constants
    return NormBracket(lower, upper)


def certify_lower_bound(
    f: "TrigPoly | ProductPoly",
    m: float,
    grid_step: float | None = None,
    window: tuple[float, float] | None = None,
) -> bool:
    """Window certificate that f >= m.

    Checks min over a grid minus step*tau*sup_upper >= m, refining the step
    until the certificate decides.  The bound is rigorous on the window; for
    a periodic f scanned over one full period it is rigorous everywhere.
    Returns False when a grid value is already below m or refinement hits
    the point budget.
    """
    if isinstance(f, TrigPoly):
        if not f.is_real(tol=1e-9):
            raise ValueError("lower-bound certificates need a real-valued input")
    info = spectrum(f)
    tau = float(info.tau)
    upper = sup_norm_certified(f).upper
    if window is None:
        window = (-32 * math.pi, 32 * math.pi)
    if tau == 0:
        c = f.bohr_coefficient(EF(0)) if isinstance(f, ProductPoly) else f.coefficient(EF(0))
        return c.real >= m
    step = grid_step if grid_step is not None else 1.0 / (8 * tau)
    for _ in range(8):
        npts = int((window[1] - window[0]) / step) + 1
        if npts > MAX_GRID_POINTS:
            return False
        xs = np.linspace(window[0], window[1], npts)
        actual_step = xs[1] - xs[0]
        if isinstance(f, ProductPoly):
            vals = f.evaluate_real(xs)
        else:
            vals = f.evaluate(xs).real
        gmin = float(np.min(vals))
        slack = actual_step * tau * upper
        if gmin - slack >= m:
            return True
        if gmin < m:
            return False
        # shrink the step until the slack fits inside the observed margin
        step = min(step / 4, (gmin - m) / (2 * tau * upper))
        if step <= 0 or not math.isfinite(step):
            return False
    return False
