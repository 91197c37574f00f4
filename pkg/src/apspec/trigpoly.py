"""Trigonometric polynomials with exact frequencies.

A TrigPoly is a finite sum  sum_w c_w * exp(i*w*x)  with ExactFrequency
frequencies and complex coefficients.  Canonical form: frequencies are
distinct and kept in a dict; exact zero coefficients are dropped; iteration
order is ascending by frequency value.

Very large products (squared moduli of block-structured polynomials) are not
materialized term by term.  They are kept as a ProductPoly: a factored form
|h|^2 together with a structural block expansion that supports exact
subtraction, spectrum bounds, coefficient lookup and fast evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from apspec.frequency import ExactFrequency, rational_ratio

EF = ExactFrequency
Scalar = Union[int, float, complex]

# beyond this many coefficient pairs, dict-mode products refuse to run;
# block-structured polynomials take the lazy route instead
MAX_DICT_PAIRS = 3_000_000


def _as_ef(w) -> EF:
    if isinstance(w, EF):
        return w
    if isinstance(w, (int, Fraction)):
        return EF(w)
    raise TypeError(f"frequency must be ExactFrequency or rational, got {type(w).__name__}")


@dataclass(frozen=True)
class DenseBlock:
    """Terms on the affine lattice offset + base*k, base > 0, keys distinct."""

    offset: EF
    base: EF
    keys: np.ndarray  # int64, ascending
    coeffs: np.ndarray  # complex128, aligned with keys

    def __post_init__(self):
        if len(self.keys) != len(self.coeffs):
            raise ValueError("keys and coeffs must align")

    def frequencies(self) -> list[EF]:
        return [self.offset + self.base * int(k) for k in self.keys]

    def shift(self, w0: EF) -> "DenseBlock":
        return DenseBlock(self.offset + w0, self.base, self.keys, self.coeffs)


@dataclass(frozen=True)
class Rank1Block:
    """Lazy rank-one coefficient block.

    Represents  sum_{i,j} vec_a[i] * conj(vec_b[j]) * chi(offset
    + base_a*keys_a[i] - base_b*keys_b[j]).  All (i, j) frequencies are
    distinct when base_a and base_b are independent over Q.
    """

    offset: EF
    base_a: EF
    keys_a: np.ndarray
    vec_a: np.ndarray
    base_b: EF
    keys_b: np.ndarray
    vec_b: np.ndarray

    def term_count(self) -> int:
        return len(self.keys_a) * len(self.keys_b)


class TrigPoly:
    """Finite exponential sum with exact frequencies.

    Optionally carries a lattice decomposition (tuple of DenseBlock) that
    re-expresses the same terms on a few affine lattices; large products
    use it to avoid quadratic blowup.
    """

    __slots__ = ("_terms", "_sorted", "_lattice")

    def __init__(
        self,
        terms: Mapping[EF, complex] | Iterable[tuple[EF, complex]] = (),
        lattice: tuple[DenseBlock, ...] | None = None,
    ):
        acc: dict[EF, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            w = _as_ef(w)
            c = complex(c)
            if w in acc:
                acc[w] += c
            else:
                acc[w] = c
        self._terms = {w: c for w, c in acc.items() if c != 0}
        self._sorted = None
        self._lattice = lattice

    # -- construction helpers ---------------------------------------------

    @classmethod
    def constant(cls, c: Scalar) -> "TrigPoly":
        return cls({EF(0): complex(c)})

    @classmethod
    def character(cls, w, coeff: Scalar = 1.0) -> "TrigPoly":
        """coeff * exp(i*w*x)."""
        return cls({_as_ef(w): complex(coeff)})

    @classmethod
    def from_cos(cls, pairs: Iterable[tuple[object, float]], constant: float = 0.0) -> "TrigPoly":
        """constant + sum a * cos(w*x), given (w, a) pairs."""
        terms: list[tuple[EF, complex]] = [(EF(0), complex(constant))]
        for w, a in pairs:
            w = _as_ef(w)
            terms.append((w, a / 2))
            terms.append((-w, a / 2))
        return cls(terms)

    # -- basic views --------------------------------------------------------

    def sorted_terms(self) -> list[tuple[EF, complex]]:
        """Terms in ascending frequency order (exact comparison)."""
        if self._sorted is None:
            self._sorted = sorted(self._terms.items(), key=_FreqKey)
        return list(self._sorted)

    def frequencies(self) -> list[EF]:
        return [w for w, _ in self.sorted_terms()]

    def term_count(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, w) -> complex:
        return self._terms.get(_as_ef(w), 0j)

    def lattice(self) -> tuple[DenseBlock, ...] | None:
        return self._lattice

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):  # pragma: no cover - polys are not meant as dict keys
        return hash(tuple(self.sorted_terms()))

    def __repr__(self) -> str:
        n = self.term_count()
        if n > 6:
            return f"TrigPoly(<{n} terms>)"
        parts = [f"{c:.6g}*chi({w!r})" for w, c in self.sorted_terms()]
        return "TrigPoly(" + " + ".join(parts) + ")" if parts else "TrigPoly(0)"

    # -- ring operations ----------------------------------------------------

    def __add__(self, other) -> "TrigPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for w, c in other._terms.items():
            v = acc.get(w, 0j) + c
            if v == 0:
                acc.pop(w, None)
            else:
                acc[w] = v
        return TrigPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> "TrigPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "TrigPoly":
        return (-self) + other

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, (int, float, complex)):
            if other == 0:
                return TrigPoly()
            return TrigPoly({w: c * other for w, c in self._terms.items()})
        if isinstance(other, TrigPoly):
            return multiply(self, other)
        return NotImplemented

    __rmul__ = __mul__

    # -- analysis -----------------------------------------------------------

    def evaluate(self, x):
        """Value at real or complex x (scalar or ndarray)."""
        return _evaluate_terms(self.sorted_terms(), x)

    def conj(self) -> "TrigPoly":
        """Pointwise complex conjugate (for real x)."""
        return TrigPoly({-w: c.conjugate() for w, c in self._terms.items()})

    def derivative(self) -> "TrigPoly":
        return TrigPoly({w: c * 1j * float(w) for w, c in self._terms.items()})

    def modulate(self, w0) -> "TrigPoly":
        """Multiply by exp(i*w0*x): shifts every frequency by w0."""
        w0 = _as_ef(w0)
        lat = None
        if self._lattice is not None:
            lat = tuple(b.shift(w0) for b in self._lattice)
        return TrigPoly({w + w0: c for w, c in self._terms.items()}, lattice=lat)

    def dilate(self, rho) -> "TrigPoly":
        """x -> rho*x rescaling: multiplies every frequency by rho."""
        rho = _as_ef(rho)
        if rho.is_zero():
            raise ValueError("dilation scale must be nonzero")
        return TrigPoly({w * rho: c for w, c in self._terms.items()})

    def wiener_norm(self) -> float:
        """Sum of coefficient magnitudes, accumulated in canonical order."""
        return math.fsum(abs(c) for _, c in self.sorted_terms())

    def is_real(self, tol: float = 0.0) -> bool:
        """Hermitian-symmetry test: c(-w) == conj(c(w)) within tol."""
        scale = max((abs(c) for c in self._terms.values()), default=0.0)
        for w, c in self._terms.items():
            d = abs(c - self._terms.get(-w, 0j).conjugate())
            if d > tol * scale:
                return False
        return True

    def with_lattice(self, lattice: tuple[DenseBlock, ...]) -> "TrigPoly":
        out = TrigPoly(self._terms, lattice=lattice)
        return out


def _as_poly(x) -> "TrigPoly":
    if isinstance(x, TrigPoly):
        return x
    if isinstance(x, (int, float, complex)):
        return TrigPoly.constant(x)
    return NotImplemented


class _FreqKey:
    """Sort key wrapper using exact frequency comparison."""

    __slots__ = ("w",)

    def __init__(self, item):
        self.w = item[0] if isinstance(item, tuple) else item

    def __lt__(self, other: "_FreqKey") -> bool:
        return self.w < other.w


def _evaluate_terms(terms: Sequence[tuple[EF, complex]], x):
    xs = np.asarray(x)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs).astype(complex)
    out = np.zeros(xs.shape, dtype=complex)
    if terms:
        ws = np.array([float(w) for w, _ in terms])
        cs = np.array([c for _, c in terms])
        # chunk over terms to bound memory on long grids
        step = max(1, int(4_000_000 // max(1, xs.size)))
        for i in range(0, len(ws), step):
            block = np.exp(1j * np.outer(ws[i : i + step], xs))
            out += cs[i : i + step] @ block
    return complex(out[0]) if scalar else out


# -- spectrum ----------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumInfo:
    """Summary of a (finite) Bohr spectrum."""

    count: int
    inf_freq: EF | None
    sup_freq: EF | None
    bandwidth: EF
    tau: EF
    frequencies: tuple[EF, ...] | None = None

    @staticmethod
    def empty() -> "SpectrumInfo":
        return SpectrumInfo(0, None, None, EF(0), EF(0), ())


def spectrum(f: "TrigPoly | ProductPoly") -> SpectrumInfo:
    """Spectrum summary: count, extremes, bandwidth, one-sided width tau.

    tau is max(|inf|, |sup|), the exponential type of the natural entire
    extension.  For lazy products the frequency list is omitted and the
    count is an upper bound (cross-lattice coincidences are not deduped).
    """
    if isinstance(f, ProductPoly):
        return f.spectrum()
    freqs = f.frequencies()
    if not freqs:
        return SpectrumInfo.empty()
    lo, hi = freqs[0], freqs[-1]
    tau = max(abs(lo), abs(hi))
    return SpectrumInfo(len(freqs), lo, hi, hi - lo, tau, tuple(freqs))


def bohr_coefficient(f: "TrigPoly | ProductPoly", w) -> complex:
    """Exact coefficient at frequency w (0 if absent)."""
    w = _as_ef(w)
    if isinstance(f, ProductPoly):
        return f.bohr_coefficient(w)
    return f.coefficient(w)


def mean_value_numeric(f: TrigPoly, w, halfwidth: float) -> tuple[complex, float]:
    """Finite-window mean (1/2L) * integral of f * exp(-i*w*x) over [-L, L].

    Returns (estimate, bound) where bound = C / (2L) with
    C = sum over other frequencies of 2|c| / |w' - w|; the true Bohr
    coefficient differs from the estimate by at most bound.
    """
    w = _as_ef(w)
    L = float(halfwidth)
    if L <= 0:
        raise ValueError("halfwidth must be positive")
    est = 0j
    c_big = 0.0
    for wp, c in f.sorted_terms():
        delta = float(wp - w)
        if wp == w:
            est += c
        else:
            est += c * math.sin(delta * L) / (delta * L)
            c_big += 2 * abs(c) / abs(delta)
    return est, c_big / (2 * L)


# -- products ----------------------------------------------------------------


def multiply(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    """Exact product; deterministic accumulation order."""
    ta, tb = f.sorted_terms(), g.sorted_terms()
    if len(ta) * len(tb) > MAX_DICT_PAIRS:
        raise ValueError(
            f"product would touch {len(ta) * len(tb)} coefficient pairs; "
            "use modulus_squared on a lattice-structured polynomial instead"
        )
    acc: dict[EF, complex] = {}
    for wa, ca in ta:
        for wb, cb in tb:
            w = wa + wb
            v = acc.get(w)
            acc[w] = ca * cb if v is None else v + ca * cb
    return TrigPoly(acc)


def modulus_squared(f: TrigPoly) -> "TrigPoly | ProductPoly":
    """|f|^2 as a trig polynomial, Hermitian by construction.

    Small inputs produce a plain TrigPoly whose coefficients satisfy
    c(-w) == conj(c(w)) exactly.  Inputs carrying a lattice decomposition
    with a large implied pair count return a lazy ProductPoly.
    """
    lat = f.lattice()
    n = f.term_count()
    if lat is not None and n * n > MAX_DICT_PAIRS:
        return ProductPoly.from_lattice(f)
    if n * n > MAX_DICT_PAIRS:
        raise ValueError(
            f"modulus_squared would touch {n * n} pairs; attach a lattice "
            "decomposition to enable the structured route"
        )
    terms = f.sorted_terms()
    acc: dict[EF, complex] = {}
    order: list[EF] = []
    for i in range(len(terms)):
        wi, ci = terms[i]
        for j in range(i + 1, len(terms)):
            wj, cj = terms[j]
            w = wi - wj  # negative: wi < wj in sorted order
            v = ci * cj.conjugate()
            prev = acc.get(w)
            if prev is None:
                acc[w] = v
                order.append(w)
            else:
                acc[w] = prev + v
    out: dict[EF, complex] = {}
    for w in order:
        v = acc[w]
        if v != 0:
            out[w] = v
            out[-w] = v.conjugate()
    diag = math.fsum(abs(c) * abs(c) for _, c in terms)
    if diag != 0:
        out[EF(0)] = complex(diag, 0.0)
    return TrigPoly(out)


class ProductPoly:
    """|h|^2 kept in factored + block-expanded form.

    factor: the polynomial h (lattice-structured).
    dense: autocorrelation blocks (one per lattice pair with equal base,
           merged offsets).
    cross: lazy rank-one blocks for distinct-base lattice pairs.

    The represented polynomial is  sum(dense) + sum(cross) == |h|^2 exactly,
    with every stored float produced by a deterministic schedule, so two
    ProductPolys built from factors with identical coefficient arrays
    subtract to the exact zero polynomial.
    """

    __slots__ = ("factor", "dense", "cross")

    def __init__(self, factor: TrigPoly, dense: tuple[DenseBlock, ...], cross: tuple[Rank1Block, ...]):
        self.factor = factor
        self.dense = dense
        self.cross = cross

    @classmethod
    def from_lattice(cls, h: TrigPoly) -> "ProductPoly":
        lat = h.lattice()
        if lat is None:
            raise ValueError("factor carries no lattice decomposition")
        dense: list[DenseBlock] = []
        cross: list[Rank1Block] = []
        for a in range(len(lat)):
            ba = lat[a]
            # autocorrelation of block a: frequencies base*(k_i - k_j)
            keys, coeffs = _autocorrelate(ba.keys, ba.coeffs)
            dense.append(DenseBlock(EF(0), ba.base, keys, coeffs))
            for b in range(len(lat)):
                if a == b:
                    continue
                bb = lat[b]
                cross.append(
                    Rank1Block(
                        ba.offset - bb.offset,
                        ba.base,
                        ba.keys,
                        ba.coeffs,
                        bb.base,
                        bb.keys,
                        bb.coeffs,
                    )
                )
        return cls(h, tuple(dense), tuple(cross))

    # -- views ---------------------------------------------------------------

    def term_count_upper(self) -> int:
        """Upper bound on the number of distinct frequencies."""
        n = sum(len(b.keys) for b in self.dense)
        n += sum(b.term_count() for b in self.cross)
        return n

    def is_real(self, tol: float = 0.0) -> bool:
        return True  # |h|^2 is real by construction

    def evaluate(self, x):
        h = self.factor.evaluate(x)
        return h * np.conjugate(h) if isinstance(h, np.ndarray) else h * h.conjugate()

    def evaluate_real(self, x):
        h = self.factor.evaluate(x)
        return np.abs(h) ** 2 if isinstance(h, np.ndarray) else abs(h) ** 2

    def bohr_coefficient(self, w) -> complex:
        w = _as_ef(w)
        total = 0j
        for b in self.dense:
            q = rational_ratio(w - b.offset, b.base)
            if q is None or q.denominator != 1:
                continue
            idx = np.searchsorted(b.keys, int(q))
            if idx < len(b.keys) and b.keys[idx] == int(q):
                total += complex(b.coeffs[idx])
        for b in self.cross:
            total += _rank1_coefficient(b, w)
        return total

    def spectrum(self) -> SpectrumInfo:
        los: list[EF] = []
        his: list[EF] = []
        for b in self.dense:
            if len(b.keys):
                los.append(b.offset + b.base * int(b.keys[0]))
                his.append(b.offset + b.base * int(b.keys[-1]))
        for b in self.cross:
            if len(b.keys_a) and len(b.keys_b):
                los.append(b.offset + b.base_a * int(b.keys_a[0]) - b.base_b * int(b.keys_b[-1]))
                his.append(b.offset + b.base_a * int(b.keys_a[-1]) - b.base_b * int(b.keys_b[0]))
        if not los:
            return SpectrumInfo.empty()
        lo, hi = min(los), max(his)
        return SpectrumInfo(self.term_count_upper(), lo, hi, hi - lo, max(abs(lo), abs(hi)), None)

    def wiener_norm_upper(self) -> float:
        """Upper bound on the coefficient-magnitude sum."""
        total = math.fsum(float(np.abs(b.coeffs).sum()) for b in self.dense)
        for b in self.cross:
            total += float(np.abs(b.vec_a).sum() * np.abs(b.vec_b).sum())
        return total

    def subtract_structured(self, other: "ProductPoly") -> TrigPoly:
        """Exact difference when both sides share the same block shapes.

        Matches dense blocks by (offset, base) and cross blocks by
        (offset, base_a, base_b, keys); subtracts coefficient arrays
        exactly.  Any surviving term is returned in a plain TrigPoly;
        structurally identical inputs give the exact zero polynomial.
        """
        out: dict[EF, complex] = {}

        def add_dense(offset: EF, base: EF, keys: np.ndarray, coeffs: np.ndarray, sign: float):
            for k, c in zip(keys.tolist(), coeffs.tolist()):
                if c != 0:
                    w = offset + base * k
                    v = out.get(w, 0j) + sign * c
                    if v == 0:
                        out.pop(w, None)
                    else:
                        out[w] = v

        mine = {(b.offset, b.base): b for b in self.dense}
        theirs = {(b.offset, b.base): b for b in other.dense}
        for key in set(mine) | set(theirs):
            a, c = mine.get(key), theirs.get(key)
            if a is not None and c is not None and np.array_equal(a.keys, c.keys):
                diff = a.coeffs - c.coeffs
                nz = diff != 0
                add_dense(key[0], key[1], a.keys[nz], diff[nz], 1.0)
            else:
                if a is not None:
                    add_dense(a.offset, a.base, a.keys, a.coeffs, 1.0)
                if c is not None:
                    add_dense(c.offset, c.base, c.keys, c.coeffs, -1.0)

        def cross_key(b: Rank1Block):
            return (b.offset, b.base_a, b.base_b, b.keys_a.tobytes(), b.keys_b.tobytes())

        mine_x = {cross_key(b): b for b in self.cross}
        theirs_x = {cross_key(b): b for b in other.cross}
        leftovers = 0
        for key in set(mine_x) | set(theirs_x):
            a, c = mine_x.get(key), theirs_x.get(key)
            if a is not None and c is not None:
                if np.array_equal(a.vec_a, c.vec_a) and np.array_equal(a.vec_b, c.vec_b):
                    continue  # identical rank-one blocks cancel exactly
            # fall through: materialize difference (bounded sizes only)
            for blk, sign in ((a, 1.0), (c, -1.0)):
                if blk is None:
                    continue
                leftovers += blk.term_count()
                if leftovers > MAX_DICT_PAIRS:
                    raise ValueError("structured difference does not cancel; too large to materialize")
                vals = np.outer(blk.vec_a, np.conjugate(blk.vec_b))
                for i, ka in enumerate(blk.keys_a.tolist()):
                    wa = blk.offset + blk.base_a * ka
                    for j, kb in enumerate(blk.keys_b.tolist()):
                        v = vals[i, j]
                        if v != 0:
                            w = wa - blk.base_b * kb
                            cur = out.get(w, 0j) + sign * v
                            if cur == 0:
                                out.pop(w, None)
                            else:
                                out[w] = cur
        return TrigPoly(out)


def _autocorrelate(keys: np.ndarray, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies and coefficients of |sum c_k e^{i k t}|^2 on the integer lattice.

    Returns (delta_keys ascending, values) with values[d] = sum_k c_{k+d} * conj(c_k),
    computed by one dense complex convolution (deterministic given its inputs).
    """
    if len(keys) == 0:
        return keys.copy(), coeffs.copy()
    k0, k1 = int(keys[0]), int(keys[-1])
    width = k1 - k0 + 1
    dense = np.zeros(width, dtype=complex)
    dense[keys - k0] = coeffs
    corr = np.convolve(dense, np.conjugate(dense[::-1]))
    deltas = np.arange(-(width - 1), width, dtype=np.int64)
    nz = corr != 0
    return deltas[nz], corr[nz]


def _solve_pair(target: EF, u: EF, v: EF) -> tuple[Fraction, Fraction] | None:
    """Exact (s, t) with target == s*u + t*v, or None.

    u and v must be linearly independent over Q; the answer is then unique.
    """
    basis = sorted({d for f in (target, u, v) for d, _ in f.radicals})
    def coords(f: EF) -> list[Fraction]:
        m = dict(f.radicals)
        return [f.rational] + [m.get(d, Fraction(0)) for d in basis]
    tv, uv, vv = coords(target), coords(u), coords(v)
    # pick two rows making the 2x2 system nonsingular
    n = len(tv)
    for i in range(n):
        for j in range(i + 1, n):
            det = uv[i] * vv[j] - uv[j] * vv[i]
            if det == 0:
                continue
            s = (tv[i] * vv[j] - tv[j] * vv[i]) / det
            t = (uv[i] * tv[j] - uv[j] * tv[i]) / det
            if all(s * uv[k] + t * vv[k] == tv[k] for k in range(n)):
                return s, t
            return None
    return None


def _rank1_coefficient(b: Rank1Block, w: EF) -> complex:
    """Coefficient of a rank-one block at frequency w (exact lattice solve)."""
    target = w - b.offset
    st = _solve_pair(target, b.base_a, b.base_b)
    if st is None:
        return 0j
    s, t = st
    if s.denominator != 1 or t.denominator != 1:
        return 0j
    ka, kb = int(s), -int(t)
    i = np.searchsorted(b.keys_a, ka)
    j = np.searchsorted(b.keys_b, kb)
    if i < len(b.keys_a) and b.keys_a[i] == ka and j < len(b.keys_b) and b.keys_b[j] == kb:
        return complex(b.vec_a[i] * np.conjugate(b.vec_b[j]))
    return 0j
