"""One-dimensional distributions with explicit atoms.

A :class:`Cdf` is stored as a *base* CDF raised to an integer ``power``
(so the law of the max of ``n`` i.i.d. draws is ``cdf.power(n)`` with no
approximation).  The base CDF has atoms at its knots and, on each segment
``[t_j, t_{j+1}]``, rises by ``seg[j]`` along the curve

    frac(t) = ((t - o)**g - (t_j - o)**g) / ((t_{j+1} - o)**g - (t_j - o)**g)

with origin ``o <= t_j`` and exponent ``g > 0``.  ``g = 1`` gives linear
pieces; ``o = 0, g = a`` gives the scaled Beta(a, 1) laws exactly.
"""
from __future__ import annotations

from math import comb

import numpy as np
from scipy import integrate

from ..errors import AtomicOpponentMarginal, OffBudgetMean, ValidationError
from ..rand import as_generator

_QUAD = dict(epsabs=1e-14, epsrel=1e-13, limit=200)


class Cdf:
    __slots__ = ("knots", "atom", "seg", "origin", "gamma", "power_", "left", "right")

    def __init__(self, knots, atom, seg, origin=None, gamma=None, power: int = 1):
        t = np.array(knots, dtype=float)
        atom = np.array(atom, dtype=float)
        seg = np.array(seg, dtype=float)
        m = t.size - 1
        if m < 0 or atom.shape != (m + 1,) or seg.shape != (m,):
            raise ValidationError("Cdf: need m+1 knots, m+1 atom masses and m segment masses")
        if m and not np.all(np.diff(t) > 0):
            raise ValidationError("Cdf: knots must be strictly increasing")
        gamma = np.ones(m) if gamma is None else np.array(gamma, dtype=float)
        origin = t[:-1].copy() if origin is None else np.array(origin, dtype=float)
        if gamma.shape != (m,) or origin.shape != (m,):
            raise ValidationError("Cdf: need one origin and exponent per segment")
        if np.any(gamma <= 0) or np.any(origin > t[:-1]):
            raise ValidationError("Cdf: exponents must be positive and origins left of their segment")
        if np.any(atom < 0) or np.any(seg < 0):
            raise ValidationError("Cdf: masses must be nonnegative")
        if int(power) != power or power < 1:
            raise ValidationError("Cdf: power must be a positive integer")
        total = atom.sum() + seg.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"Cdf: total mass is {total!r}, expected 1")
        origin = np.where(gamma == 1.0, t[:-1], origin)
        left = np.empty(m + 1)
        right = np.empty(m + 1)
        acc = 0.0
        for j in range(m + 1):
            left[j] = acc
            acc += atom[j]
            right[j] = acc
            if j < m:
                acc += seg[j]
        right[-1] = 1.0
        if m:
            left[1:] = np.minimum(left[1:], 1.0)
        for name, arr in (("knots", t), ("atom", atom), ("seg", seg), ("origin", origin), ("gamma", gamma), ("left", left), ("right", right)):
            arr.flags.writeable = False
        self.knots, self.atom, self.seg = t, atom, seg
        self.origin, self.gamma = origin, gamma
        self.power_ = int(power)
        self.left, self.right = left, right

    # -- constructors -------------------------------------------------------

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Cdf":
        return cls([lo, hi], [0.0, 0.0], [1.0])

    @classmethod
    def point_mass(cls, a: float) -> "Cdf":
        return cls([a], [1.0], [])

    @classmethod
    def discrete(cls, locations, probs) -> "Cdf":
        loc = np.asarray(locations, dtype=float)
        p = np.asarray(probs, dtype=float)
        order = np.argsort(loc)
        loc, p = loc[order], p[order]
        uniq, inv = np.unique(loc, return_inverse=True)
        mass = np.bincount(inv, weights=p)
        return cls(uniq, mass / mass.sum(), np.zeros(uniq.size - 1))

    @classmethod
    def empirical(cls, samples) -> "Cdf":
        s = np.asarray(samples, dtype=float).ravel()
        return cls.discrete(s, np.full(s.size, 1.0 / s.size))

    @classmethod
    def from_values(cls, knots, values, atoms=None) -> "Cdf":
        """Piecewise-linear CDF through ``(knots, values)``.

        ``values[j]`` is the CDF just *before* knot ``j``; optional ``atoms``
        adds a jump at each knot.
        """
        t = np.asarray(knots, dtype=float)
        v = np.asarray(values, dtype=float)
        a = np.zeros(t.size) if atoms is None else np.asarray(atoms, dtype=float)
        after = v + a
        seg = v[1:] - after[:-1]
        return cls(t, a, seg)

    @classmethod
    def scaled_beta(cls, a: float, scale: float) -> "Cdf":
        """``scale * Beta(a, 1)``: CDF ``(t / scale)**a`` on ``[0, scale]``."""
        return cls([0.0, scale], [0.0, 0.0], [1.0], origin=[0.0], gamma=[a])

    @classmethod
    def equilibrium(cls, k: int) -> "Cdf":
        """The normalized equilibrium marginal ``k * Beta(1/(k-1), 1)``."""
        return cls.scaled_beta(1.0 / (k - 1), float(k))

    # -- structure ----------------------------------------------------------

    def power(self, n: int) -> "Cdf":
        """Law of the maximum of ``n`` independent draws."""
        return Cdf(self.knots, self.atom, self.seg, self.origin, self.gamma, self.power_ * int(n))

    @property
    def atoms(self) -> list[tuple[float, float]]:
        n = self.power_
        mass = self.right**n - self.left**n
        return [(float(t), float(w)) for t, w in zip(self.knots, mass) if w > 0]

    @property
    def is_atomless(self) -> bool:
        return not np.any(self.atom > 0)

    @property
    def support(self) -> tuple[float, float]:
        m = self.seg.size
        lo_cands = [self.knots[j] for j in range(m + 1) if self.atom[j] > 0]
        lo_cands += [self.knots[j] for j in range(m) if self.seg[j] > 0]
        hi_cands = [self.knots[j] for j in range(m + 1) if self.atom[j] > 0]
        hi_cands += [self.knots[j + 1] for j in range(m) if self.seg[j] > 0]
        return float(min(lo_cands)), float(max(hi_cands))

    def _frac(self, j, t):
        t0, t1 = self.knots[j], self.knots[j + 1]
        g = self.gamma[j]
        if np.all(g == 1.0):
            return (t - t0) / (t1 - t0)
        o = self.origin[j]
        a = (t0 - o) ** g
        b = (t1 - o) ** g
        return (np.maximum(t - o, 0.0) ** g - a) / (b - a)

    def _base(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        m = self.seg.size
        j = np.searchsorted(self.knots, t, side="right") - 1
        out = np.zeros(t.shape)
        inside = (j >= 0) & (j < m)
        out[j >= m] = 1.0
        if np.any(inside):
            jj = j[inside]
            out[inside] = self.right[jj] + self.seg[jj] * np.clip(self._frac(jj, t[inside]), 0.0, 1.0)
        at_knot = (j >= 0) & (j <= m)
        exact = at_knot & (t == self.knots[np.clip(j, 0, m)])
        out[exact] = self.right[j[exact]]
        return out

    def cdf(self, t):
        shape = np.shape(t)
        out = (self._base(np.ravel(t)) ** self.power_).reshape(shape)
        return float(out) if not shape else out

    __call__ = cdf

    def left_limit(self, t):
        """``H(t-)``: probability of values strictly below ``t``."""
        shape = np.shape(t)
        t = np.ravel(np.asarray(t, dtype=float))
        idx = np.searchsorted(self.knots, t, side="left")
        out = self._base(t)
        hit = idx < self.knots.size
        hit[hit] = self.knots[idx[hit]] == t[hit]
        out[hit] = self.left[idx[hit]]
        out = (out**self.power_).reshape(shape)
        return float(out) if not shape else out

    def _ends(self) -> np.ndarray:
        m = self.seg.size
        ends = np.empty(2 * m + 1)
        ends[0::2] = self.right
        ends[1::2] = self.left[1:]
        return ends

    def ppf(self, p):
        """Generalized inverse ``sup{t : H(t) <= p}``, clipped to the support."""
        shape = np.shape(p)
        p = np.clip(np.ravel(np.asarray(p, dtype=float)), 0.0, 1.0)
        q = p ** (1.0 / self.power_) if self.power_ > 1 else p
        ends = self._ends()
        idx = np.searchsorted(ends, q, side="right")
        out = np.empty(q.shape)
        top = idx >= ends.size
        out[top] = self.support[1]
        atom = ~top & (idx % 2 == 0)
        out[atom] = self.knots[idx[atom] // 2]
        segm = ~top & (idx % 2 == 1)
        if np.any(segm):
            j = idx[segm] // 2
            f = np.clip((q[segm] - self.right[j]) / self.seg[j], 0.0, 1.0)
            t0, t1 = self.knots[j], self.knots[j + 1]
            g, o = self.gamma[j], self.origin[j]
            a = (t0 - o) ** g
            b = (t1 - o) ** g
            t = o + (a + f * (b - a)) ** (1.0 / g)
            out[segm] = np.clip(t, t0, t1)
        out = out.reshape(shape)
        return float(out) if not shape else out

    def sample(self, size, rng) -> np.ndarray:
        return self.ppf(as_generator(rng).random(size))

    def mean(self) -> float:
        """Exact mean: ``t_0 + integral of (1 - H)`` with closed-form segments."""
        n = self.power_
        t = self.knots
        total = float(t[0])
        for j in range(self.seg.size):
            t0, t1 = t[j], t[j + 1]
            total += (t1 - t0) - self._segment_integral(j, n)
        return total

    def _segment_integral(self, j: int, n: int) -> float:
        """Integral of ``H_base**n`` over segment ``j``."""
        t0, t1 = self.knots[j], self.knots[j + 1]
        g, o = self.gamma[j], self.origin[j]
        a = (t0 - o) ** g
        b = (t1 - o) ** g
        c1 = self.seg[j] / (b - a)
        c0 = self.right[j] - c1 * a
        acc = 0.0
        for i in range(n + 1):
            e = g * i + 1.0
            antider = ((t1 - o) ** e - (t0 - o) ** e) / e
            acc += comb(n, i) * c0 ** (n - i) * c1**i * antider
        return acc

    def var(self) -> float:
        """Variance, by quadrature of the squared quantile function."""
        second = _quantile_integral(self, lambda p: self.ppf(p) ** 2)
        return second - self.mean() ** 2

    # -- surgery (base power 1 only) ------------------------------------------

    def with_knots(self, points) -> "Cdf":
        """Same distribution with extra knots inserted (segments split)."""
        if self.power_ != 1:
            raise ValidationError("knot insertion is defined for power-1 CDFs only")
        t = list(self.knots)
        atom = list(self.atom)
        seg = list(self.seg)
        origin = list(self.origin)
        gamma = list(self.gamma)
        for s in sorted(float(x) for x in np.atleast_1d(points)):
            if s in t:
                continue
            if s < t[0]:
                t.insert(0, s)
                atom.insert(0, 0.0)
                seg.insert(0, 0.0)
                origin.insert(0, s)
                gamma.insert(0, 1.0)
                continue
            if s > t[-1]:
                t.append(s)
                atom.append(0.0)
                seg.append(0.0)
                origin.append(t[-2])
                gamma.append(1.0)
                continue
            j = int(np.searchsorted(t, s)) - 1
            cur = Cdf(t, atom, seg, origin, gamma)
            f = float(np.clip(cur._frac(j, s), 0.0, 1.0))
            mass = seg[j]
            t.insert(j + 1, s)
            atom.insert(j + 1, 0.0)
            seg[j : j + 1] = [mass * f, mass * (1.0 - f)]
            origin.insert(j + 1, origin[j])
            gamma.insert(j + 1, gamma[j])
        return Cdf(t, atom, seg, origin, gamma)

    def to_json(self) -> dict:
        return {
            "knots": self.knots.tolist(),
            "atoms": self.atom.tolist(),
            "segments": self.seg.tolist(),
            "origins": self.origin.tolist(),
            "exponents": self.gamma.tolist(),
            "power": self.power_,
        }

    def __repr__(self) -> str:
        lo, hi = self.support
        return f"Cdf(support=[{lo:g}, {hi:g}], atoms={len(self.atoms)}, power={self.power_})"


def _p_breaks(h: Cdf, extra=()) -> np.ndarray:
    pts = np.concatenate(([0.0, 1.0], h._ends() ** h.power_, np.asarray(extra, dtype=float)))
    return np.unique(np.clip(pts, 0.0, 1.0))


def _quantile_integral(h: Cdf, fn, extra=()) -> float:
    """Integral over ``p`` in [0, 1] of ``fn(p)``, split where ``fn`` may kink."""
    pts = _p_breaks(h, extra)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi > lo:
            val, _ = integrate.quad(lambda p: float(fn(p)), lo, hi, **_QUAD)
            total += val
    return total


def inverse_cdf(h: Cdf, p):
    return h.ppf(p)


def inverse_cdf_integral(h: Cdf) -> float:
    """Numerical integral of the generalized inverse over [0, 1]."""
    return _quantile_integral(h, h.ppf)


def deviation_payoff_from_marginal(h: Cdf, m: Cdf) -> float:
    """Expected win probability ``E_{X~h}[m(X)]`` of the quantile strategy.

    ``h`` must have mean 1 (a budget-exact quantile strategy) and ``m`` (the
    law of the strongest opponent bid) must be atomless.
    """
    if not m.is_atomless:
        raise AtomicOpponentMarginal("opponent max-law has atoms; ties would make the payoff ambiguous")
    mu = h.mean()
    if abs(mu - 1.0) > 1e-9:
        raise OffBudgetMean(f"deviation law must have mean 1 to spend the budget exactly, got {mu!r}")
    crossings = np.concatenate((np.atleast_1d(h.cdf(m.knots)), np.atleast_1d(h.left_limit(m.knots))))
    return _quantile_integral(h, lambda p: m.cdf(h.ppf(p)), extra=crossings)
