"""Sector fixed points and their multipliers.

Each of the four sign sectors carries one distinguished fixed point of the
word (forward word on the same-sign sectors, inverse word on the mixed ones;
the square of the map when the classification is reflecting).  The points may
have coordinates 0 or infinity, and orbits converging to them may pass
through infinity, so everything here runs in per-coordinate projective
charts: coordinate i stores either z_i (chart bit 0) or 1/z_i (chart bit 1),
whichever has modulus at most one.  Every generator atom acts on stored
values with an exact finite derivative in these charts, which removes all
0 * inf chain-rule breakdowns; the multipliers are read off the composed
chart Jacobian, whose eigenvalues agree with the intrinsic multipliers of
the fixed point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .cone_geometry import SIGMAS, ell as sector_parity
from .dynamics_checks import CertificationError, MappingCase, resolve_cases
from .map_algebra import (
    INF,
    Atom,
    IndeterminatePointError,
    MapWord,
    atom_I,
    concat,
    inverse,
    simplify,
    word_power,
)


class FixedPointError(RuntimeError):
    """The orbit did not settle on a fixed point at the required accuracy."""


@dataclass(frozen=True)
class FixedPointRecord:
    """One sector's fixed point.

    ``point`` is in the original coordinates (components may be 0 or INF).
    ``multipliers`` are the derivative eigenvalues of the map the point is
    fixed under: the word itself (ell=+1) or its inverse (ell=-1), squared
    when the case is "ER".
    """

    sigma: Tuple[int, int]
    ell: int
    case: str
    point: tuple
    multipliers: Tuple[complex, complex]
    residual: float


@dataclass(frozen=True)
class FixedPointData:
    records: Tuple[FixedPointRecord, ...]
    cases: MappingCase

    def record(self, sigma) -> FixedPointRecord:
        sigma = (int(sigma[0]), int(sigma[1]))
        for rec in self.records:
            if rec.sigma == sigma:
                return rec
        raise KeyError(f"no record for sector {sigma}")


# ---------------------------------------------------------------------------
# Chart state and atom actions
# ---------------------------------------------------------------------------

_STEP_TOL = 1e-14
_RESIDUAL_TOL = 1e-12
_MAX_ITER = 200


class _ChartState:
    """Stored values (modulus <= 1), chart bits, and an optional Jacobian."""

    __slots__ = ("vals", "bits", "jac")

    def __init__(self, vals, bits, jac: Optional[np.ndarray]):
        self.vals = [complex(vals[0]), complex(vals[1])]
        self.bits = [int(bits[0]), int(bits[1])]
        self.jac = jac

    def copy(self, with_jac: bool) -> "_ChartState":
        return _ChartState(self.vals, self.bits, np.eye(2, dtype=complex) if with_jac else None)

    def extended(self) -> tuple:
        out = []
        for v, b in zip(self.vals, self.bits):
            if b == 0:
                out.append(v)
            else:
                out.append(INF if v == 0 else 1 / v)
        return tuple(out)


def _chordal(v1: complex, b1: int, v2: complex, b2: int) -> float:
    # projective pairs (a : b); the chordal metric is chart-independent
    a1, a2 = (v1, 1 + 0j) if b1 == 0 else (1 + 0j, v1)
    c1, c2 = (v2, 1 + 0j) if b2 == 0 else (1 + 0j, v2)
    num = abs(a1 * c2 - a2 * c1)
    den = math.sqrt((abs(a1) ** 2 + abs(a2) ** 2) * (abs(c1) ** 2 + abs(c2) ** 2))
    return num / den


def _state_distance(s1: _ChartState, s2: _ChartState) -> float:
    return max(
        _chordal(s1.vals[0], s1.bits[0], s2.vals[0], s2.bits[0]),
        _chordal(s1.vals[1], s1.bits[1], s2.vals[1], s2.bits[1]),
    )


def _apply_moebius(state: _ChartState, i: int, param: complex) -> None:
    # disk automorphisms preserve |z| <=> 1, so the chart bit never changes;
    # in chart 1 the conjugated-parameter variant keeps the stored form exact
    if param == 0:
        return
    v = state.vals[i]
    if state.bits[i] == 0:
        den = 1 - param.conjugate() * v
        new = (v - param) / den
    else:
        den = 1 - param * v
        new = (v - param.conjugate()) / den
    if state.jac is not None:
        state.jac[i, :] *= (1 - abs(param) ** 2) / (den * den)
    state.vals[i] = new


def _log_mod(v: complex) -> float:
    r = abs(v)
    return -math.inf if r == 0.0 else math.log(r)


def _apply_shear(state: _ChartState, sign: int, atom_index: int) -> None:
    # coordinate 1 becomes z1 * z2^sign; exponents are tracked through charts
    e1 = 1 - 2 * state.bits[0]
    e2 = 1 - 2 * state.bits[1]
    a = e1
    b = e2 * sign
    v1, v2 = state.vals[0], state.vals[1]
    log_out = a * _log_mod(v1) + b * _log_mod(v2)
    if math.isnan(log_out):
        raise IndeterminatePointError("0 * inf inside a shear", atom_index)
    c_out = 0 if log_out <= 0 else 1
    g1 = a * (1 - 2 * c_out)
    g2 = b * (1 - 2 * c_out)
    # chart choice guarantees g = +1 whenever the stored value is 0
    stored = (v1 ** g1) * (v2 ** g2)
    if state.jac is not None:
        d1 = (v2 ** g2) if v1 == 0 else g1 * stored / v1
        d2 = (v1 ** g1) if v2 == 0 else g2 * stored / v2
        state.jac[0, :] = d1 * state.jac[0, :] + d2 * state.jac[1, :]
    state.vals[0] = stored
    state.bits[0] = c_out


def _apply_atom_chart(state: _ChartState, atom: Atom, atom_index: int) -> None:
    if atom.kind == "F":
        _apply_shear(state, 1, atom_index)
    elif atom.kind == "Finv":
        _apply_shear(state, -1, atom_index)
    elif atom.kind == "R":
        state.vals.reverse()
        state.bits.reverse()
        if state.jac is not None:
            state.jac = state.jac[::-1, :].copy()
    elif atom.kind == "I":
        if atom.k == 1:
            state.bits[0] ^= 1
        if atom.l == 1:
            state.bits[1] ^= 1
        # stored values and derivatives are untouched: 1/z in the old chart
        # is exactly the stored value in the flipped chart
    else:  # G
        _apply_moebius(state, 0, complex(atom.a))
        _apply_moebius(state, 1, complex(atom.b))


def _apply_word_chart(state: _ChartState, word: MapWord) -> None:
    atoms = word.atoms
    for offset, atom in enumerate(reversed(atoms)):
        _apply_atom_chart(state, atom, len(atoms) - 1 - offset)


def _reconcile_charts(end: _ChartState, start: _ChartState) -> None:
    """Flip end charts back to the start charts where the boundary allows it."""
    for i in (0, 1):
        if end.bits[i] == start.bits[i]:
            continue
        v = end.vals[i]
        if abs(abs(v) - 1.0) > 1e-6 or v == 0:
            raise FixedPointError(
                "orbit returned in a different chart away from the unit circle"
            )
        if end.jac is not None:
            end.jac[i, :] *= -1.0 / (v * v)
        end.vals[i] = 1 / v
        end.bits[i] ^= 1


def _eigenpair(jac: np.ndarray) -> Tuple[complex, complex]:
    tr = complex(jac[0, 0] + jac[1, 1])
    det = complex(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])
    disc = cmath.sqrt(tr * tr - 4.0 * det)
    if abs(tr + disc) >= abs(tr - disc):
        big = (tr + disc) / 2.0
    else:
        big = (tr - disc) / 2.0
    if big == 0:
        return (0j, 0j)
    return (big, det / big)


# ---------------------------------------------------------------------------
# Public interface
# ---------------------------------------------------------------------------


def _case_for_sector(cases: MappingCase, sigma) -> Tuple[int, str]:
    lvl = sector_parity(sigma)
    entry = cases.forward if lvl == 1 else cases.backward
    if entry.case not in ("EP", "ER"):
        raise CertificationError(f"no certified case for sector {sigma}")
    return lvl, entry.case


def sector_fixed_point(word, sigma, cases: MappingCase) -> FixedPointRecord:
    """Locate the fixed point of one sector and compute its multipliers.

    The active map is the word for a same-sign sector, the inverse word for a
    mixed one, squared if the certified case is "ER".  It is conjugated by the
    inversion atom that pulls the sector's corner into the closed unit bidisk
    and iterated from the origin; hyperbolicity certified by the case entry
    makes that orbit converge.  The Jacobian of one final pass in the chart
    coordinates gives the multipliers.
    """
    sigma = (int(sigma[0]), int(sigma[1]))
    if sigma not in SIGMAS:
        raise ValueError(f"not a sign sector: {sigma!r}")
    word = MapWord(word) if not isinstance(word, MapWord) else word
    lvl, case = _case_for_sector(cases, sigma)
    active = word if lvl == 1 else inverse(word)
    power = 1 if case == "EP" else 2
    chart = MapWord([atom_I((1 + sigma[0]) // 2, (1 + sigma[1]) // 2)])
    effective = simplify(concat(chart, word_power(active, power), chart))

    state = _ChartState((0j, 0j), (0, 0), None)
    converged = False
    for _ in range(_MAX_ITER):
        nxt = _ChartState(state.vals, state.bits, None)
        _apply_word_chart(nxt, effective)
        step = _state_distance(nxt, state)
        state = nxt
        if step < _STEP_TOL:
            converged = True
            break
    if not converged:
        raise FixedPointError(
            f"no convergence for sector {sigma} after {_MAX_ITER} iterations"
        )

    final = state.copy(with_jac=True)
    _apply_word_chart(final, effective)
    _reconcile_charts(final, state)
    residual = _state_distance(final, state)
    if residual > _RESIDUAL_TOL:
        raise FixedPointError(
            f"fixed-point residual {residual:.3e} exceeds {_RESIDUAL_TOL:.0e} "
            f"for sector {sigma}"
        )

    # undo the sector conjugation to express the point in original coordinates
    y = final.extended()
    point = []
    for i in (0, 1):
        if sigma[i] == 1:
            zi = y[i]
            point.append(INF if zi == 0 else (0j if zi is INF else 1 / zi))
        else:
            point.append(y[i])
    multipliers = _eigenpair(final.jac)
    return FixedPointRecord(sigma, lvl, case, tuple(point), multipliers, residual)


def all_fixed_point_data(word, cases: Optional[MappingCase] = None, samples: int = 128) -> FixedPointData:
    """Fixed-point records for all four sectors, in the canonical sector order."""
    word = MapWord(word) if not isinstance(word, MapWord) else word
    if cases is None:
        cases = resolve_cases(word, samples=samples)
    records = tuple(sector_fixed_point(word, sigma, cases) for sigma in SIGMAS)
    return FixedPointData(records, cases)


def _conj_inv(value):
    if value is INF:
        return 0j
    if value == 0:
        return INF
    return (1 / value).conjugate()


def _point_deviation(p, q) -> float:
    out = 0.0
    for a, b in zip(p, q):
        va, ba = (a, 0) if a is not INF else (0j, 1)
        vb, bb = (b, 0) if b is not INF else (0j, 1)
        out = max(out, _chordal(va, ba, vb, bb))
    return out


def _multiset_deviation(xs, ys) -> float:
    direct = max(abs(xs[0] - ys[0]), abs(xs[1] - ys[1]))
    crossed = max(abs(xs[0] - ys[1]), abs(xs[1] - ys[0]))
    return min(direct, crossed)


def verify_conjugate_pairs(data: FixedPointData, tol: float = 1e-10) -> float:
    """Check the reflection pairing between opposite sectors.

    For the non-reflecting case the fixed points of opposite sectors are
    related by coordinatewise conj(1/z) (with 0 and infinity exchanged) and
    the multipliers by complex conjugation.  Returns the largest deviation;
    raises ValueError if it exceeds tol, or if either direction is a
    reflecting ("ER") case, where the pairing does not apply.
    """
    worst = 0.0
    for sa, sb in (((-1, -1), (1, 1)), ((-1, 1), (1, -1))):
        ra = data.record(sa)
        rb = data.record(sb)
        if ra.case != "EP" or rb.case != "EP":
            raise ValueError(
                "conjugate pairing applies to the non-reflecting case only"
            )
        reflected = tuple(_conj_inv(v) for v in rb.point)
        worst = max(worst, _point_deviation(ra.point, reflected))
        conj_mults = tuple(m.conjugate() for m in rb.multipliers)
        worst = max(worst, _multiset_deviation(ra.multipliers, conj_mults))
    if worst > tol:
        raise ValueError(f"conjugate-pair deviation {worst:.3e} exceeds {tol:.0e}")
    return worst
