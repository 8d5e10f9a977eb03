"""Closed-form resonance spectra from fixed-point multipliers.

A certified hyperbolic word contributes resonances through two families: the
attracting fixed point of the word itself (same-sign sectors) and the
attracting fixed point of the inverse word (mixed sectors).  With contracting
multiplier pairs lambda and mu at those points, the composition operator on a
compatible quadrant-weighted space has eigenvalue 1, monomial products of the
lambda's over nonnegative lattice exponents, and orientation-signed monomial
products of the mu's over strictly positive exponents; reflecting ("ER")
classifications replace a family by plus/minus square roots.  Everything
downstream of that description is exact bookkeeping: enumeration with a
cutoff, trace formulas, a truncated spectral determinant with a tail bound,
polynomial decay exponents, and the eigenvalue counting function.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .dynamics_checks import MappingCase
from .fixed_points import FixedPointData, all_fixed_point_data
from .map_algebra import MapWord, orientation, psi_word

_GROUP_TOL = 1e-12
_TIE_REL = 1e-12
_MAX_ENUMERATED = 2_000_000


@dataclass(frozen=True)
class SpectrumModel:
    """Everything the closed-form spectrum depends on.

    ``same_sign_multipliers`` belong to the sector (-1, -1) fixed point of the
    word (its square in the reflecting case), ``mixed_multipliers`` to the
    sector (-1, +1) fixed point of the inverse word (ditto).  Both pairs must
    be strictly contracting.
    """

    omega: int
    forward_case: str
    backward_case: str
    same_sign_multipliers: Tuple[complex, complex]
    mixed_multipliers: Tuple[complex, complex]

    def __post_init__(self):
        if self.omega not in (1, -1):
            raise ValueError("omega must be +1 or -1")
        for name in ("forward_case", "backward_case"):
            if getattr(self, name) not in ("EP", "ER"):
                raise ValueError(f"{name} must be 'EP' or 'ER'")
        for pair_name in ("same_sign_multipliers", "mixed_multipliers"):
            pair = tuple(complex(v) for v in getattr(self, pair_name))
            if max(abs(v) for v in pair) >= 1.0:
                raise ValueError(f"{pair_name} must be strictly contracting")
            object.__setattr__(self, pair_name, pair)


@dataclass(frozen=True)
class EigenvalueEntry:
    value: complex
    multiplicity: int


def spectrum_model_from_word(word, cases: Optional[MappingCase] = None, samples: int = 128) -> SpectrumModel:
    """Build the spectrum model from numerically located sector fixed points."""
    word = MapWord(word) if not isinstance(word, MapWord) else word
    data = all_fixed_point_data(word, cases=cases, samples=samples)
    return spectrum_model_from_fixed_points(data, orientation(word))


def spectrum_model_from_fixed_points(data: FixedPointData, omega: int) -> SpectrumModel:
    return SpectrumModel(
        omega=omega,
        forward_case=data.cases.forward.case,
        backward_case=data.cases.backward.case,
        same_sign_multipliers=data.record((-1, -1)).multipliers,
        mixed_multipliers=data.record((-1, 1)).multipliers,
    )


# ---------------------------------------------------------------------------
# Closed forms for the twisted-shear family
# ---------------------------------------------------------------------------


def _psi_subproducts(ks: Sequence[int], params: Sequence[complex]) -> Tuple[complex, complex]:
    odd = 1 + 0j
    even = 1 + 0j
    for i, (k, a) in enumerate(zip(ks, params), start=1):
        if i % 2 == 1:
            odd *= complex(a) ** int(k)
        else:
            even *= complex(a) ** int(k)
    return odd, even


def psi_cases(n: int, s: int) -> Tuple[str, str]:
    """Forward and backward classification of the n-block twisted-shear word."""
    forward = "EP" if s == 0 else "ER"
    backward = "EP" if (n + s) % 2 == 0 else "ER"
    return forward, backward


def closed_form_multipliers_psi(
    ks: Sequence[int], params: Sequence[complex], s: int = 0
) -> Dict[Tuple[int, int], Tuple[complex, complex]]:
    """Sector multipliers of the twisted-shear word, without any iteration.

    Between the odd-index and even-index exponent subproducts P_o and P_e the
    four sectors split into four regimes by the parity of the block count and
    the antipode flag; reflecting sectors store the multipliers of the squared
    map.  Validated against the chart-engine fixed points.
    """
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    n = len(ks)
    if n == 0 or len(params) != n:
        raise ValueError("need equally many exponents and parameters")
    po, pe = _psi_subproducts(ks, params)
    out: Dict[Tuple[int, int], Tuple[complex, complex]] = {}
    if s == 0 and n % 2 == 1:
        v = cmath.sqrt(po * pe)
        out[(-1, -1)] = (v, -v)
        out[(1, 1)] = (v.conjugate(), -v.conjugate())
        mixed = (po * pe, (po * pe).conjugate())
        out[(-1, 1)] = mixed
        out[(1, -1)] = mixed
    elif s == 0:
        out[(-1, -1)] = (po, pe)
        out[(1, 1)] = (po.conjugate(), pe.conjugate())
        out[(-1, 1)] = (po.conjugate(), pe)
        out[(1, -1)] = (po, pe.conjugate())
    elif n % 2 == 1:
        same = (po.conjugate() * pe, po * pe.conjugate())
        out[(-1, -1)] = same
        out[(1, 1)] = same
        w = cmath.sqrt(po * pe.conjugate())
        out[(-1, 1)] = (w, -w)
        out[(1, -1)] = (w.conjugate(), -w.conjugate())
    else:
        pair = (abs(po) ** 2 + 0j, abs(pe) ** 2 + 0j)
        for sigma in ((-1, -1), (1, 1), (-1, 1), (1, -1)):
            out[sigma] = pair
    return out


def spectrum_model_psi(ks: Sequence[int], params: Sequence[complex], s: int = 0) -> SpectrumModel:
    """Closed-form spectrum model of the twisted-shear word."""
    mults = closed_form_multipliers_psi(ks, params, s)
    forward, backward = psi_cases(len(ks), s)
    return SpectrumModel(
        omega=(-1) ** len(ks),
        forward_case=forward,
        backward_case=backward,
        same_sign_multipliers=mults[(-1, -1)],
        mixed_multipliers=mults[(-1, 1)],
    )


# ---------------------------------------------------------------------------
# Eigenvalue enumeration
# ---------------------------------------------------------------------------


def _lattice_values(pair, threshold: float, positive_only: bool) -> List[complex]:
    """Products c1^n1 c2^n2 with modulus >= threshold.

    Exponents run over the nonnegative lattice without the origin, or over
    strictly positive pairs when positive_only is set.
    """
    c1, c2 = pair
    r1, r2 = abs(c1), abs(c2)
    eff = threshold * (1.0 - _TIE_REL)
    out: List[complex] = []
    if positive_only and (r1 == 0.0 or r2 == 0.0):
        return out
    start = 1 if positive_only else 0
    n1 = start
    while True:
        lead = c1 ** n1
        if abs(lead) < eff:
            break
        n2 = start
        value = lead * c2 ** n2
        while abs(value) >= eff:
            if not (n1 == 0 and n2 == 0):
                out.append(value)
                if len(out) > _MAX_ENUMERATED:
                    raise ValueError("cutoff enumerates too many eigenvalues")
            n2 += 1
            if r2 == 0.0:
                break
            value = lead * c2 ** n2
        n1 += 1
        if r1 == 0.0:
            break
    return out


def _snap(value: complex) -> complex:
    # relative snap: collapse conjugate-pair noise without flattening the tail
    re, im = value.real, value.imag
    scale = abs(value)
    if abs(im) < 5e-13 * scale:
        im = 0.0
    if abs(re) < 5e-13 * scale:
        re = 0.0
    return complex(re, im)


def _arg_key(value: complex) -> float:
    a = cmath.phase(value)
    if a < 0:
        a += 2.0 * math.pi
    return a


def enumerate_eigenvalues(model: SpectrumModel, cutoff: float) -> Tuple[EigenvalueEntry, ...]:
    """All predicted eigenvalues of modulus >= cutoff, grouped with multiplicity.

    The list starts with the simple eigenvalue 1 and is sorted by decreasing
    modulus, then by argument in [0, 2*pi).  Values closer than 1e-12 are
    merged into one entry.
    """
    if not (0.0 < cutoff <= 1.0):
        raise ValueError("cutoff must lie in (0, 1]")
    values: List[complex] = []
    lam = model.same_sign_multipliers
    if model.forward_case == "EP":
        for v in _lattice_values(lam, cutoff, positive_only=False):
            values.append(v)
            values.append(v.conjugate())
    else:
        for v in _lattice_values(lam, cutoff * cutoff, positive_only=False):
            w = cmath.sqrt(v)
            values.append(w)
            values.append(-w)
    mu = model.mixed_multipliers
    if model.backward_case == "EP":
        for v in _lattice_values(mu, cutoff, positive_only=True):
            values.append(model.omega * v)
            values.append(model.omega * v.conjugate())
    else:
        for v in _lattice_values(mu, cutoff * cutoff, positive_only=True):
            w = cmath.sqrt(v)
            values.append(w)
            values.append(-w)

    values = [_snap(v) for v in values]
    values.sort(key=lambda v: (-abs(v), _arg_key(v), v.real, v.imag))
    entries: List[EigenvalueEntry] = [EigenvalueEntry(1.0 + 0j, 1)]
    for v in values:
        last = entries[-1]
        tol = _GROUP_TOL * max(abs(v), abs(last.value))
        if abs(v - last.value) <= tol and last.value != 1.0:
            entries[-1] = EigenvalueEntry(last.value, last.multiplicity + 1)
        else:
            entries.append(EigenvalueEntry(v, 1))
    return tuple(entries)


# ---------------------------------------------------------------------------
# Traces and the spectral determinant
# ---------------------------------------------------------------------------


def _corner_sum(a: complex, b: complex) -> complex:
    """Sum of a^n1 b^n2 over the nonnegative lattice minus the origin."""
    return 1.0 / ((1.0 - a) * (1.0 - b)) - 1.0


def closed_trace(model: SpectrumModel, k: int) -> complex:
    """Exact trace of the k-th operator power, summed over both families."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    k = int(k)
    l1, l2 = model.same_sign_multipliers
    if model.forward_case == "EP":
        s_same = 1.0 + _corner_sum(l1 ** k, l2 ** k) + _corner_sum(
            l1.conjugate() ** k, l2.conjugate() ** k
        )
    elif k % 2 == 1:
        s_same = 1.0 + 0j
    else:
        s_same = 1.0 + 2.0 * _corner_sum(l1 ** (k // 2), l2 ** (k // 2))
    m1, m2 = model.mixed_multipliers
    w = model.omega
    if model.backward_case == "EP":
        direct = (w * m1 * m2) ** k / ((1.0 - m1 ** k) * (1.0 - m2 ** k))
        mirrored = (w * m1.conjugate() * m2.conjugate()) ** k / (
            (1.0 - m1.conjugate() ** k) * (1.0 - m2.conjugate() ** k)
        )
        s_mixed = direct + mirrored
    elif k % 2 == 1:
        s_mixed = 0j
    else:
        h = k // 2
        s_mixed = 2.0 * (m1 * m2) ** h / ((1.0 - m1 ** h) * (1.0 - m2 ** h))
    return s_same + s_mixed


def _family_abs_totals(model: SpectrumModel) -> float:
    """Exact sum of |v| over every family eigenvalue (eigenvalue 1 excluded)."""
    r1, r2 = (abs(v) for v in model.same_sign_multipliers)
    if model.forward_case == "EP":
        total = 2.0 * _corner_sum(r1, r2).real
    else:
        total = 2.0 * _corner_sum(math.sqrt(r1), math.sqrt(r2)).real
    g1, g2 = (abs(v) for v in model.mixed_multipliers)
    if model.backward_case == "ER":
        g1, g2 = math.sqrt(g1), math.sqrt(g2)
    total += 2.0 * (g1 * g2) / ((1.0 - g1) * (1.0 - g2))
    return total


def spectral_determinant(model: SpectrumModel, z: complex, cutoff: float = 1e-8) -> Tuple[complex, float]:
    """Truncated spectral determinant prod(1 - z v) with a tail estimate.

    The product runs over the enumerated eigenvalues of modulus >= cutoff
    (including the leading eigenvalue 1); the returned error term is the
    first-order bound |z| times the exact absolute mass of the discarded
    eigenvalues.
    """
    z = complex(z)
    value = 1.0 + 0j
    head = 0.0
    for entry in enumerate_eigenvalues(model, cutoff):
        value *= (1.0 - z * entry.value) ** entry.multiplicity
        head += entry.multiplicity * abs(entry.value)
    tail = max(0.0, _family_abs_totals(model) - (head - 1.0))
    return value, abs(z) * tail


# ---------------------------------------------------------------------------
# Decay exponents and counting
# ---------------------------------------------------------------------------


def _family_moduli(model: SpectrumModel) -> List[Tuple[float, float]]:
    r1, r2 = (abs(v) for v in model.same_sign_multipliers)
    if model.forward_case == "ER":
        r1, r2 = math.sqrt(r1), math.sqrt(r2)
    g1, g2 = (abs(v) for v in model.mixed_multipliers)
    if model.backward_case == "ER":
        g1, g2 = math.sqrt(g1), math.sqrt(g2)
    return [(r1, r2), (r1, r2), (g1, g2), (g1, g2)]


def decay_classification(model: SpectrumModel) -> Tuple[int, Optional[float]]:
    """Stretched-exponential decay dimension d and rate eta of |lambda_n|.

    d = 2 when some family has two nonzero moduli (decay exp(-eta sqrt(n))
    with the two-dimensional rate), d = 1 when only single-axis families from
    the forward fixed point survive, d = 0 when the whole spectrum is the
    single eigenvalue 1 (monomial words); eta is None in the last case.
    """
    families = _family_moduli(model)
    planar = [f for f in families if f[0] > 0.0 and f[1] > 0.0]
    if planar:
        s = sum(1.0 / (math.log(f1) * math.log(f2)) for f1, f2 in planar)
        return 2, (0.5 * s) ** -0.5
    axis = [c for fam in families[:2] for c in fam if c > 0.0]
    if axis:
        return 1, 1.0 / sum(1.0 / abs(math.log(c)) for c in axis)
    return 0, None


def _count_quadrant(p: float, q: float, r: float) -> int:
    """Lattice points (n1, n2) != (0, 0) with n_i >= 0 and p^n1 q^n2 >= r.

    Near-ties within a relative 1e-12 on the log scale count as inside.
    """
    if not (0.0 <= p < 1.0 and 0.0 <= q < 1.0):
        raise ValueError("moduli must lie in [0, 1)")
    if r <= 0.0:
        raise ValueError("threshold must be positive")
    if math.isinf(r):
        return 0
    lr = math.log(r)
    eps = _TIE_REL * max(1.0, abs(lr))
    bound = lr - eps
    count = 0
    counted_origin = False
    n1 = 0
    while True:
        base = 0.0 if n1 == 0 else n1 * math.log(p) if p > 0.0 else -math.inf
        if base < bound:
            break
        if q == 0.0:
            n2_max = 0
        else:
            n2_max = int(math.floor((bound - base) / math.log(q)))
        count += n2_max + 1
        if n1 == 0:
            counted_origin = True
        n1 += 1
        if p == 0.0:
            break
    if counted_origin:
        count -= 1
    return count


def counting_function(model: SpectrumModel, r: float) -> int:
    """Number of predicted eigenvalues with modulus >= r, counted with multiplicity.

    Includes the eigenvalue 1 whenever r <= 1.
    """
    if not (0.0 < r <= 1.0):
        raise ValueError("r must lie in (0, 1]")
    families = _family_moduli(model)
    total = 1
    total += 2 * _count_quadrant(families[0][0], families[0][1], r)
    g1, g2 = families[2]
    corner = g1 * g2
    if corner > 0.0:
        origin = 1 if corner >= r * (1.0 - _TIE_REL) else 0
        total += 2 * (origin + _count_quadrant(g1, g2, r / corner))
    return total


def leading_moduli(model: SpectrumModel, count: int):
    """Moduli of the largest `count` predicted eigenvalues, repeats expanded."""
    if count < 1:
        raise ValueError("count must be positive")
    cutoff = 1e-4
    while True:
        entries = enumerate_eigenvalues(model, cutoff)
        total = sum(e.multiplicity for e in entries)
        if total >= count:
            break
        if cutoff < 1e-280:
            raise ValueError("spectrum too sparse for the requested rank")
        cutoff *= 1e-2
    moduli = np.repeat(
        [abs(e.value) for e in entries], [e.multiplicity for e in entries]
    )
    return moduli[:count]


def fit_stretched_rate(moduli, lo_rank: int, hi_rank: int) -> Tuple[float, float]:
    """Affine fit of -log(modulus) against sqrt(rank) over a rank window.

    Ranks are 1-based positions in the modulus-sorted sequence; returns the
    fitted slope (the stretched-exponential rate) and the intercept.
    """
    moduli = np.asarray(moduli, dtype=float)
    if not (1 <= lo_rank < hi_rank <= len(moduli)):
        raise ValueError("rank window out of range")
    ranks = np.arange(lo_rank, hi_rank + 1, dtype=float)
    y = -np.log(moduli[lo_rank - 1 : hi_rank])
    slope, intercept = np.polyfit(np.sqrt(ranks), y, 1)
    return float(slope), float(intercept)


# ---------------------------------------------------------------------------
# Inclusion between two quadrant weights
# ---------------------------------------------------------------------------


def embedding_gaps(alpha, gamma, alpha_out, gamma_out) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Per-quadrant log-slope gaps of the inclusion between two weights.

    The target weight must grow strictly faster on same-sign quadrants
    (alpha_out > alpha) and fall strictly slower on mixed ones
    (gamma_out < gamma), otherwise the inclusion is not compact.
    """
    same = tuple(float(b) - float(a) for a, b in zip(alpha, alpha_out))
    mixed = tuple(float(a) - float(b) for a, b in zip(gamma, gamma_out))
    if min(same) <= 0.0 or min(mixed) <= 0.0:
        raise ValueError("weight gaps must be strictly positive")
    return same, mixed


def embedding_eta_formula(alpha, gamma, alpha_out, gamma_out) -> float:
    """Closed-form stretched-exponential rate of the inclusion singular values."""
    same, mixed = embedding_gaps(alpha, gamma, alpha_out, gamma_out)
    s = 1.0 / (same[0] * same[1]) + 1.0 / (mixed[0] * mixed[1])
    return s ** -0.5


def embedding_singular_values(alpha, gamma, alpha_out, gamma_out, band: int):
    """Singular values exp(-<gap, |n|>) over the L1 ball of radius `band`.

    Each Fourier mode n contributes one singular value, with the gap vector
    of the quadrant n falls in (axes count as same-sign, matching the sector
    convention of the standard-basis weight).  Returned sorted decreasing;
    the ball holds 2*band^2 + 2*band + 1 modes.
    """
    same, mixed = embedding_gaps(alpha, gamma, alpha_out, gamma_out)
    if band < 1:
        raise ValueError("band must be positive")
    out = []
    for n1 in range(-band, band + 1):
        for n2 in range(-band + abs(n1), band - abs(n1) + 1):
            same_sign = (n1 >= 0 and n2 >= 0) or (n1 <= 0 and n2 <= 0)
            g = same if same_sign else mixed
            out.append(-(g[0] * abs(n1) + g[1] * abs(n2)))
    out = np.exp(np.sort(np.array(out))[::-1])
    return out
