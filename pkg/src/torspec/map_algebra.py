"""Finite words in the rational torus-map generators.

A map of the complex 2-torus is represented as a word in five generator atoms:

  * ``F``            -- the shear (z1, z2) -> (z1*z2, z2),
  * ``Finv``         -- its inverse (z1, z2) -> (z1/z2, z2),
  * ``R``            -- the coordinate swap,
  * ``I(k, l)``      -- componentwise inversions (z1^(1-2k), z2^(1-2l)), k, l in {0, 1},
  * ``G(a, b)``      -- componentwise disk automorphisms (b_a(z1), b_b(z2)) with
                        b_a(z) = (z - a) / (1 - conj(a) z) and |a|, |b| < 1.

Words are applied right to left: ``[F, R]`` is the map z -> F(R(z)).

Evaluation works on the extended coordinates (each component a complex number or
the point at infinity ``INF``); truly indeterminate configurations (0 * inf,
0/0, inf/inf) raise ``IndeterminatePointError`` naming the offending atom.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np


class WordSyntaxError(ValueError):
    """Raised when a word string cannot be parsed; carries the atom position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (atom {position})")
        self.position = position


class IndeterminatePointError(ValueError):
    """Raised when evaluation hits a genuine 0*inf / 0/0 / inf/inf configuration."""

    def __init__(self, message: str, atom_index: int):
        super().__init__(f"{message} (atom index {atom_index})")
        self.atom_index = atom_index


class PoleInChainError(ValueError):
    """Raised when a Jacobian chain passes through a pole or an infinite point.

    Callers that need derivatives at such points should first conjugate the word
    by an I(k, l) atom so every intermediate point of the chain is finite.
    """


class _Infinity:
    """Sentinel for the point at infinity on one coordinate sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()

ExtendedValue = Union[complex, _Infinity]
ExtendedPoint = Tuple[ExtendedValue, ExtendedValue]

_DISK_TOL = 1e-12


def _require_disk(value: complex, what: str) -> complex:
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"{what} must be finite, got {value!r}")
    if abs(value) >= 1.0 - _DISK_TOL:
        raise ValueError(f"{what} must lie strictly inside the unit disk, got {value!r}")
    return value


@dataclass(frozen=True)
class Atom:
    """One generator atom. ``kind`` is 'F', 'Finv', 'R', 'I', or 'G'."""

    kind: str
    k: int = 0
    l: int = 0
    a: complex = 0j
    b: complex = 0j

    def __post_init__(self):
        if self.kind not in ("F", "Finv", "R", "I", "G"):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == "I":
            if self.k not in (0, 1) or self.l not in (0, 1):
                raise ValueError("I(k, l) requires k, l in {0, 1}")
        if self.kind == "G":
            object.__setattr__(self, "a", _require_disk(self.a, "G parameter a"))
            object.__setattr__(self, "b", _require_disk(self.b, "G parameter b"))


def atom_F() -> Atom:
    return Atom("F")


def atom_Finv() -> Atom:
    return Atom("Finv")


def atom_R() -> Atom:
    return Atom("R")


def atom_I(k: int, l: int) -> Atom:
    return Atom("I", k=int(k), l=int(l))


def atom_G(a: complex, b: complex) -> Atom:
    return Atom("G", a=complex(a), b=complex(b))


@dataclass(frozen=True)
class MapWord:
    """A composition of atoms, applied right to left."""

    atoms: Tuple[Atom, ...]

    def __init__(self, atoms: Iterable[Atom] = ()):
        object.__setattr__(self, "atoms", tuple(atoms))
        for i, atom in enumerate(self.atoms):
            if not isinstance(atom, Atom):
                raise TypeError(f"atom {i} is not an Atom: {atom!r}")

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __getitem__(self, idx):
        return self.atoms[idx]

    def __str__(self):
        return word_to_text(self)


WordLike = Union[MapWord, Sequence[Atom]]


def _atoms(word: WordLike) -> Tuple[Atom, ...]:
    if isinstance(word, MapWord):
        return word.atoms
    return tuple(word)


@dataclass(frozen=True)
class TorusPoint:
    """A point of the unit 2-torus; the constructor checks |z1| = |z2| = 1."""

    z1: complex
    z2: complex

    def __post_init__(self):
        for name, z in (("z1", self.z1), ("z2", self.z2)):
            z = complex(z)
            if abs(abs(z) - 1.0) > 1e-9:
                raise ValueError(f"{name} must have modulus 1, got |{name}| = {abs(z)}")
            object.__setattr__(self, name, z)

    def as_tuple(self) -> Tuple[complex, complex]:
        return (self.z1, self.z2)

    @classmethod
    def from_angles(cls, x1: float, x2: float) -> "TorusPoint":
        return cls(cmath.exp(1j * x1), cmath.exp(1j * x2))


# ---------------------------------------------------------------------------
# Parsing and formatting
# ---------------------------------------------------------------------------

_ATOM_RE = re.compile(r"\s*([A-Za-z]+[01]{0,2})\s*(?:\((.*)\))?\s*$", re.S)

_NUMBER_FORBIDDEN = re.compile(r"[^0-9eEjJiI+\-.() ]")


def _parse_complex(token: str, position: int) -> complex:
    cleaned = token.strip()
    if not cleaned or _NUMBER_FORBIDDEN.search(cleaned):
        raise WordSyntaxError(f"bad numeric literal {token!r}", position)
    normalized = cleaned.replace(" ", "").replace("i", "j").replace("I", "J")
    try:
        value = complex(normalized)
    except ValueError:
        raise WordSyntaxError(f"bad numeric literal {token!r}", position) from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise WordSyntaxError(f"non-finite literal {token!r}", position)
    return value


def _parse_int(token: str, position: int) -> int:
    token = token.strip()
    if not re.fullmatch(r"[+-]?\d+", token):
        raise WordSyntaxError(f"expected an integer, got {token!r}", position)
    return int(token)


def _split_top_level(text: str) -> List[str]:
    parts: List[str] = []
    depth = 0
    current: List[str] = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise WordSyntaxError("unbalanced ')'", len(parts))
        if ch == "." and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise WordSyntaxError("unbalanced '('", len(parts))
    parts.append("".join(current))
    return parts


def _expand_sugar(name: str, args: List[str], position: int) -> List[Atom]:
    if name == "U":
        if len(args) != 2:
            raise WordSyntaxError("U takes (k, a)", position)
        k = _parse_int(args[0], position)
        a = _parse_complex(args[1], position)
        if k < 1:
            raise WordSyntaxError("U requires k >= 1", position)
        try:
            return [atom_G(0, a)] + [atom_F()] * k + [atom_R(), atom_G(-a, 0)]
        except ValueError as exc:
            raise WordSyntaxError(str(exc), position) from None
    if name == "W":
        if len(args) != 2:
            raise WordSyntaxError("W takes (k, a)", position)
        k = _parse_int(args[0], position)
        a = _parse_complex(args[1], position)
        if k < 1:
            raise WordSyntaxError("W requires k >= 1", position)
        try:
            return [atom_F()] * k + [atom_R(), atom_G(0, a)]
        except ValueError as exc:
            raise WordSyntaxError(str(exc), position) from None
    raise WordSyntaxError(f"unknown atom {name!r}", position)


def parse_word(text: str) -> MapWord:
    """Parse a word string such as ``"I11 . U(2, 0.5+0.1i) . U(1, -0.3)"``.

    Atoms are separated by ``.``; complex literals use ``i`` for the imaginary
    unit.  ``U(k, a)`` and ``W(k, a)`` are sugar expanding to their defining
    atom sequences.  Raises WordSyntaxError (with the atom position) on bad
    syntax and ValueError on parameters outside the open unit disk.
    """
    if not isinstance(text, str):
        raise TypeError("parse_word expects a string")
    if not text.strip():
        raise WordSyntaxError("empty word", 0)
    atoms: List[Atom] = []
    for position, chunk in enumerate(_split_top_level(text)):
        if not chunk.strip():
            raise WordSyntaxError("empty atom", position)
        match = _ATOM_RE.match(chunk)
        if match is None:
            raise WordSyntaxError(f"cannot parse atom {chunk.strip()!r}", position)
        name, argtext = match.group(1), match.group(2)
        args = [] if argtext is None else argtext.split(",")
        if name == "F" or name == "Finv" or name == "R":
            if argtext is not None:
                raise WordSyntaxError(f"{name} takes no arguments", position)
            atoms.append(Atom(name))
        elif name in ("I00", "I01", "I10", "I11"):
            if argtext is not None:
                raise WordSyntaxError(f"{name} takes no arguments", position)
            atoms.append(atom_I(int(name[1]), int(name[2])))
        elif name == "I":
            if len(args) != 2:
                raise WordSyntaxError("I takes (k, l)", position)
            k = _parse_int(args[0], position)
            l = _parse_int(args[1], position)
            if k not in (0, 1) or l not in (0, 1):
                raise WordSyntaxError("I(k, l) requires k, l in {0, 1}", position)
            atoms.append(atom_I(k, l))
        elif name == "G":
            if len(args) != 2:
                raise WordSyntaxError("G takes (a, b)", position)
            a = _parse_complex(args[0], position)
            b = _parse_complex(args[1], position)
            try:
                atoms.append(atom_G(a, b))
            except ValueError as exc:
                raise WordSyntaxError(str(exc), position) from None
        else:
            atoms.extend(_expand_sugar(name, args, position))
    return MapWord(atoms)


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def format_complex(value: complex) -> str:
    """Render a complex number in the word grammar (``re``, ``imi``, ``re+imi``)."""
    value = complex(value)
    if value.imag == 0.0:
        return _format_real(value.real)
    if value.real == 0.0:
        return _format_real(value.imag) + "i"
    sign = "+" if value.imag > 0 else "-"
    return f"{_format_real(value.real)}{sign}{_format_real(abs(value.imag))}i"


def word_to_text(word: WordLike) -> str:
    """Inverse of parse_word (up to sugar: U/W are written out as atoms)."""
    pieces = []
    for atom in _atoms(word):
        if atom.kind in ("F", "Finv", "R"):
            pieces.append(atom.kind)
        elif atom.kind == "I":
            pieces.append(f"I{atom.k}{atom.l}")
        else:
            pieces.append(f"G({format_complex(atom.a)},{format_complex(atom.b)})")
    return " . ".join(pieces)


# ---------------------------------------------------------------------------
# Extended-value arithmetic
# ---------------------------------------------------------------------------


def _is_inf(x: ExtendedValue) -> bool:
    return x is INF


def _ext_mul(x: ExtendedValue, y: ExtendedValue, atom_index: int) -> ExtendedValue:
    if _is_inf(x) or _is_inf(y):
        other = y if _is_inf(x) else x
        if not _is_inf(other) and other == 0:
            raise IndeterminatePointError("0 * inf is indeterminate", atom_index)
        return INF
    return x * y


def _ext_div(x: ExtendedValue, y: ExtendedValue, atom_index: int) -> ExtendedValue:
    if _is_inf(x) and _is_inf(y):
        raise IndeterminatePointError("inf / inf is indeterminate", atom_index)
    if _is_inf(x):
        return INF
    if _is_inf(y):
        return 0j
    if y == 0:
        if x == 0:
            raise IndeterminatePointError("0 / 0 is indeterminate", atom_index)
        return INF
    return x / y


def _ext_inv(x: ExtendedValue) -> ExtendedValue:
    if _is_inf(x):
        return 0j
    if x == 0:
        return INF
    return 1 / x


def blaschke(a: complex, z: ExtendedValue) -> ExtendedValue:
    """The disk automorphism b_a(z) = (z - a) / (1 - conj(a) z), extended to infinity."""
    a = complex(a)
    if _is_inf(z):
        if a == 0:
            return INF
        return -1 / a.conjugate()
    den = 1 - a.conjugate() * z
    if den == 0:
        return INF
    return (z - a) / den


def blaschke_deriv(a: complex, z: complex) -> complex:
    """b_a'(z) = (1 - |a|^2) / (1 - conj(a) z)^2 at a finite non-pole point."""
    a = complex(a)
    den = 1 - a.conjugate() * z
    return (1 - abs(a) ** 2) / (den * den)


def _apply_atom(atom: Atom, z: ExtendedPoint, atom_index: int) -> ExtendedPoint:
    z1, z2 = z
    if atom.kind == "F":
        return (_ext_mul(z1, z2, atom_index), z2)
    if atom.kind == "Finv":
        return (_ext_div(z1, z2, atom_index), z2)
    if atom.kind == "R":
        return (z2, z1)
    if atom.kind == "I":
        w1 = _ext_inv(z1) if atom.k == 1 else z1
        w2 = _ext_inv(z2) if atom.l == 1 else z2
        return (w1, w2)
    # G
    return (blaschke(atom.a, z1), blaschke(atom.b, z2))


def _as_extended(z) -> ExtendedPoint:
    if isinstance(z, TorusPoint):
        return z.as_tuple()
    z1, z2 = z
    z1 = z1 if _is_inf(z1) else complex(z1)
    z2 = z2 if _is_inf(z2) else complex(z2)
    return (z1, z2)


def evaluate(word: WordLike, z) -> ExtendedPoint:
    """Apply the word to an extended point, rightmost atom first."""
    atoms = _atoms(word)
    point = _as_extended(z)
    for offset, atom in enumerate(reversed(atoms)):
        point = _apply_atom(atom, point, len(atoms) - 1 - offset)
    return point


def inverse(word: WordLike) -> MapWord:
    """The inverse word: reversed atom order, each atom inverted."""
    out: List[Atom] = []
    for atom in reversed(_atoms(word)):
        if atom.kind == "F":
            out.append(atom_Finv())
        elif atom.kind == "Finv":
            out.append(atom_F())
        elif atom.kind == "G":
            out.append(atom_G(-atom.a, -atom.b))
        else:
            out.append(atom)  # R and I(k, l) are involutions
    return MapWord(out)


# ---------------------------------------------------------------------------
# Jacobians
# ---------------------------------------------------------------------------


def _finite(z: ExtendedValue, what: str) -> complex:
    if _is_inf(z):
        raise PoleInChainError(f"{what} is infinite; conjugate by I(k, l) first")
    return z


def _atom_complex_jacobian(atom: Atom, z: ExtendedPoint) -> np.ndarray:
    z1, z2 = z
    if atom.kind == "F":
        z1 = _finite(z1, "z1")
        z2 = _finite(z2, "z2")
        return np.array([[z2, z1], [0, 1]], dtype=complex)
    if atom.kind == "Finv":
        z1 = _finite(z1, "z1")
        z2 = _finite(z2, "z2")
        if z2 == 0:
            raise PoleInChainError("Finv differentiated at z2 = 0")
        return np.array([[1 / z2, -z1 / (z2 * z2)], [0, 1]], dtype=complex)
    if atom.kind == "R":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if atom.kind == "I":
        entries = []
        for bit, zc in ((atom.k, z1), (atom.l, z2)):
            if bit == 0:
                entries.append(1.0 + 0j)
            else:
                zc = _finite(zc, "coordinate")
                if zc == 0:
                    raise PoleInChainError("I(k, l) differentiated at 0")
                entries.append(-1 / (zc * zc))
        return np.diag(entries).astype(complex)
    # G
    z1 = _finite(z1, "z1")
    z2 = _finite(z2, "z2")
    for param, zc in ((atom.a, z1), (atom.b, z2)):
        if 1 - complex(param).conjugate() * zc == 0:
            raise PoleInChainError("G differentiated at a pole")
    return np.diag(
        [blaschke_deriv(atom.a, z1), blaschke_deriv(atom.b, z2)]
    ).astype(complex)


def complex_jacobian(word: WordLike, z) -> np.ndarray:
    """Exact chain-rule Jacobian d(word)/dz at a finite chain of points.

    Every intermediate point must be finite and off the atom poles; otherwise
    PoleInChainError is raised (conjugate by an I(k, l) chart first).
    """
    atoms = _atoms(word)
    point = _as_extended(z)
    jac = np.eye(2, dtype=complex)
    for offset, atom in enumerate(reversed(atoms)):
        index = len(atoms) - 1 - offset
        jac = _atom_complex_jacobian(atom, point) @ jac
        point = _apply_atom(atom, point, index)
    return jac


def moebius_lift(a: complex, theta: float) -> Tuple[float, float]:
    """Angular displacement of b_a on the circle and its derivative.

    Returns (g, g') with b_a(e^{i theta}) = e^{i (theta + g)} and
    d/dtheta arg b_a(e^{i theta}) = 1 + g'.  g' > -1 always.
    """
    a = complex(a)
    r = abs(a)
    if r == 0.0:
        return (0.0, 0.0)
    alpha = cmath.phase(a)
    c = math.cos(theta - alpha)
    s = math.sin(theta - alpha)
    g = 2.0 * math.atan2(r * s, 1.0 - r * c)
    gp = 2.0 * (r * c - r * r) / (1.0 - 2.0 * r * c + r * r)
    return (g, gp)


def _apply_atom_lifted(atom: Atom, x: Tuple[float, float]) -> Tuple[float, float]:
    x1, x2 = x
    if atom.kind == "F":
        return (x1 + x2, x2)
    if atom.kind == "Finv":
        return (x1 - x2, x2)
    if atom.kind == "R":
        return (x2, x1)
    if atom.kind == "I":
        return ((1 - 2 * atom.k) * x1, (1 - 2 * atom.l) * x2)
    g1, _ = moebius_lift(atom.a, x1)
    g2, _ = moebius_lift(atom.b, x2)
    return (x1 + g1, x2 + g2)


def evaluate_lifted(word: WordLike, x: Tuple[float, float]) -> Tuple[float, float]:
    """Apply the lifted (angle-coordinate) word to x in R^2."""
    point = (float(x[0]), float(x[1]))
    for atom in reversed(_atoms(word)):
        point = _apply_atom_lifted(atom, point)
    return point


def _atom_lifted_jacobian(atom: Atom, x: Tuple[float, float]) -> np.ndarray:
    if atom.kind == "F":
        return np.array([[1.0, 1.0], [0.0, 1.0]])
    if atom.kind == "Finv":
        return np.array([[1.0, -1.0], [0.0, 1.0]])
    if atom.kind == "R":
        return np.array([[0.0, 1.0], [1.0, 0.0]])
    if atom.kind == "I":
        return np.diag([1.0 - 2.0 * atom.k, 1.0 - 2.0 * atom.l])
    _, gp1 = moebius_lift(atom.a, x[0])
    _, gp2 = moebius_lift(atom.b, x[1])
    return np.diag([1.0 + gp1, 1.0 + gp2])


def lifted_jacobian(word: WordLike, x: Tuple[float, float]) -> np.ndarray:
    """Real 2x2 derivative of the lifted word at angle coordinates x."""
    point = (float(x[0]), float(x[1]))
    jac = np.eye(2)
    for atom in reversed(_atoms(word)):
        jac = _atom_lifted_jacobian(atom, point) @ jac
        point = _apply_atom_lifted(atom, point)
    return jac


# ---------------------------------------------------------------------------
# Algebraic structure
# ---------------------------------------------------------------------------

_ATOM_MATRIX = {
    "F": ((1, 1), (0, 1)),
    "Finv": ((1, -1), (0, 1)),
    "R": ((0, 1), (1, 0)),
}


def _atom_matrix(atom: Atom) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    if atom.kind in _ATOM_MATRIX:
        return _ATOM_MATRIX[atom.kind]
    if atom.kind == "I":
        return ((1 - 2 * atom.k, 0), (0, 1 - 2 * atom.l))
    return ((1, 0), (0, 1))  # G has trivial degree matrix


def _mat2_mul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def linear_part(word: WordLike) -> np.ndarray:
    """Exact integer degree matrix of the word (product over atoms in word order)."""
    acc = ((1, 0), (0, 1))
    for atom in _atoms(word):
        acc = _mat2_mul(acc, _atom_matrix(atom))
    if max(abs(v) for row in acc for v in row) >= 2 ** 62:
        raise OverflowError("degree matrix entries exceed the int64 range")
    return np.array(acc, dtype=np.int64)


def orientation(word: WordLike) -> int:
    """+1 if the word preserves orientation, -1 otherwise."""
    m = linear_part(word)
    det = int(m[0, 0]) * int(m[1, 1]) - int(m[0, 1]) * int(m[1, 0])
    if det == 0:
        raise ValueError("degenerate word: degree matrix is singular")
    return 1 if det > 0 else -1


def _merge_blaschke_params(a: complex, c: complex):
    """Parameter e with b_a(b_c(z)) = u * b_e(z), u unimodular; None unless u == 1.

    The composition law gives u = (1 + a conj(c)) / (1 + conj(a) c), so the merge
    keeps the plain b_e form only when a conj(c) is real.
    """
    u = 1 + a * c.conjugate()
    if u == 0:  # |a| = |c| < 1 rules this out, kept as a guard
        return None
    if abs(u.imag) > 1e-15 * abs(u):
        return None
    return (a + c) / (1 + a.conjugate() * c)


def _try_rewrite(atoms: List[Atom], i: int) -> bool:
    """Apply one local rewrite at position i (pair i, i+1); True if changed."""
    x = atoms[i]
    y = atoms[i + 1]
    if x.kind in ("F", "Finv") and y.kind == "I":
        if y.k != y.l:
            flipped = atom_Finv() if x.kind == "F" else atom_F()
            atoms[i : i + 2] = [y, flipped]
            return True
        if y.k == 1 and y.l == 1:
            atoms[i : i + 2] = [y, x]
            return True
    if x.kind == "R" and y.kind == "I":
        atoms[i : i + 2] = [atom_I(y.l, y.k), atom_R()]
        return True
    if x.kind == "G" and y.kind == "I":
        a = x.a.conjugate() if y.k == 1 else x.a
        b = x.b.conjugate() if y.l == 1 else x.b
        atoms[i : i + 2] = [y, atom_G(a, b)]
        return True
    if x.kind == "I" and y.kind == "I":
        k = 0 if x.k == y.k else 1
        l = 0 if x.l == y.l else 1
        atoms[i : i + 2] = [atom_I(k, l)]
        return True
    if x.kind == "G" and y.kind == "R":
        atoms[i : i + 2] = [atom_R(), atom_G(x.b, x.a)]
        return True
    if x.kind == "G" and y.kind == "G":
        ea = _merge_blaschke_params(x.a, y.a)
        eb = _merge_blaschke_params(x.b, y.b)
        if ea is not None and eb is not None:
            atoms[i : i + 2] = [atom_G(ea, eb)]
            return True
    return False


def _is_identity_atom(atom: Atom) -> bool:
    if atom.kind == "I" and atom.k == 0 and atom.l == 0:
        return True
    if atom.kind == "G" and atom.a == 0 and atom.b == 0:
        return True
    return False


def simplify(word: WordLike) -> MapWord:
    """Normalize a word using the exact commutation and merge relations.

    Identity atoms are dropped, I(k, l) factors migrate left and coalesce,
    R moves left past G, and adjacent G atoms merge when the composition is
    again a plain disk automorphism.  The result is pointwise equal to the
    input map.
    """
    atoms = [a for a in _atoms(word) if not _is_identity_atom(a)]
    budget = (len(atoms) + 2) ** 2 * 4
    changed = True
    while changed and budget > 0:
        changed = False
        i = 0
        while i + 1 < len(atoms):
            if _try_rewrite(atoms, i):
                changed = True
                budget -= 1
                atoms = [a for a in atoms if not _is_identity_atom(a)]
                i = max(i - 1, 0)
            else:
                i += 1
    return MapWord(atoms)


def concat(*words: WordLike) -> MapWord:
    """Concatenate words (composition in word order: leftmost applied last)."""
    out: List[Atom] = []
    for w in words:
        out.extend(_atoms(w))
    return MapWord(out)


def word_power(word: WordLike, n: int) -> MapWord:
    """The word repeated n times (inverse word repeated |n| times if n < 0)."""
    if n == 0:
        return MapWord(())
    base = _atoms(word) if n > 0 else _atoms(inverse(word))
    return MapWord(base * abs(n))


# ---------------------------------------------------------------------------
# Model families
# ---------------------------------------------------------------------------


def u_block(k: int, a: complex) -> List[Atom]:
    """The twisted-shear block (z1, z2) -> (b_{-a}(z1)^k z2, z1), as atoms."""
    if int(k) != k or k < 1:
        raise ValueError("u_block requires an integer k >= 1")
    return [atom_G(0, a)] + [atom_F()] * int(k) + [atom_R(), atom_G(-complex(a), 0)]


def w_block(k: int, a: complex) -> List[Atom]:
    """The block (z1, z2) -> (b_a(z2) z1^k, z1), as atoms."""
    if int(k) != k or k < 1:
        raise ValueError("w_block requires an integer k >= 1")
    return [atom_F()] * int(k) + [atom_R(), atom_G(0, complex(a))]


def psi_word(ks: Sequence[int], params: Sequence[complex], s: int = 0) -> MapWord:
    """Product of u-blocks, optionally prefixed by the antipode I11.

    ``ks`` are the shear exponents and ``params`` the disk parameters, one per
    block; block i is applied i-th from the right.
    """
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    ks = [int(k) for k in ks]
    params = [complex(a) for a in params]
    if len(ks) != len(params) or not ks:
        raise ValueError("need equally many exponents and parameters, at least one")
    atoms: List[Atom] = [atom_I(1, 1)] * s
    for k, a in zip(ks, params):
        atoms.extend(u_block(k, a))
    return MapWord(atoms)


def xi_word(ks: Sequence[int], a: complex, s: int = 0) -> MapWord:
    """Product of w-blocks with a single disk parameter on the last block."""
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    ks = [int(k) for k in ks]
    if len(ks) < 2:
        raise ValueError("need at least two blocks")
    atoms: List[Atom] = [atom_I(1, 1)] * s
    for k in ks[:-1]:
        atoms.extend(w_block(k, 0))
    atoms.extend(w_block(ks[-1], complex(a)))
    return MapWord(atoms)
