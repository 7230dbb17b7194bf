"""Indefinite binary quadratic forms and their closed geodesics.

Conventions: ``GL_2`` acts on forms by substitution, ``(g.Q)(x, y) = Q((x, y) g)``,
so ``g.(h.Q) = (g h).Q``.  On the upper half plane ``g.z`` is the Moebius
map (conjugating first when ``det g < 0``) and ``g * z := (g^{-1})^T . z``.
Forms used for geodesic work are normalized to ``r > 0, t > 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import ntheory

Matrix2 = tuple[tuple[int, int], tuple[int, int]]
IDENTITY: Matrix2 = ((1, 0), (0, 1))
W_REFLECT: Matrix2 = ((-1, 0), (0, 1))


class NotOnGeodesicError(ValueError):
    pass


class NormalizationError(RuntimeError):
    pass


def _det(g) -> int:
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def _mul(g, h):
    return (
        (g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
        (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]),
    )


def _inv(g):
    det = _det(g)
    if abs(det) != 1:
        raise ValueError("matrix is not unimodular")
    (a, b), (c, d) = g
    return ((d * det, -b * det), (-c * det, a * det))


class BinaryQuadraticForm(NamedTuple):
    r: int
    s: int
    t: int

    @classmethod
    def parse(cls, text: str) -> "BinaryQuadraticForm":
        from .cubic_rings import parse_int_literal

        return cls(*parse_int_literal(text, 3))

    @property
    def disc(self) -> int:
        return self.s * self.s - 4 * self.r * self.t

    def __call__(self, x, y):
        return self.r * x * x + self.s * x * y + self.t * y * y

    def act(self, g) -> "BinaryQuadraticForm":
        """``Q((x, y) g)``."""
        (g11, g12), (g21, g22) = g
        r, s, t = self
        return BinaryQuadraticForm(
            self(g11, g12),
            2 * r * g11 * g21 + s * (g11 * g22 + g12 * g21) + 2 * t * g12 * g22,
            self(g21, g22),
        )

    def adjoint(self) -> "BinaryQuadraticForm":
        return BinaryQuadraticForm(self.t, -self.s, self.r)

    def reflect(self) -> "BinaryQuadraticForm":
        """The form ``w.Q = Q(-x, y)``."""
        return BinaryQuadraticForm(self.r, -self.s, self.t)

    def content(self) -> int:
        return math.gcd(*self)

    def __str__(self) -> str:
        return f"{self.r},{self.s},{self.t}"


class QuadSurd:
    """Exact element ``x + y*sqrt(D)`` of Q(sqrt D), D a positive nonsquare."""

    __slots__ = ("x", "y", "D")

    def __init__(self, x, y, D: int):
        self.x = Fraction(x)
        self.y = Fraction(y)
        self.D = D

    def _chk(self, other):
        if isinstance(other, QuadSurd):
            if other.D != self.D:
                raise ValueError("surds over different fields")
            return other
        return QuadSurd(other, 0, self.D)

    def __add__(self, other):
        o = self._chk(other)
        return QuadSurd(self.x + o.x, self.y + o.y, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.x, -self.y, self.D)

    def __sub__(self, other):
        return self + (-self._chk(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._chk(other)
        return QuadSurd(self.x * o.x + self.D * self.y * o.y, self.x * o.y + self.y * o.x, self.D)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = QuadSurd(1, 0, self.D)
        for _ in range(n):
            out = out * self
        return out

    def sign(self) -> int:
        x, y = self.x, self.y
        sx = (x > 0) - (x < 0)
        sy = (y > 0) - (y < 0)
        if sy == 0 or sx == sy:
            return sx or sy
        if sx == 0:
            return sy
        return sx if x * x > y * y * self.D else sy

    def __float__(self):
        return float(self.x) + float(self.y) * math.sqrt(self.D)

    def __repr__(self):
        return f"QuadSurd({self.x} + {self.y}*sqrt({self.D}))"


# -- Pell ------------------------------------------------------------------


@dataclass(frozen=True)
class PellSolution:
    D: int
    U0: int
    W0: int
    eps0_float: float
    log_eps0: float

    @property
    def eps0(self) -> QuadSurd:
        return QuadSurd(Fraction(self.U0, 2), Fraction(self.W0, 2), self.D)


def _floor_surd(P: int, Q: int, D: int) -> int:
    """floor((P + sqrt D) / Q) for nonsquare D."""
    R = math.isqrt(D)
    if Q > 0:
        return (P + R) // Q
    return -((P + R) // -Q) - 1


def _pell4_pqa(D: int) -> tuple[int, int]:
    """Least U, W > 0 with U^2 - D W^2 = +-4, D = 0, 1 mod 4, via the
    continued fraction of (sigma + sqrt D)/2."""
    P0, Q0 = D % 2, 2
    P, Q = P0, Q0
    A2, A1, B2, B1 = 0, 1, 1, 0
    for _ in range(10 * (D + 10)):
        a = _floor_surd(P, Q, D)
        A2, A1 = A1, a * A1 + A2
        B2, B1 = B1, a * B1 + B2
        P = a * Q - P
        Q = (D - P * P) // Q
        G = Q0 * A1 - P0 * B1
        if abs(Q) == Q0 and B1 > 0 and G > 0 and abs(G * G - D * B1 * B1) == 4:
            return G, B1
    raise ArithmeticError(f"continued fraction for D = {D} did not close")


def pell_fundamental(D: int) -> PellSolution:
    """Minimal ``(U0, W0)`` with ``U0^2 - D W0^2 = 4`` and ``W0 > 0``."""
    if D <= 0 or ntheory.is_square(D):
        raise ValueError(f"D = {D} must be a positive nonsquare")
    if D % 4 in (2, 3):
        # U, W are forced even: halve the solution for 4D
        U, W = _pell4_pqa(4 * D)
        W *= 2
    else:
        U, W = _pell4_pqa(D)
    if U * U - D * W * W == -4:
        U, W = (U * U + D * W * W) // 2, U * W
    if U * U - D * W * W != 4:
        raise ArithmeticError(f"Pell verification failed for D = {D}")
    eps = (U + W * math.sqrt(D)) / 2
    # log((U + W sqrt D)/2) stably for large solutions
    log_eps = math.log(U + W * math.sqrt(D)) - math.log(2) if eps < 1e300 else _big_log(U, W, D)
    return PellSolution(D, U, W, eps, log_eps)


def _big_log(U: int, W: int, D: int) -> float:
    return math.log(2 * U) - math.log(2)  # W sqrt D ~ U when U is huge


def so_generator(Q: BinaryQuadraticForm, pell: PellSolution | None = None) -> Matrix2:
    """``M(U0, W0)``, a generator of SO_Q(Z) modulo -1."""
    pell = pell or pell_fundamental(Q.disc)
    return so_matrix(Q, pell.U0, pell.W0)


def so_matrix(Q: BinaryQuadraticForm, U: int, W: int) -> Matrix2:
    r, s, t = Q
    if (U - s * W) % 2:
        raise ValueError("U and s*W must have equal parity")
    return (((U - s * W) // 2, r * W), (-t * W, (U + s * W) // 2))


# -- reduction theory ------------------------------------------------------


def _check_indefinite(Q: BinaryQuadraticForm) -> int:
    D = Q.disc
    if D <= 0 or ntheory.is_square(D):
        raise ValueError(f"form {tuple(Q)} does not have positive nonsquare discriminant (D = {D})")
    return D


def is_reduced(Q: BinaryQuadraticForm) -> bool:
    R = math.isqrt(Q.disc)
    r, s, t = Q
    return 0 < s <= R and 2 * abs(r) + s >= R + 1 and 2 * abs(r) - s <= R


def rho_step(Q: BinaryQuadraticForm) -> tuple[BinaryQuadraticForm, Matrix2]:
    """One reduction step ``(r, s, t) -> (t, s', .)`` and its SL_2 matrix."""
    D = Q.disc
    R = math.isqrt(D)
    r, s, t = Q
    m = 2 * abs(t)
    if t * t > D:
        lo = -abs(t) + 1
    else:
        lo = R + 1 - m
    s2 = lo + ((-s - lo) % m)
    k = (s2 + s) // (2 * t)
    g = ((0, 1), (-1, k))
    # (x, y) g = (-y, x + k y)
    Q2 = Q.act(g)
    assert Q2.r == t and Q2.s == s2, (Q, Q2)
    return Q2, g


def reduce_form(Q: BinaryQuadraticForm) -> tuple[BinaryQuadraticForm, Matrix2]:
    """A reduced form ``G.Q`` properly equivalent to Q, with ``G``."""
    _check_indefinite(Q)
    G = IDENTITY
    for _ in range(10_000 + Q.r.bit_length() + Q.t.bit_length()):
        if is_reduced(Q):
            return Q, G
        Q, g = rho_step(Q)
        G = _mul(g, G)
    raise ArithmeticError("reduction did not terminate")


def _cycle_with_matrices(R0: BinaryQuadraticForm) -> list[tuple[BinaryQuadraticForm, Matrix2]]:
    out = [(R0, IDENTITY)]
    Q, C = R0, IDENTITY
    while True:
        Q, g = rho_step(Q)
        C = _mul(g, C)
        if Q == R0:
            return out
        out.append((Q, C))


def reduce_indefinite_cycle(Q: BinaryQuadraticForm) -> list[BinaryQuadraticForm]:
    """The cycle of reduced forms properly equivalent to Q."""
    R0, _ = reduce_form(Q)
    return [f for f, _ in _cycle_with_matrices(R0)]


def equivalence_matrix(Q1: BinaryQuadraticForm, Q2: BinaryQuadraticForm) -> Matrix2 | None:
    """``g`` in SL_2(Z) with ``g.Q1 = Q2``, or None."""
    if Q1.disc != Q2.disc:
        return None
    R1, G1 = reduce_form(Q1)
    R2, G2 = reduce_form(Q2)
    for f, C in _cycle_with_matrices(R1):
        if f == R2:
            return _mul(_inv(G2), _mul(C, G1))
    return None


def equivalent(Q1: BinaryQuadraticForm, Q2: BinaryQuadraticForm, mode: str = "proper") -> bool:
    if Q1.disc != Q2.disc:
        return False
    candidates = [Q2]
    if mode in ("gl2", "improper_allowed"):
        candidates.append(Q2.reflect())
    if mode == "improper_allowed":
        # Q and -Q share a geodesic; they are grouped into one class
        candidates += [_negate(f) for f in candidates]
    elif mode not in ("proper", "gl2"):
        raise ValueError(f"unknown mode {mode!r}")
    return any(equivalence_matrix(Q1, f) is not None for f in candidates)


def is_ambiguous(Q: BinaryQuadraticForm) -> bool:
    return equivalence_matrix(Q, Q.reflect()) is not None


def improper_automorph(Q: BinaryQuadraticForm) -> Matrix2 | None:
    """A determinant -1 matrix fixing Q, if Q is ambiguous."""
    g = equivalence_matrix(Q.reflect(), Q)
    if g is None:
        return None
    return _mul(g, W_REFLECT)


def _rep_key(Q: BinaryQuadraticForm):
    return (abs(Q.r), Q.r > 0, -Q.s, abs(Q.t), Q.t > 0)


@dataclass(frozen=True)
class OrientedClass:
    """One SL_2(Z)-class inside a geodesic class.

    ``tag`` records how ``representative`` relates to the class
    representative ``Q``: ``+`` (Q), ``w`` (wQ), ``-`` (-Q) or ``-w`` (-wQ).
    """

    class_id: str
    representative: BinaryQuadraticForm
    tag: str
    ambiguous: bool

    @property
    def oriented_id(self) -> str:
        return f"{self.class_id}{self.tag}"


@dataclass(frozen=True)
class QuadClass:
    """Primitive forms of discriminant D up to GL_2(Z) and sign.

    ``Q`` and ``-Q`` cut out the same geodesic, so they are grouped; the
    SL_2(Z)-classes inside are listed in ``members``.  ``ambiguous`` means
    ``[Q]_1 = [wQ]_1``.
    """

    representative: BinaryQuadraticForm
    ambiguous: bool
    index: int
    D: int
    members: tuple[OrientedClass, ...] = field(default=())

    @property
    def class_id(self) -> str:
        return f"D{self.D}#{self.index}"


def _validate_disc(D: int) -> None:
    if D <= 0 or ntheory.is_square(D) or D % 4 not in (0, 1):
        raise ValueError(f"invalid discriminant {D}: need positive nonsquare D = 0, 1 mod 4")


def reduced_forms_of_disc(D: int) -> list[BinaryQuadraticForm]:
    """All primitive reduced forms of discriminant D."""
    _validate_disc(D)
    R = math.isqrt(D)
    out = []
    for s in range(1, R + 1):
        if (s - D) % 2:
            continue
        N = (D - s * s) // 4
        for m in ntheory.divisors(N):
            for r in (m, -m):
                Q = BinaryQuadraticForm(r, s, -N // r)
                if Q.content() == 1 and is_reduced(Q):
                    out.append(Q)
    return sorted(out)


def _negate(Q: BinaryQuadraticForm) -> BinaryQuadraticForm:
    return BinaryQuadraticForm(-Q.r, -Q.s, -Q.t)


def gl2_classes(D: int) -> list[QuadClass]:
    forms = reduced_forms_of_disc(D)
    cycle_of: dict[BinaryQuadraticForm, int] = {}
    cycles: list[list[BinaryQuadraticForm]] = []
    for f in forms:
        if f in cycle_of:
            continue
        cyc = reduce_indefinite_cycle(f)
        for g in cyc:
            cycle_of[g] = len(cycles)
        cycles.append(cyc)

    def which(Q):
        return cycle_of[reduce_form(Q)[0]]

    groups: list[list[int]] = []
    placed: set[int] = set()
    for i, cyc in enumerate(cycles):
        if i in placed:
            continue
        Q = cyc[0]
        grp = []
        for img in (Q, Q.reflect(), _negate(Q), _negate(Q.reflect())):
            j = which(img)
            if j not in grp:
                grp.append(j)
        placed.update(grp)
        groups.append(grp)

    reps = []
    for grp in groups:
        rep = min((f for j in grp for f in cycles[j]), key=_rep_key)
        reps.append((rep, grp))
    reps.sort(key=lambda rg: _rep_key(rg[0]))

    out = []
    for k, (rep, grp) in enumerate(reps):
        cid = f"D{D}#{k + 1}"
        amb = which(rep.reflect()) == which(rep)
        members = []
        seen: set[int] = set()
        for tag, img in (("+", rep), ("w", rep.reflect()), ("-", _negate(rep)), ("-w", _negate(rep.reflect()))):
            j = which(img)
            if j not in seen:
                seen.add(j)
                members.append(OrientedClass(cid, img, tag, amb))
        out.append(QuadClass(rep, amb, k + 1, D, tuple(members)))
    return out


def classes_of_disc(D: int) -> list[tuple[BinaryQuadraticForm, bool]]:
    return [(c.representative, c.ambiguous) for c in gl2_classes(D)]


def sl2_classes(D: int) -> list[OrientedClass]:
    return [m for c in gl2_classes(D) for m in c.members]


def class_of_form(Q: BinaryQuadraticForm) -> tuple[QuadClass, OrientedClass]:
    """Locate a primitive form among the classes of its discriminant."""
    g = Q.content()
    Q = BinaryQuadraticForm(Q.r // g, Q.s // g, Q.t // g)
    for c in gl2_classes(Q.disc):
        for m in c.members:
            if equivalence_matrix(m.representative, Q) is not None:
                return c, m
    raise AssertionError(f"form {tuple(Q)} not found among reduced classes")


def _positive_translates(Q: BinaryQuadraticForm, G: Matrix2, kmax: int):
    """Smallest translates of Q (in either variable) with r, t > 0."""
    for kk in sorted(range(-kmax, kmax + 1), key=lambda k: (abs(k), k < 0)):
        for g in (((1, 0), (kk, 1)), ((1, kk), (0, 1))):
            Q2 = Q.act(g)
            if Q2.r > 0 and Q2.t > 0:
                yield Q2, _mul(g, G)


def normalize_rep(Q: BinaryQuadraticForm) -> tuple[BinaryQuadraticForm, Matrix2]:
    """Properly equivalent ``Q' = G.Q`` with ``r' > 0`` and ``t' > 0``.

    Searches the reduced cycle plus small translations and keeps the
    candidate with the smallest ``r + t``.  Q itself is kept if already
    positive.
    """
    _check_indefinite(Q)
    if Q.r > 0 and Q.t > 0:
        return Q, IDENTITY
    R0, G0 = reduce_form(Q)
    kmax = 2 * math.isqrt(Q.disc) + 2
    best = None
    for f, C in _cycle_with_matrices(R0):
        for cand in _positive_translates(f, _mul(C, G0), kmax):
            key = (cand[0].r + cand[0].t, abs(cand[0].s), cand[0].s < 0, tuple(cand[0]))
            if best is None or key < best[0]:
                best = (key, cand)
    if best is None:
        raise NormalizationError(f"bounded search found no representative with r, t > 0 for {tuple(Q)}")
    Q2, G = best[1]
    assert Q.act(G) == Q2
    return Q2, G


# -- geodesics -------------------------------------------------------------


def mobius(g, z: complex) -> complex:
    (a, b), (c, d) = g
    if a * d - b * c < 0:
        z = z.conjugate()
    return (a * z + b) / (c * z + d)


def star(g, z: complex) -> complex:
    """``g * z = (g^{-1})^T . z``."""
    (a, b), (c, d) = g
    det = a * d - b * c
    inv_t = ((d / det, -c / det), (-b / det, a / det))
    return mobius(inv_t, z)


def gauss_reduce_float(z: complex, *, oriented: bool = False) -> complex:
    """Move ``z`` into the Gauss domain (``|x| <= 1/2`` if ``oriented``)."""
    for _ in range(10_000):
        z = complex(z.real - math.floor(z.real + 0.5), z.imag)
        if abs(z) < 1 - 1e-15:
            z = -1 / z
            continue
        break
    if not oriented and z.real < 0:
        z = complex(-z.real, z.imag)
    return z


@dataclass(frozen=True)
class GeodesicContext:
    Q: BinaryQuadraticForm
    pell: PellSolution
    theta_plus: float
    theta_minus: float
    rho_plus: float
    rho_minus: float
    period: float

    @property
    def D(self) -> int:
        return self.Q.disc

    def to_flow_plane(self, zeta: complex) -> complex:
        """``P^T . zeta``; sends the geodesic to the positive imaginary axis."""
        return (self.theta_plus * zeta + 1) / (self.theta_minus * zeta + 1)

    def from_flow_plane(self, w: complex) -> complex:
        return (w - 1) / (self.theta_plus - self.theta_minus * w)


def geodesic_context(Q: BinaryQuadraticForm) -> GeodesicContext:
    D = _check_indefinite(Q)
    if not (Q.r > 0 and Q.t > 0):
        raise ValueError(f"form {tuple(Q)} must be normalized with r, t > 0")
    r, s, t = Q
    sq = math.sqrt(D)
    pell = pell_fundamental(D)
    return GeodesicContext(
        Q=Q,
        pell=pell,
        theta_plus=(s + sq) / (2 * t),
        theta_minus=(s - sq) / (2 * t),
        rho_plus=(-s + sq) / (2 * r),
        rho_minus=(-s - sq) / (2 * r),
        period=2 * pell.log_eps0,
    )


def flow_coordinate(ctx: GeodesicContext, z: complex, tol: float = 1e-6) -> tuple[float, float]:
    """Position ``tau`` in [0, 1) of a point on the geodesic, and its residual."""
    w = ctx.to_flow_plane(complex(z))
    residual = abs(w.real) / abs(w)
    if residual > tol or w.imag <= 0:
        raise NotOnGeodesicError(f"point {z} is off the geodesic of {tuple(ctx.Q)} (residual {residual:.3g})")
    u = math.log(w.imag)
    tau = (u % ctx.period) / ctx.period
    if tau >= 1.0:
        tau = 0.0
    return tau, residual


def geodesic_point(ctx: GeodesicContext, tau: float) -> complex:
    return ctx.from_flow_plane(1j * math.exp(tau * ctx.period))


def geodesic_arc_samples(ctx: GeodesicContext, n: int) -> list[complex]:
    """``n`` points spread over one period, reduced into the Gauss domain."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    return [gauss_reduce_float(geodesic_point(ctx, k / n)) for k in range(n)]


def tau_involution_center(ctx: GeodesicContext, g: Matrix2) -> float:
    """``c`` with ``tau(g * zeta) = c - tau(zeta) (mod 1)`` for an improper automorph g."""
    z0 = geodesic_point(ctx, 0.0)
    tau1, _ = flow_coordinate(ctx, star(g, z0))
    return tau1
