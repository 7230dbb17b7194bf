"""Oriented complex cubic rings with a fixed trace-zero form.

For a normalized indefinite form ``Q = (r, s, t)`` (``r, t > 0``) the lattice
``V^(Q)`` consists of integer pairs ``(b, c)`` with

    s b = r c (mod 3t),   s c = t b (mod 3r),   Q'(b, c) = t b^2 - s b c + r c^2 > 0,

and ``(b, c)`` gives the cubic form ``(a, b, c, d)`` with ``a = (sb - rc)/(3t)``,
``d = (sc - tb)/(3r)``.  ``SO_Q(Z)`` acts through ``v -> M^3 v`` and ``-1``;
the fundamental domain is ``1 <= ratio(v) < eps0^6``, ``x - theta_+ y > 0``
where ``ratio(x, y) = (x - theta_- y)/(x - theta_+ y)``.
"""

from __future__ import annotations

import functools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import ntheory
from .cubic_rings import BinaryCubicForm, act, classify_3, disc, hessian, is_irreducible, is_maximal, resolvent_disc
from .quad_geodesics import (
    BinaryQuadraticForm,
    GeodesicContext,
    QuadSurd,
    class_of_form,
    flow_coordinate,
    geodesic_context,
    improper_automorph,
    pell_fundamental,
    so_generator,
)
from .shape_core import field_of, reduce_to_gauss, shape_gram, shape_point

THREE_CLASS_NAMES = {"unramified_or_split": "unramified", "tame": "tame", "wild": "wild"}


class MembershipError(ValueError):
    pass


class PairingError(RuntimeError):
    pass


class LatticePoint(NamedTuple):
    b: int
    c: int
    a: int
    d: int
    Q: BinaryQuadraticForm

    @property
    def form(self) -> BinaryCubicForm:
        return BinaryCubicForm(self.a, self.b, self.c, self.d)


def _adjoint_value(Q, b, c) -> int:
    r, s, t = Q
    return t * b * b - s * b * c + r * c * c


def vq_membership(b: int, c: int, Q) -> tuple[bool, int | None, int | None]:
    r, s, t = Q
    if _adjoint_value(Q, b, c) * r * t <= 0:
        return False, None, None
    if (s * b - r * c) % (3 * abs(t)) or (s * c - t * b) % (3 * abs(r)):
        return False, None, None
    return True, (s * b - r * c) // (3 * t), (s * c - t * b) // (3 * r)


def delta_v(b: int, c: int, Q) -> int:
    r, s, t = Q
    D = s * s - 4 * r * t
    num = -(_adjoint_value(Q, b, c) ** 2) * D
    den = 3 * r * r * t * t
    if num % den:
        raise MembershipError(f"({b}, {c}) is not in V^(Q) for Q = {tuple(Q)}")
    return num // den


# -- exact cone geometry --------------------------------------------------


@dataclass(frozen=True)
class ConeContext:
    """Exact data for the fundamental domain of ``SO_Q(Z)`` on ``V^(Q)``."""

    Q: BinaryQuadraticForm
    D: int
    bound: QuadSurd  # eps0^6
    up: tuple  # matrix multiplying ratio by eps0^6
    down: tuple


def _matpow(g, n):
    out = ((1, 0), (0, 1))
    for _ in range(n):
        out = (
            (out[0][0] * g[0][0] + out[0][1] * g[1][0], out[0][0] * g[0][1] + out[0][1] * g[1][1]),
            (out[1][0] * g[0][0] + out[1][1] * g[1][0], out[1][0] * g[0][1] + out[1][1] * g[1][1]),
        )
    return out


def _apply(g, b, c):
    return g[0][0] * b + g[0][1] * c, g[1][0] * b + g[1][1] * c


@functools.lru_cache(maxsize=64)
def cone_context(Q: BinaryQuadraticForm) -> ConeContext:
    Q = BinaryQuadraticForm(*Q)
    if not (Q.r > 0 and Q.t > 0):
        raise ValueError(f"form {tuple(Q)} must be normalized with r, t > 0")
    D = Q.disc
    if D <= 0 or ntheory.is_square(D):
        raise ValueError(f"discriminant {D} must be a positive nonsquare")
    pell = pell_fundamental(D)
    M3 = _matpow(so_generator(Q, pell), 3)
    (p, q), (u, v) = M3
    M3inv = ((v, -q), (-u, p))
    ctx = ConeContext(Q, D, pell.eps0 ** 6, M3, M3inv)
    # orient the generator: the image of (1, 0) has ratio eps0^{+-6}
    if _ratio_float(ctx, *_apply(M3, 1, 0)) < 1:
        ctx = ConeContext(Q, D, ctx.bound, M3inv, M3)
    return ctx


def _uv(Q, D, b, c) -> tuple[QuadSurd, QuadSurd]:
    """``u = x - theta_+ y`` and ``v = x - theta_- y`` in Q(sqrt D)."""
    r, s, t = Q
    rat = Fraction(2 * t * b - s * c, 2 * t)
    irr = Fraction(c, 2 * t)
    return QuadSurd(rat, -irr, D), QuadSurd(rat, irr, D)


def _ratio_float(ctx: ConeContext, b, c) -> float:
    u, v = _uv(ctx.Q, ctx.D, b, c)
    return float(v) / float(u)


class RatioOrder(NamedTuple):
    vs_one: int  # sign(ratio - 1)
    vs_bound: int  # sign(ratio - bound)
    u_sign: int  # sign(x - theta_+ y)


def ratio_compare(b: int, c: int, Q, bound: QuadSurd | None = None) -> RatioOrder:
    Q = BinaryQuadraticForm(*Q)
    D = Q.disc
    if bound is None:
        bound = cone_context(Q).bound
    u, v = _uv(Q, D, b, c)
    su = u.sign()
    if su == 0:
        raise MembershipError("ratio is undefined at the origin")
    return RatioOrder((v - u).sign() * su, (v - bound * u).sign() * su, su)


def canonicalize(b: int, c: int, Q) -> LatticePoint:
    Q = BinaryQuadraticForm(*Q)
    ok, _, _ = vq_membership(b, c, Q)
    if not ok:
        raise MembershipError(f"({b}, {c}) is not in V^(Q) for Q = {tuple(Q)}")
    ctx = cone_context(Q)
    for _ in range(100_000):
        order = ratio_compare(b, c, Q, ctx.bound)
        if order.u_sign < 0:
            b, c = -b, -c
        elif order.vs_one < 0:
            b, c = _apply(ctx.up, b, c)
        elif order.vs_bound >= 0:
            b, c = _apply(ctx.down, b, c)
        else:
            _, a, d = vq_membership(b, c, Q)
            return LatticePoint(b, c, a, d, Q)
    raise ArithmeticError("canonicalization did not terminate")


# -- records ---------------------------------------------------------------


@dataclass(frozen=True)
class FieldRecord:
    form: tuple[int, int, int, int]
    point: tuple[int, int]
    disc: int
    resolvent_disc: int
    tzf: tuple[int, int, int]
    content: int
    shape: tuple[float, float]
    tau: float
    three_class: str | None
    maximal: bool
    class_id: str
    oriented: bool = True
    orientation: str = "+"
    flow_residual: float = 0.0
    irreducible: bool = True

    @property
    def hessian_content(self) -> int:
        return self.content

    @property
    def primitive_tzf(self) -> tuple[int, int, int]:
        return self.tzf

    @property
    def shape_float(self) -> tuple[float, float]:
        return self.shape

    def sort_key(self):
        return (abs(self.disc), self.point[0], self.point[1])

    def to_json(self) -> str:
        d = {
            "form": list(self.form),
            "point": list(self.point),
            "disc": self.disc,
            "resolvent_disc": self.resolvent_disc,
            "tzf": list(self.tzf),
            "content": self.content,
            "shape": list(self.shape),
            "tau": self.tau,
            "three_class": self.three_class,
            "maximal": self.maximal,
            "class_id": self.class_id,
            "oriented": self.oriented,
            "orientation": self.orientation,
            "flow_residual": self.flow_residual,
        }
        return json.dumps(d)

    @classmethod
    def from_json(cls, line: str) -> "FieldRecord":
        d = json.loads(line)
        return cls(
            form=tuple(d["form"]),
            point=tuple(d["point"]),
            disc=d["disc"],
            resolvent_disc=d["resolvent_disc"],
            tzf=tuple(d["tzf"]),
            content=d["content"],
            shape=tuple(d["shape"]),
            tau=d["tau"],
            three_class=d["three_class"],
            maximal=d["maximal"],
            class_id=d["class_id"],
            oriented=d.get("oriented", True),
            orientation=d.get("orientation", "+"),
            flow_residual=d.get("flow_residual", 0.0),
        )

    CSV_FIELDS = ("form", "point", "disc", "resolvent_disc", "tzf", "content", "shape", "tau",
                  "three_class", "maximal", "class_id", "oriented")

    def csv_row(self) -> list[str]:
        out = []
        for name in self.CSV_FIELDS:
            v = getattr(self, name)
            out.append(",".join(map(str, v)) if isinstance(v, tuple) else str(v))
        return out


def write_jsonl(records: Iterable[FieldRecord], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_jsonl(path) -> list[FieldRecord]:
    with open(path) as fh:
        return [FieldRecord.from_json(line) for line in fh if line.strip()]


@dataclass(frozen=True)
class WindowSet:
    """Disjoint half-open windows ``[lo, hi)`` inside ``[0, 1)``."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        ivs = sorted(self.intervals)
        for lo, hi in ivs:
            if not (0 <= lo < hi <= 1):
                raise ValueError(f"window [{lo}, {hi}) is not inside [0, 1)")
        for (_, h1), (l2, _) in zip(ivs, ivs[1:]):
            if l2 < h1:
                raise ValueError("windows overlap")
        object.__setattr__(self, "intervals", tuple(ivs))

    @classmethod
    def parse(cls, text: str) -> "WindowSet":
        ivs = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            lo, sep, hi = part.partition(":")
            if not sep:
                raise ValueError(f"window {part!r} is not of the form lo:hi")
            ivs.append((float(lo), float(hi)))
        return cls(tuple(ivs))

    def __contains__(self, tau: float) -> bool:
        return any(lo <= tau < hi for lo, hi in self.intervals)

    @property
    def measure(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)


@dataclass(frozen=True)
class ClassTag:
    class_id: str
    orientation: str


@functools.lru_cache(maxsize=64)
def class_tag(Q: BinaryQuadraticForm) -> ClassTag:
    qc, member = class_of_form(BinaryQuadraticForm(*Q))
    return ClassTag(qc.class_id, member.tag)


def build_record(point: LatticePoint, geo: GeodesicContext, tag: ClassTag, maximal_only: bool = False):
    """Full record for a canonical lattice point, or None if filtered out."""
    F = point.form
    if not is_irreducible(F):
        return None
    maximal = is_maximal(F)
    if maximal_only and not maximal:
        return None
    Q = point.Q
    D_F = disc(F)
    dv = delta_v(point.b, point.c, Q)
    if D_F != dv:
        raise AssertionError(f"disc mismatch for {tuple(F)}: {D_F} != {dv}")
    H = hessian(F)
    k = math.gcd(*H)
    if BinaryQuadraticForm(H.r // k, H.s // k, H.t // k) != Q:
        raise AssertionError(f"Hessian of {tuple(F)} is not a multiple of {tuple(Q)}")
    ctx = field_of(F)
    sp = shape_point(shape_gram(F, ctx))
    reduced, _ = reduce_to_gauss(sp)
    tau, residual = flow_coordinate(geo, complex(-sp.x_float, sp.y_float))
    three = THREE_CLASS_NAMES[classify_3(F)] if maximal else None
    return FieldRecord(
        form=tuple(F),
        point=(point.b, point.c),
        disc=D_F,
        resolvent_disc=resolvent_disc(F),
        tzf=tuple(Q),
        content=k,
        shape=(reduced.x_float, reduced.y_float),
        tau=tau,
        three_class=three,
        maximal=maximal,
        class_id=tag.class_id,
        orientation=tag.orientation,
        flow_residual=residual,
    )


def _x_bound(X) -> Fraction:
    X = Fraction(X)
    if X <= 0:
        raise ValueError("X must be positive")
    return X


def _disc_ok(Q, qp: int, X: Fraction) -> bool:
    """``|Delta| < X`` written as ``Q'^2 D < 3 r^2 t^2 X``."""
    r, s, t = Q
    return qp > 0 and qp * qp * Q.disc < 3 * r * r * t * t * X


def _row_progression(Q, y: int) -> tuple[int, int] | None:
    r, s, t = Q
    first = ntheory.solve_linear_congruence(s, r * y, 3 * t)
    second = ntheory.solve_linear_congruence(t, s * y, 3 * r)
    if first is None or second is None:
        return None
    return ntheory.crt_pair(first[0], first[1], second[0], second[1])


def _scan_rows(Q: BinaryQuadraticForm, X: Fraction, y_start: int, y_stop: int) -> list[tuple[int, int]]:
    """Canonical points ``(x, y)`` with ``y`` in ``[y_start, y_stop)``."""
    r, s, t = Q
    D = Q.disc
    ctx = cone_context(Q)
    sq = math.sqrt(D)
    th_p, th_m = (s + sq) / (2 * t), (s - sq) / (2 * t)
    E = float(ctx.bound)
    L = (E * th_p - th_m) / (E - 1)
    B = math.sqrt(3 * r * r * t * t * float(X) / D)
    out = []
    for y in range(y_start, y_stop):
        prog = _row_progression(Q, y)
        if prog is None:
            continue
        x0, m = prog
        root = math.sqrt(D * y * y + 4 * t * B)
        x_hi = (s * y + root) / (2 * t)
        x_lo = max(L * y, (s * y - root) / (2 * t))
        lo = math.floor(x_lo) - 1
        x = lo + (x0 - lo) % m
        top = math.ceil(x_hi) + 1
        while x <= top:
            qp = _adjoint_value(Q, x, y)
            if _disc_ok(Q, qp, X):
                order = ratio_compare(x, y, Q, ctx.bound)
                if order.u_sign > 0 and order.vs_one >= 0 and order.vs_bound < 0:
                    out.append((x, y))
            x += m
    return out


def _row_limit(Q: BinaryQuadraticForm, X: Fraction, lam: float) -> int:
    """Bound on ``y`` over ``{u > 0, 1 <= v/u <= lam, t u v <= B}``."""
    r, s, t = Q
    D = Q.disc
    K = math.sqrt(3 * r * r * float(X) / D)  # B / t
    # y = (v - u) t / sqrt(D) peaks at the corner u = sqrt(K/lam), v = sqrt(K lam)
    return int(math.floor((math.sqrt(K * lam) - math.sqrt(K / lam)) * t / math.sqrt(D))) + 2


def _records_for_points(args) -> list[FieldRecord]:
    Q, pts, maximal_only = args
    geo = geodesic_context(Q)
    tag = class_tag(Q)
    out = []
    for x, y in pts:
        _, a, d = vq_membership(x, y, Q)
        rec = build_record(LatticePoint(x, y, a, d, Q), geo, tag, maximal_only)
        if rec is not None:
            out.append(rec)
    return out


def _scan_job(args):
    Q, X, y0, y1, maximal_only = args
    return _records_for_points((Q, _scan_rows(Q, X, y0, y1), maximal_only))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CUBESHAPE_THREADS", "1")))
    except ValueError:
        return 1


def enumerate_oriented(Q, X, filters: str = "orders", threads: int | None = None) -> list[FieldRecord]:
    """One record per ``SO_Q(Z)``-orbit on ``V^(Q)`` with ``|Delta| < X``.

    ``filters`` is ``orders`` (all irreducible) or ``maximal_only``.
    Output is sorted by ``(|disc|, b, c)`` and independent of ``threads``.
    """
    Q = BinaryQuadraticForm(*Q)
    if filters not in ("orders", "maximal_only"):
        raise ValueError(f"unknown filter {filters!r}")
    X = _x_bound(X)
    cone_context(Q)  # validates Q
    maximal_only = filters == "maximal_only"
    E = float(cone_context(Q).bound)
    y_max = _row_limit(Q, X, E)
    threads = threads or default_threads()
    if threads <= 1:
        records = _scan_job((Q, X, 0, y_max + 1, maximal_only))
    else:
        n_chunks = 4 * threads
        edges = [round(i * (y_max + 1) / n_chunks) for i in range(n_chunks + 1)]
        jobs = [(Q, X, lo, hi, maximal_only) for lo, hi in zip(edges, edges[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = [rec for chunk in pool.map(_scan_job, jobs) for rec in chunk]
    return sorted(records, key=FieldRecord.sort_key)


def lattice_orbit_count(Q, X) -> int:
    """Number of ``SO_Q(Z)``-orbits on ``V^(Q)`` with ``|Delta| < X``.

    Counts every lattice point of the fundamental domain, reducible ones
    included; this is the quantity with main term ``C_D X^{1/2}``.
    """
    Q = BinaryQuadraticForm(*Q)
    X = _x_bound(X)
    y_max = _row_limit(Q, X, float(cone_context(Q).bound))
    return len(_scan_rows(Q, X, 0, y_max + 1))


def brute_force_oracle(Q, X, filters: str = "orders") -> list[FieldRecord]:
    """Independent enumeration: every point of ``0 < Q' <= B`` in a wide strip.

    All rows ``|y| <= Y`` are scanned, where the strip covers the cones
    ``eps0^{-9} < ratio < eps0^9`` of both signs; every member is
    canonicalized and duplicates are dropped.
    """
    Q = BinaryQuadraticForm(*Q)
    X = _x_bound(X)
    ctx = cone_context(Q)
    r, s, t = Q
    D = Q.disc
    E = float(ctx.bound)
    Y = _row_limit(Q, X, E ** 1.5)
    B = math.sqrt(3 * r * r * t * t * float(X) / D)
    ys = np.arange(-Y, Y + 1, dtype=np.int64)
    yf = ys.astype(float)
    root_b = np.sqrt(D * yf * yf + 4 * t * B)
    root_0 = math.sqrt(D) * np.abs(yf)
    # 0 < Q'(x, y) <= B splits into two intervals per row
    spans = [
        ((s * yf - root_b) / (2 * t), (s * yf - root_0) / (2 * t)),
        ((s * yf + root_0) / (2 * t), (s * yf + root_b) / (2 * t)),
    ]
    xs_all, ys_all = [], []
    for lo, hi in spans:
        lo_i = np.floor(lo).astype(np.int64) - 1
        hi_i = np.ceil(hi).astype(np.int64) + 1
        counts = hi_i - lo_i + 1
        rows = np.repeat(ys, counts)
        starts = np.repeat(lo_i, counts)
        offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        xs_all.append(starts + offsets)
        ys_all.append(rows)
    xs = np.concatenate(xs_all)
    yv = np.concatenate(ys_all)
    qp = t * xs * xs - s * xs * yv + r * yv * yv
    keep = (qp > 0) & ((s * xs - r * yv) % (3 * t) == 0) & ((s * yv - t * xs) % (3 * r) == 0)
    canon = set()
    for x, y in zip(xs[keep].tolist(), yv[keep].tolist()):
        if _disc_ok(Q, _adjoint_value(Q, x, y), X):
            p = canonicalize(x, y, Q)
            canon.add((p.b, p.c))
    recs = _records_for_points((Q, sorted(canon), filters == "maximal_only"))
    return sorted(recs, key=FieldRecord.sort_key)


# -- oriented -> unoriented ------------------------------------------------


@dataclass(frozen=True)
class UnorientedResult:
    records: tuple[FieldRecord, ...]
    count: int
    ambiguous: bool
    tau_center: float | None = None  # tau(partner) = center - tau (mod 1)

    def window_count(self, oriented: Sequence[FieldRecord], W: WindowSet) -> float:
        """``N(Q; X, W)`` from the oriented records."""
        if not self.ambiguous:
            return float(sum(1 for rec in oriented if rec.tau in W))
        c = self.tau_center or 0.0

        def in_tilde(tau):
            return tau in W or ((c - tau) % 1.0) in W

        return sum(1 for rec in oriented if in_tilde(rec.tau)) / 2


def partner_point(rec: FieldRecord, automorph) -> tuple[int, int]:
    """Canonical point of the oppositely oriented ring."""
    G = act(automorph, rec.form)
    p = canonicalize(G.b, G.c, BinaryQuadraticForm(*rec.tzf))
    return p.b, p.c


def to_unoriented(records: Sequence[FieldRecord], ambiguous: bool, Q=None) -> UnorientedResult:
    """Fields (not oriented rings) from the oriented records of ``[Q]_1``.

    In the ambiguous case each ring shows up twice, paired through an
    improper automorph of Q; one record of each pair is kept.
    """
    records = list(records)
    if not ambiguous:
        out = tuple(_unoriented(rec) for rec in records)
        return UnorientedResult(out, len(out), False)
    if len(records) % 2:
        raise PairingError(f"odd number ({len(records)}) of oriented records for an ambiguous class")
    if not records:
        return UnorientedResult((), 0, True)
    Q = BinaryQuadraticForm(*(Q or records[0].tzf))
    h = improper_automorph(Q)
    if h is None:
        raise ValueError(f"form {tuple(Q)} is not ambiguous")
    by_point = {rec.point: rec for rec in records}
    kept, seen = [], set()
    center = None
    for rec in records:
        if rec.point in seen:
            continue
        other = partner_point(rec, h)
        if other == rec.point:
            raise PairingError(f"record {rec.point} is its own mirror image (boundary shape)")
        if other not in by_point:
            raise PairingError(f"partner {other} of {rec.point} missing from the oriented records")
        seen.update((rec.point, other))
        kept.append(_unoriented(rec))
        c = (rec.tau + by_point[other].tau) % 1.0
        if center is None:
            center = c
        elif min(abs(c - center), 1 - abs(c - center)) > 1e-6:
            raise PairingError("tau values of mirror pairs are not related by a fixed involution")
    return UnorientedResult(tuple(kept), len(kept), True, center)


def _unoriented(rec: FieldRecord) -> FieldRecord:
    d = asdict(rec)
    d["oriented"] = False
    return FieldRecord(**d)
