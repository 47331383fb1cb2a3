"""Evaluation of the closed-form bounds on excluded-minor size.

Small values are exact integers. Values whose size exceeds the digit budget
are carried as rigorous intervals on log2(value), computed with mpmath's
interval arithmetic at a fixed working precision, so repeated evaluations
are bit-for-bit identical. Irrational factors (sqrt 2, sqrt g) enter as
exact shifts in log space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import mpmath
from mpmath import iv

from .errors import InputError, PreconditionError

Q = Fraction(1153, 1152)
DEFAULT_PREC = 256
DIGIT_BUDGET = 4000


def floor_log_q(x: Fraction | int, q: Fraction | int = Q) -> int:
    """Largest n with q**n <= x, by exact rational repeated squaring."""
    x, q = Fraction(x), Fraction(q)
    if q <= 1:
        raise PreconditionError("base must exceed 1")
    if x < 1:
        raise PreconditionError("floor_log_q needs x >= 1")
    # unreduced numerator/denominator pairs: squaring without gcd work
    xn, xd = x.numerator, x.denominator
    powers = [(q.numerator, q.denominator)]  # q^(2^i)
    while powers[-1][0] * xd <= xn * powers[-1][1]:
        a, b = powers[-1]
        powers.append((a * a, b * b))
    n, an, ad = 0, 1, 1
    for i in range(len(powers) - 1, -1, -1):
        pn, pd = powers[i]
        cn, cd = an * pn, ad * pd
        if cn * xd <= xn * cd:
            an, ad = cn, cd
            n += 1 << i
    return n


def clique_euler_genus(k: int) -> int:
    """Euler genus of K_k: ceil((k-3)(k-4)/6)."""
    if k < 3:
        raise PreconditionError("clique genus formula needs k >= 3")
    return -(-(k - 3) * (k - 4) // 6)


def lower_bound_L(g: int) -> tuple[int, int]:
    """(L(g), H(g)) with L(g) = floor((7 + sqrt(1 + 24g)) / 2) + 1 and H = L - 1."""
    if g < 0:
        raise PreconditionError("genus must be nonnegative")
    # floor((7 + y) / 2) only depends on floor(y)
    heawood = (7 + isqrt(1 + 24 * g)) // 2
    return heawood + 1, heawood


@lru_cache(maxsize=4096)
def m_of(g: int) -> int:
    return 2 * (floor_log_q(3 * g + 4) + 2)


def g_tilde(g: int) -> int:
    return 4 * (6 * g + 7)


def T_S(g: int) -> int:
    return 3 * (g + 3) ** 2 * (3 * g + 16) - 3


def T_of(g: int) -> int:
    return 264 * (g + 2) * (m_of(g) + 1) - 1


# ---------------------------------------------------------------------------
# log-space values


class _V:
    """A positive value: exact rational when small, else a log2 interval."""

    __slots__ = ("x", "lg")

    def __init__(self, x: Fraction | int | None = None, lg=None) -> None:
        if x is not None:
            x = Fraction(x)
            if x <= 0:
                raise PreconditionError("log-space values must be positive")
            if _bits(x) > DIGIT_BUDGET * 3.33:
                lg = _lg_exact(x)
                x = None
        if x is None and lg is None:
            raise ValueError("empty value")
        self.x = x
        self.lg = lg if lg is not None else _lg_exact(x)

    @property
    def exact(self) -> bool:
        return self.x is not None

    def value_interval(self):
        """Interval for the value itself (possibly with a huge exponent)."""
        if self.x is not None:
            return iv.mpf(self.x.numerator) / self.x.denominator
        return iv.mpf(2) ** self.lg

    def __mul__(self, o: _V) -> _V:
        if self.exact and o.exact:
            return _V(self.x * o.x)
        return _V(lg=self.lg + o.lg)

    def __truediv__(self, o: _V) -> _V:
        if self.exact and o.exact:
            return _V(self.x / o.x)
        return _V(lg=self.lg - o.lg)

    def __add__(self, o: _V) -> _V:
        if self.exact and o.exact:
            return _V(self.x + o.x)
        a, b = (self, o) if _mid(self.lg) >= _mid(o.lg) else (o, self)
        return _V(lg=a.lg + iv.log(1 + iv.mpf(2) ** (b.lg - a.lg), 2))

    def __sub__(self, o: _V) -> _V:
        if self.exact and o.exact:
            return _V(self.x - o.x)
        d = o.lg - self.lg
        if mpmath.mpf(d.b) >= 0:
            raise PreconditionError("cannot certify a positive difference")
        return _V(lg=self.lg + iv.log(1 - iv.mpf(2) ** d, 2))

    def __pow__(self, k: _V) -> _V:
        if self.exact and k.exact and k.x.denominator == 1 and \
                _bits(self.x) * k.x <= DIGIT_BUDGET * 3.33:
            return _V(self.x ** int(k.x))
        return _V(lg=k.value_interval() * self.lg)

    def scale_log(self, shift) -> _V:
        """Multiply by 2**shift for an interval shift (exact algebraic factors)."""
        return _V(lg=self.lg + shift)

    def ceil_log2(self) -> _V:
        if self.exact:
            x = self.x
            n = -(-x.numerator // x.denominator)
            return _V((n - 1).bit_length())
        inner = self.lg + iv.mpf([0, 1])
        return _V(lg=iv.log(inner, 2))


def _bits(x: Fraction) -> int:
    return max(x.numerator.bit_length(), x.denominator.bit_length())


def _lg_exact(x: Fraction):
    return iv.log(iv.mpf(x.numerator), 2) - iv.log(iv.mpf(x.denominator), 2)


def _mid(i):
    return mpmath.mpf(i.mid)


def _n(k: int | Fraction) -> _V:
    return _V(k)


# ---------------------------------------------------------------------------
# public types


@dataclass(frozen=True)
class BoundParams:
    g: int
    w: int | None = None
    A: Fraction = Fraction(1)
    A_prime: Fraction = Fraction(1)
    i: int | None = None
    ell: int | None = None
    delta_variant: str = "theorem"

    def __post_init__(self) -> None:
        if self.g < 0:
            raise InputError("g must be nonnegative")
        if self.A <= 0 or self.A_prime <= 0:
            raise InputError("A and A' must be positive")
        if self.delta_variant not in ("theorem", "lemma"):
            raise InputError("delta_variant is 'theorem' or 'lemma'")

    @property
    def conventional_constants(self) -> bool:
        return self.A == 1 and self.A_prime == 1


@dataclass(frozen=True)
class BigBound:
    """Exact integer, log2 interval, or tower 2^(2^k)."""

    name: str
    exact: int | None = None
    log2_lo: mpmath.mpf | None = None
    log2_hi: mpmath.mpf | None = None
    tower: int | None = None
    note: str = ""
    params: BoundParams | None = field(default=None, compare=False)
    prec: int = DEFAULT_PREC

    @property
    def kind(self) -> str:
        if self.tower is not None:
            return "tower"
        return "exact" if self.exact is not None else "log2-interval"

    def log2_interval(self):
        if self.exact is not None:
            return _lg_exact(Fraction(self.exact))
        if self.tower is not None:
            return iv.mpf(2) ** self.tower
        return iv.mpf([self.log2_lo, self.log2_hi])

    def relative_width(self) -> float:
        if self.exact is not None:
            return 0.0
        if self.tower is not None:
            return 0.0
        return float((self.log2_hi - self.log2_lo) / abs(self.log2_lo))

    def to_row(self) -> dict:
        row = {"name": self.name, "kind": self.kind, "note": self.note}
        if self.exact is not None:
            row["value"] = str(self.exact)
            row["digits"] = len(str(self.exact))
        elif self.tower is not None:
            row["tower_k"] = str(self.tower)
        else:
            row["log2_lo"] = mpmath.nstr(self.log2_lo, 25)
            row["log2_hi"] = mpmath.nstr(self.log2_hi, 25)
            row["digits_approx"] = mpmath.nstr(self.log2_lo * mpmath.log10(2), 12)
        if self.params is not None:
            row["g"] = self.params.g
        return row


def _wrap(name: str, v: _V, params: BoundParams, prec: int, note: str = "") -> BigBound:
    if v.exact:
        if v.x.denominator != 1:
            raise AssertionError(f"{name} evaluated to a non-integer")
        return BigBound(name, exact=int(v.x), note=note, params=params, prec=prec)
    return BigBound(name, log2_lo=mpmath.mpf(v.lg.a), log2_hi=mpmath.mpf(v.lg.b),
                    note=note, params=params, prec=prec)


class _Formulas:
    def __init__(self, p: BoundParams) -> None:
        self.p = p
        self.g = p.g
        self.m = m_of(p.g)
        self.gt = g_tilde(p.g)

    def delta(self, variant: str) -> _V:
        m, gt = self.m, self.gt
        if variant == "theorem":
            # 2m (gt+1)^4 (4m (gt+1)^2)^(m^2)
            base = _n(4 * m * (gt + 1) ** 2)
            return _n(2 * m * (gt + 1) ** 4) * (base ** _n(m * m))
        # 4m (gt+1)^4 (4 sqrt2 m (gt+1)^2)^(m^2)
        return _n(4 * m * (gt + 1) ** 4) * (self.f_base() ** _n(m * m))

    def f_base(self) -> _V:
        return _n(4 * self.m * (self.gt + 1) ** 2).scale_log(iv.mpf(1) / 2)

    def f(self, i: int) -> _V:
        return self.f_base() ** _n(i * i)

    def P(self, w: _V) -> _V:
        d = self.delta(self.p.delta_variant)
        geometric = d * (d ** _n(2 * self.m) - _n(1)) / (d - _n(1))
        return geometric * _n(2) * w + w + _n(2)

    def P_prime(self, w: _V) -> _V:
        return _n(2 * self.m * (3 * self.g + 3) + 1) * self.P(w) - _n(1)

    def delta_T(self, w: _V) -> _V:
        if self.g == 0:
            return _n(2) * w
        return _n(2 * self.g) + _n(2) * w

    def T(self) -> _V:
        return _n(T_of(self.g))

    def Q(self) -> _V:
        t = self.T()
        dt = self.delta_T(t + _n(1))
        inner = (t + _n(1)) * (dt ** self.P_prime(t))
        return inner.ceil_log2()

    def R(self) -> _V:
        return _n(self.p.A) * self.T() * self.Q()

    def S(self) -> _V:
        r = self.R()
        return _n(self.p.A_prime) * self.P_prime(r) * r

    def U(self) -> _V:
        return self.S() * _n(self.g + 2)


_NAMES = ("m", "g_tilde", "T_S", "T", "KS", "Delta_T", "Delta_T_g", "Delta", "Delta_lemma",
          "f", "isolated_cap", "isolated_cap_pi", "noncontractible_cap", "P", "P_prime",
          "Q", "R", "S", "U", "seymour", "thomassen_k", "thomassen_improved_k", "L", "H")


def bound_names() -> tuple[str, ...]:
    return _NAMES


def evaluate_bound(name: str, params: BoundParams, prec: int = DEFAULT_PREC) -> BigBound:
    """Evaluate one named bound; see bound_names() for the catalogue."""
    if name not in _NAMES:
        raise InputError(f"unsupported bound {name!r}; known: {', '.join(_NAMES)}")
    g = params.g
    need_w = {"Delta_T", "P", "P_prime"}
    if name in need_w and params.w is None:
        raise InputError(f"bound {name} needs the width parameter w")
    if name == "f" and params.i is None:
        raise InputError("bound f needs the index parameter i")
    if name == "KS" and params.ell is None:
        raise InputError("bound KS needs the parameter ell")
    if name == "isolated_cap_pi" and g < 1:
        raise InputError("isolated_cap_pi takes the embedding genus, which must be >= 1")
    if name == "seymour":
        return BigBound(name, tower=(3 * g + 9) ** 9, note="2^(2^k), k = (3g+9)^9",
                        params=params, prec=prec)
    integer = {
        "m": lambda: m_of(g),
        "g_tilde": lambda: g_tilde(g),
        "T_S": lambda: T_S(g),
        "T": lambda: T_of(g),
        "KS": lambda: 264 * g * params.ell,
        "Delta_T": lambda: 2 * g + 2 * params.w,
        "Delta_T_g": lambda: 2 * g + 2 * (T_of(g) + 1),
        "isolated_cap": lambda: 4 * (6 * g + 7),
        "isolated_cap_pi": lambda: 4 * (6 * g - 5),
        "noncontractible_cap": lambda: 2 * m_of(g) * (3 * g + 3),
        # ceil(800 g^(3/2)) = ceil(sqrt(640000 g^3))
        "thomassen_k": lambda: _ceil_sqrt(640000 * g ** 3),
        # ceil(100 sqrt(g) m) = ceil(sqrt(10000 m^2 g))
        "thomassen_improved_k": lambda: _ceil_sqrt(10000 * m_of(g) ** 2 * g),
        "L": lambda: lower_bound_L(g)[0],
        "H": lambda: lower_bound_L(g)[1],
    }
    if name in integer:
        return BigBound(name, exact=integer[name](), params=params, prec=prec)
    old = iv.prec
    iv.prec = prec
    try:
        fm = _Formulas(params)
        note = f"Delta variant: {params.delta_variant}"
        if name == "Delta":
            return _wrap(name, fm.delta("theorem"), params, prec, "Delta variant: theorem")
        if name == "Delta_lemma":
            return _wrap(name, fm.delta("lemma"), params, prec, "Delta variant: lemma")
        if name == "f":
            return _wrap(name, fm.f(params.i), params, prec)
        if name == "P":
            return _wrap(name, fm.P(_n(params.w)), params, prec, note)
        if name == "P_prime":
            return _wrap(name, fm.P_prime(_n(params.w)), params, prec, note)
        if params.conventional_constants:
            note += "; A = A' = 1 (conventional constants)"
        if name == "Q":
            return _wrap(name, fm.Q(), params, prec, note + "; Q = ceil(log2(...)) minimal choice")
        if name == "R":
            return _wrap(name, fm.R(), params, prec, note)
        if name == "S":
            return _wrap(name, fm.S(), params, prec, note)
        return _wrap(name, fm.U(), params, prec, note)
    finally:
        iv.prec = old


def _ceil_sqrt(x: int) -> int:
    r = isqrt(x)
    return r if r * r == x else r + 1


def compare_bounds(a: BigBound, b: BigBound, refine: bool = True) -> str:
    """'less' | 'greater' | 'equal' | 'indeterminate'; never a wrong strict answer.

    When the log2 intervals overlap and both sides carry their parameters,
    they are re-evaluated once at four times the precision.
    """
    if a.exact is not None and b.exact is not None:
        return "less" if a.exact < b.exact else "greater" if a.exact > b.exact else "equal"
    if a.tower is not None and b.tower is not None:
        return "less" if a.tower < b.tower else "greater" if a.tower > b.tower else "equal"
    old = iv.prec
    iv.prec = max(a.prec, b.prec)
    try:
        la, lb = a.log2_interval(), b.log2_interval()
        if mpmath.mpf(la.b) < mpmath.mpf(lb.a):
            return "less"
        if mpmath.mpf(la.a) > mpmath.mpf(lb.b):
            return "greater"
    finally:
        iv.prec = old
    if refine and a.params is not None and b.params is not None:
        ra = a if a.exact is not None or a.tower is not None else \
            evaluate_bound(a.name, a.params, 4 * a.prec)
        rb = b if b.exact is not None or b.tower is not None else \
            evaluate_bound(b.name, b.params, 4 * b.prec)
        return compare_bounds(ra, rb, refine=False)
    return "indeterminate"


@dataclass
class Crossover:
    g: int
    T: int
    T_S: int
    certified: str


def crossover_T_vs_TS(limit: int = 10 ** 9) -> Crossover:
    """Least g with T(g) < T_S(g), found by a linear sweep and certified by compare_bounds."""
    for g in range(limit + 1):
        t, ts = T_of(g), T_S(g)
        if t < ts:
            verdict = compare_bounds(evaluate_bound("T", BoundParams(g)),
                                     evaluate_bound("T_S", BoundParams(g)))
            return Crossover(g, t, ts, verdict)
    raise PreconditionError(f"no crossover up to g = {limit}")


def bound_table(names: list[str], genera: list[int], w: int | None = None,
                prec: int = DEFAULT_PREC) -> list[dict]:
    rows = []
    for g in genera:
        for name in names:
            rows.append(evaluate_bound(name, BoundParams(g, w=w), prec).to_row())
    return rows
