"""Exact coefficient arithmetic for the symbolic engine.

Scalars are quotients of Laurent polynomials in three formal commuting
parameters over the Gaussian rationals Q(i):

* ``s``      -- square root of the deformation parameter, q = s^2
* ``lam``    -- the torus unit, with lam* = lam^-1
* ``pihat``  -- the circle constant 2*pi, kept formal and positive

The involution fixes s and pihat, inverts lam, and conjugates i.  No
floating point enters this module; numeric specialization is the only
exit to floats.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

VAR_NAMES = ("s", "lam", "pihat")
_ZERO_EXP = (0, 0, 0)


class GaussQ:
    """A Gaussian rational re + im*i with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if not isinstance(other, GaussQ):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        return GaussQ(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussQ(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __mul__(self, other):
        if not self.im and not other.im:
            return GaussQ(self.re * other.re)
        return GaussQ(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)

    def inv(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * other.inv()

    def conj(self):
        return GaussQ(self.re, -self.im)

    def to_complex(self):
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


GQ_ZERO = GaussQ(0)
GQ_ONE = GaussQ(1)
GQ_I = GaussQ(0, 1)
_TRIVIAL_DEN = {(0, 0, 0): GQ_ONE}


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _gq_str(c: GaussQ) -> str:
    if not c.im:
        return _fraction_str(c.re)
    if not c.re:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{_fraction_str(c.im)}*i"
    im = f"+{_fraction_str(c.im)}*i" if c.im > 0 else f"-{_fraction_str(-c.im)}*i"
    return f"({_fraction_str(c.re)}{im})"


# ---------------------------------------------------------------------------
# Laurent polynomials: dict {(es, elam, epihat): GaussQ}, zero coeffs absent.
# ---------------------------------------------------------------------------

def _padd(p, q):
    out = dict(p)
    for k, v in q.items():
        w = out.get(k)
        if w is None:
            out[k] = v
        else:
            w = w + v
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def _pneg(p):
    return {k: -v for k, v in p.items()}


def _pmul(p, q):
    if len(p) > len(q):
        p, q = q, p
    out = {}
    for (a1, b1, c1), u in p.items():
        for (a2, b2, c2), v in q.items():
            k = (a1 + a2, b1 + b2, c1 + c2)
            w = out.get(k)
            uv = u * v
            if w is None:
                if uv:
                    out[k] = uv
            else:
                w = w + uv
                if w:
                    out[k] = w
                else:
                    del out[k]
    return out


def _pscale(p, c: GaussQ):
    if not c:
        return {}
    return {k: v * c for k, v in p.items()}


def _pconj(p):
    # s* = s, pihat* = pihat, lam* = lam^-1, i* = -i
    return {(a, -b, c): v.conj() for (a, b, c), v in p.items()}


def _plead(p):
    """Leading (exponent, coeff) under graded-lex order; None for 0."""
    if not p:
        return None
    k = max(p, key=lambda e: (e[0] + e[1] + e[2], e))
    return k, p[k]


def _pdiv_exact(num, den):
    """Exact multivariate Laurent division; returns quotient or None."""
    if not den:
        raise ZeroDivisionError("division by zero polynomial")
    if not num:
        return {}
    if len(den) == 1:
        (ke, kc), = den.items()
        if ke == _ZERO_EXP:
            if kc == GQ_ONE:
                return num
            inv = kc.inv()
            return {k: v * inv for k, v in num.items()}
        if kc == GQ_ONE:
            return {(a - ke[0], b - ke[1], c - ke[2]): v
                    for (a, b, c), v in num.items()}
        inv = kc.inv()
        return {(a - ke[0], b - ke[1], c - ke[2]): v * inv
                for (a, b, c), v in num.items()}
    lk, lc = _plead(den)
    quot = {}
    rem = dict(num)
    # bounded by total term count; each step cancels the leading term
    for _ in range(8 * len(num) * (len(den) + 2) + 16):
        if not rem:
            return quot
        rk, rc = _plead(rem)
        qk = (rk[0] - lk[0], rk[1] - lk[1], rk[2] - lk[2])
        qc = rc / lc
        quot = _padd(quot, {qk: qc})
        rem = _padd(rem, _pneg(_pmul({qk: qc}, den)))
    return None


def _pstr(p) -> str:
    if not p:
        return "0"
    items = sorted(p.items(), key=lambda kv: kv[0])
    parts = []
    for (a, b, c), v in items:
        mon = []
        for name, e in zip(VAR_NAMES, (a, b, c)):
            if e == 1:
                mon.append(name)
            elif e:
                mon.append(f"{name}^{e}")
        cs = _gq_str(v)
        if mon and cs == "1":
            term = "*".join(mon)
        elif mon and cs == "-1":
            term = "-" + "*".join(mon)
        else:
            term = "*".join([cs] + mon)
        parts.append(term)
    out = parts[0]
    for t in parts[1:]:
        out += t if t.startswith("-") else "+" + t
    return out


class Scalar:
    """Element of the fraction field Q(i)(s, lam, pihat).

    Stored as num/den with den kept minimal: monomial denominators are
    always cleared, nontrivial ones are removed whenever exact division
    succeeds.  Equality is cross-multiplied and therefore representation
    independent.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, Scalar):
            self.num, self.den = num.num, num.den
            return
        if not isinstance(num, dict):
            num = {_ZERO_EXP: GaussQ(num)} if num else {}
        if den is None:
            self.num, self.den = num, _TRIVIAL_DEN
            return
        elif not isinstance(den, dict):
            den = {_ZERO_EXP: GaussQ(den)}
        if not den:
            raise ZeroDivisionError("scalar with zero denominator")
        if not num:
            self.num, self.den = {}, {_ZERO_EXP: GQ_ONE}
            return
        if len(den) == 1:
            num = _pdiv_exact(num, den)
            den = {_ZERO_EXP: GQ_ONE}
        else:
            q = _pdiv_exact(num, den)
            if q is not None:
                num, den = q, {_ZERO_EXP: GQ_ONE}
            else:
                lk, lc = _plead(den)
                num = _pscale(num, lc.inv())
                den = _pscale(den, lc.inv())
        self.num, self.den = num, den

    # -- constructors ------------------------------------------------------
    @staticmethod
    def from_fraction(x) -> "Scalar":
        return Scalar({_ZERO_EXP: GaussQ(x)} if x else {})

    @staticmethod
    def monomial(coeff: GaussQ, es=0, elam=0, epihat=0) -> "Scalar":
        return Scalar({(es, elam, epihat): coeff} if coeff else {})

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == self.den

    def is_monomial(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1 and _ZERO_EXP in self.den

    def is_rational(self):
        """Return the value as a Fraction if the scalar is a plain rational."""
        if self.is_zero():
            return Fraction(0)
        if len(self.num) == 1 and _ZERO_EXP in self.num and len(self.den) == 1 \
                and _ZERO_EXP in self.den:
            c = self.num[_ZERO_EXP] / self.den[_ZERO_EXP]
            if not c.im:
                return c.re
        return None

    # -- ring/field ops ----------------------------------------------------
    def _trivial_den(self):
        return len(self.den) == 1 and self.den.get(_ZERO_EXP) == GQ_ONE

    def __add__(self, other):
        other = other if isinstance(other, Scalar) else Scalar(other)
        if self._trivial_den() and other._trivial_den():
            out = Scalar.__new__(Scalar)
            out.num, out.den = _padd(self.num, other.num), _TRIVIAL_DEN
            return out
        if self.den == other.den:
            return Scalar(_padd(self.num, other.num), dict(self.den))
        return Scalar(_padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
                      _pmul(self.den, other.den))

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        out = Scalar.__new__(Scalar)
        out.num, out.den = _pneg(self.num), self.den
        return out

    def __sub__(self, other):
        other = other if isinstance(other, Scalar) else Scalar(other)
        return self + (-other)

    def __mul__(self, other):
        other = other if isinstance(other, Scalar) else Scalar(other)
        if self._trivial_den() and other._trivial_den():
            out = Scalar.__new__(Scalar)
            out.num, out.den = _pmul(self.num, other.num), _TRIVIAL_DEN
            return out
        return Scalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = other if isinstance(other, Scalar) else Scalar(other)
        if other.is_zero():
            raise ZeroDivisionError("scalar division by zero")
        return Scalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __pow__(self, k: int):
        if k == 0:
            return S_ONE
        base = self if k > 0 else S_ONE / self
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def conj(self) -> "Scalar":
        return Scalar(_pconj(self.num), _pconj(self.den))

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return _padd(_pmul(self.num, other.den),
                     _pneg(_pmul(other.num, self.den))) == {}

    def __hash__(self):
        # canonical enough: hash of the reduced pair when den == 1,
        # else fall back to a weak class hash (Scalars rarely live in sets)
        if len(self.den) == 1 and _ZERO_EXP in self.den:
            return hash(frozenset(self.num.items()))
        return hash(Scalar)

    # -- involution-aware helpers -------------------------------------------
    def is_real(self) -> bool:
        return self == self.conj()

    def sqrt_monomial(self):
        """Positive square root of a positive real monomial, or None."""
        if self.is_zero():
            return S_ZERO
        if not self.is_monomial():
            return None
        (e, c), = self.num.items()
        if c.im or c.re <= 0:
            return None
        if any(x % 2 for x in e):
            return None
        fr = c.re
        rn, rd = isqrt(fr.numerator), isqrt(fr.denominator)
        if rn * rn != fr.numerator or rd * rd != fr.denominator:
            return None
        half = (e[0] // 2, e[1] // 2, e[2] // 2)
        return Scalar({half: GaussQ(Fraction(rn, rd))})

    # -- output -------------------------------------------------------------
    def specialize(self, s: complex, lam: complex, pihat: complex) -> complex:
        def ev(p):
            tot = 0j
            for (a, b, c), v in p.items():
                tot += v.to_complex() * (s ** a) * (lam ** b) * (pihat ** c)
            return tot

        return ev(self.num) / ev(self.den)

    def __repr__(self):
        return self.render()

    def render(self) -> str:
        ns = _pstr(self.num)
        if len(self.den) == 1 and _ZERO_EXP in self.den:
            return ns
        return f"({ns})/({_pstr(self.den)})"


S_ZERO = Scalar(0)
S_ONE = Scalar(1)
S_I = Scalar({_ZERO_EXP: GQ_I})
S_S = Scalar({(1, 0, 0): GQ_ONE})          # s, with q = s^2
S_Q = Scalar({(2, 0, 0): GQ_ONE})          # q
S_LAM = Scalar({(0, 1, 0): GQ_ONE})        # torus unit
S_PIHAT = Scalar({(0, 0, 1): GQ_ONE})      # 2*pi


def q_power(k: int) -> Scalar:
    """q^k = s^(2k), exact for half-integer powers of q via odd s powers."""
    return Scalar({(2 * k, 0, 0): GQ_ONE})


def s_power(k: int) -> Scalar:
    return Scalar({(k, 0, 0): GQ_ONE})


def rational(p, q=1) -> Scalar:
    return Scalar.from_fraction(Fraction(p, q))
