"""
p-ary Sequences and p-adic Numbers
This module implements the boundary U_p of the p-ary tree, the comb F_p on [0, inf),
and the isometries relating U_p, the p-adic numbers and the faces of F_p. Everything
is exact over Fractions.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import daiquiri

from combs.comb import Comb, CombPoint, Face, comb_distance
from combs.errors import DomainError, ValuationOfZeroError

logger = daiquiri.getLogger(__name__)

Rational = Union[int, Fraction]


class Tail(str, Enum):
    """Behaviour of the digits beyond the stored window."""

    ZERO = "zero"
    PMINUS1 = "pminus1"


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def padic_valuation(value: Rational, p: int) -> int:
    """
    Compute v_p of a nonzero rational: the power of p in the numerator minus the
    power of p in the denominator.

    Raises:
        ValuationOfZeroError: value is 0
    """
    value = Fraction(value)
    if value == 0:
        raise ValuationOfZeroError("the valuation of 0 is infinite")
    v = 0
    numerator, denominator = abs(value.numerator), value.denominator
    while numerator % p == 0:
        v += 1
        numerator //= p
    while denominator % p == 0:
        v -= 1
        denominator //= p
    return v


def has_p_power_denominator(value: Rational, p: int) -> bool:
    denominator = Fraction(value).denominator
    while denominator % p == 0:
        denominator //= p
    return denominator == 1


def _base_p_digits(n: int, p: int) -> List[int]:
    """Digits of a nonnegative integer, least significant first."""
    digits = []
    while n:
        n, digit = divmod(n, p)
        digits.append(digit)
    return digits


@dataclass(frozen=True)
class PSequence:
    """
    A sequence x = (x_k) of digits in {0..p-1} indexed by the integers, zero below some index.

    The digits x_k for n_min <= k < n_min + len(digits) are stored; beyond the window
    every digit is 0 (Tail.ZERO) or p - 1 (Tail.PMINUS1). A sequence with a precision
    is a truncation: only its digits of index below `precision` are meaningful.
    With `naturals` the sequence is indexed by the nonnegative integers only.
    """

    p: int
    n_min: int = 0
    digits: Tuple[int, ...] = ()
    tail: Tail = Tail.ZERO
    precision: Optional[int] = None
    naturals: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.p < 2:
            raise DomainError(f"base must be at least 2, got {self.p}")
        tail = Tail(self.tail)
        digits = list(self.digits)
        if any(not 0 <= digit < self.p for digit in digits):
            raise DomainError(f"digits must lie in 0..{self.p - 1}")
        if self.precision is not None and tail is not Tail.ZERO:
            raise DomainError("a truncated sequence cannot carry a p-1 tail")
        n_min = self.n_min
        while digits and digits[0] == 0:
            digits.pop(0)
            n_min += 1
        stripped = self.p - 1 if tail is Tail.PMINUS1 else 0
        while digits and digits[-1] == stripped:
            digits.pop()
        if not digits and tail is Tail.ZERO:
            n_min = 0
        if self.naturals and not (self.is_zero_window(digits, tail) or n_min >= 0):
            raise DomainError("sequence has nonzero digits at negative indices")
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "digits", tuple(digits))
        object.__setattr__(self, "n_min", n_min)

    @staticmethod
    def is_zero_window(digits, tail) -> bool:
        return not digits and tail is Tail.ZERO

    @classmethod
    def zero(cls, p: int) -> "PSequence":
        return cls(p)

    @classmethod
    def from_digits(
        cls, p: int, digits: dict, tail: Tail = Tail.ZERO, precision: Optional[int] = None
    ) -> "PSequence":
        """Build a sequence from {index: digit}; missing indices of the window are 0."""
        if not digits:
            return cls(p, 0, (), tail, precision)
        low, high = min(digits), max(digits)
        return cls(p, low, tuple(digits.get(k, 0) for k in range(low, high + 1)), tail, precision)

    @property
    def tail_start(self) -> int:
        """First index of the constant tail."""
        return self.n_min + len(self.digits)

    @property
    def is_zero(self) -> bool:
        return self.is_zero_window(self.digits, self.tail)

    @property
    def approximate(self) -> bool:
        return self.precision is not None

    @property
    def finite(self) -> bool:
        """True when only finitely many digits are nonzero."""
        return self.tail is Tail.ZERO and not self.approximate

    def digit(self, k: int) -> int:
        if k < self.n_min:
            return 0
        if k < self.tail_start:
            return self.digits[k - self.n_min]
        return self.p - 1 if self.tail is Tail.PMINUS1 else 0

    @property
    def w(self) -> int:
        """Index of the last nonzero digit of a finite nonzero sequence."""
        if not self.finite or self.is_zero:
            raise DomainError("w is only defined for nonzero finite sequences")
        return self.tail_start - 1

    def hat(self) -> "PSequence":
        """Decrement the last nonzero digit and set every later digit to p - 1."""
        if not self.finite or self.is_zero:
            raise DomainError("hat is only defined for nonzero finite sequences")
        digits = list(self.digits)
        digits[-1] -= 1
        return PSequence(self.p, self.n_min, tuple(digits), Tail.PMINUS1, naturals=self.naturals)

    def unhat(self) -> "PSequence":
        """Inverse of hat on sequences ending with p - 1 digits."""
        if self.tail is not Tail.PMINUS1:
            raise DomainError("only sequences with a p-1 tail come from hat")
        return phi(self.value(), self.p)

    def value(self) -> Fraction:
        """The real number sum_k x_k p^(-k)."""
        total = sum(
            (Fraction(digit) * Fraction(self.p) ** -(self.n_min + i) for i, digit in enumerate(self.digits)),
            Fraction(0),
        )
        if self.tail is Tail.PMINUS1:
            # sum over k >= m of (p-1) p^(-k) is p^(-(m-1))
            total += Fraction(self.p) ** -(self.tail_start - 1)
        return total

    def format(self) -> str:
        """Serialize as `p:<p>; <n_min>:<digits>;tail=<zero|pminus1>`."""
        separator = "" if self.p <= 10 else ","
        text = f"p:{self.p}; {self.n_min}:{separator.join(str(d) for d in self.digits)};tail={self.tail.value}"
        if self.precision is not None:
            text += f";precision={self.precision}"
        return text

    @classmethod
    def parse(cls, text: str) -> "PSequence":
        """Read the digit-string format written by `format`."""
        try:
            fields = [part.strip() for part in text.strip().split(";")]
            p = int(fields[0].split(":", 1)[1])
            n_min_text, digit_text = fields[1].split(":", 1)
            if "," in digit_text or p > 10:
                digits = tuple(int(d) for d in digit_text.split(",") if d)
            else:
                digits = tuple(int(d) for d in digit_text)
            options = dict(part.split("=", 1) for part in fields[2:])
            precision = int(options["precision"]) if "precision" in options else None
            return cls(p, int(n_min_text), digits, Tail(options.get("tail", "zero")), precision)
        except DomainError:
            raise
        except (IndexError, ValueError, KeyError) as e:
            raise DomainError(f"malformed digit string {text!r}") from e

    def __str__(self) -> str:
        return self.format()


def v_u(x: PSequence) -> int:
    """Smallest index of a nonzero digit."""
    if x.is_zero:
        raise ValuationOfZeroError("the zero sequence has no nonzero digit")
    return x.n_min


def subtract(x: PSequence, y: PSequence) -> PSequence:
    """
    Digit-wise difference x - y with borrows carried to higher indices.

    Past both windows the borrow settles within two positions, which fixes the tail.
    """
    if x.p != y.p:
        raise DomainError(f"sequences have different bases {x.p} and {y.p}")
    if x.approximate or y.approximate:
        raise DomainError("cannot subtract truncated sequences exactly")
    p = x.p
    low = min(x.n_min, y.n_min)
    high = max(x.tail_start, y.tail_start) + 2
    digits = []
    borrow = 0
    for k in range(low, high):
        digit = x.digit(k) - y.digit(k) - borrow
        borrow = 1 if digit < 0 else 0
        digits.append(digit % p)
    tail_digit = (x.digit(high) - y.digit(high) - borrow) % p
    return PSequence(p, low, tuple(digits), Tail.PMINUS1 if tail_digit == p - 1 else Tail.ZERO)


def d_u(x: PSequence, y: PSequence) -> Fraction:
    """d_u(x, y) = p^(-v_u(x - y)), 0 when x = y."""
    difference = subtract(x, y)
    if difference.is_zero:
        return Fraction(0)
    return Fraction(x.p) ** -v_u(difference)


def _check_nonnegative(t: Rational) -> Fraction:
    if isinstance(t, float):
        raise DomainError(f"positions must be exact rationals, got float {t}")
    t = Fraction(t)
    if t < 0:
        raise DomainError(f"position must be nonnegative, got {t}")
    return t


def phi(t: Rational, p: int, precision: Optional[int] = None) -> PSequence:
    """
    The greedy p-ary expansion of t >= 0: t = sum_k x_k p^(-k).

    Args:
        t: Nonnegative rational
        p: Base
        precision: Needed when the denominator of t is not a power of p; the digits
            of index below `precision` are returned, tagged as a truncation

    Returns:
        The expansion as a PSequence
    """
    t = _check_nonnegative(t)
    exact = has_p_power_denominator(t, p)
    if not exact and precision is None:
        raise DomainError(f"{t} has an infinite expansion in base {p}; give a precision")
    integer, fractional = divmod(t, 1)
    digits = {-j: digit for j, digit in enumerate(_base_p_digits(int(integer), p))}
    k = 0
    while fractional and (exact or k + 1 < precision):
        k += 1
        digit, fractional = divmod(fractional * p, 1)
        digits[k] = int(digit)
    if exact:
        return PSequence.from_digits(p, digits)
    return PSequence.from_digits(p, {i: d for i, d in digits.items() if i < precision}, precision=precision)


def phi_faces(t: Rational, p: int) -> Tuple[PSequence, PSequence]:
    """The (left, right) faces of a tooth of F_p: (hat(phi(t)), phi(t))."""
    t = _check_nonnegative(t)
    if t == 0 or not has_p_power_denominator(t, p):
        raise DomainError(f"{t} is not a tooth of F_{p}")
    right = phi(t, p)
    return right.hat(), right


def fp_value(t: Union[Rational, "PRational"], p: int) -> Fraction:
    """F_p(t) = p^(-w(phi(t))) when phi(t) has finitely many nonzero digits, else 0."""
    if isinstance(t, PRational):
        if t.approximate:
            return Fraction(0)
        t = t.value
    t = _check_nonnegative(t)
    if t == 0 or not has_p_power_denominator(t, p):
        return Fraction(0)
    return Fraction(p) ** -phi(t, p).w


@dataclass(frozen=True)
class PRational:
    """
    A rational number seen as a p-adic number.

    With a precision, the value is only known modulo p^precision.
    """

    p: int
    value: Fraction
    precision: Optional[int] = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"p-adic numbers need a prime, got {self.p}")
        if isinstance(self.value, float):
            raise DomainError(f"p-adic values must be exact rationals, got float {self.value}")
        object.__setattr__(self, "value", Fraction(self.value))

    @property
    def approximate(self) -> bool:
        return self.precision is not None

    @property
    def finite_hensel(self) -> bool:
        """True when the Hensel expansion has finitely many negative-index digits."""
        return has_p_power_denominator(self.value, self.p)

    def __str__(self) -> str:
        text = str(self.value)
        return text if self.precision is None else f"{text} (mod {self.p}^{self.precision})"


def _check_same_prime(q: PRational, r: PRational) -> None:
    if q.p != r.p:
        raise DomainError(f"p-adic numbers for different primes {q.p} and {r.p}")


def v_p(q: PRational) -> int:
    return padic_valuation(q.value, q.p)


def d_p(q: PRational, r: PRational) -> Fraction:
    """d_p(q, r) = p^(-v_p(q - r)), 0 when q = r."""
    _check_same_prime(q, r)
    if q.value == r.value:
        return Fraction(0)
    return Fraction(q.p) ** -padic_valuation(q.value - r.value, q.p)


def padic_distance(a: Rational, b: Rational, p: int) -> Fraction:
    return d_p(PRational(p, Fraction(a)), PRational(p, Fraction(b)))


def rho_psi(q: PRational, precision: Optional[int] = None) -> PSequence:
    """
    Reverse the Hensel digits of q: y_k is the coefficient of p^k in q.

    Negative numbers end with p - 1 digits. When the denominator of q is not a power
    of p, the digits of index below `precision` are returned as a truncation.
    """
    p = q.p
    if q.value == 0:
        return PSequence.zero(p)
    shift = 0
    denominator = q.value.denominator
    while denominator % p == 0:
        denominator //= p
        shift += 1
    numerator = q.value.numerator
    if denominator != 1:
        if precision is None:
            raise DomainError(f"{q.value} has infinitely many {p}-adic digits; give a precision")
        modulus = p ** (precision + shift)
        residue = numerator * pow(denominator, -1, modulus) % modulus
        digits = _base_p_digits(residue, p)
        return PSequence(p, -shift, tuple(digits), Tail.ZERO, precision)
    if numerator >= 0:
        return PSequence(p, -shift, tuple(_base_p_digits(numerator, p)))
    width = len(_base_p_digits(-numerator, p))
    digits = _base_p_digits(numerator + p**width, p)
    digits += [0] * (width - len(digits))
    return PSequence(p, -shift, tuple(digits), Tail.PMINUS1)


def psi_inverse_rho(y: PSequence) -> PRational:
    """
    Read y as a p-adic number sum_k y_k p^k; a p-1 tail from index m adds -p^m.
    """
    p = y.p
    total = sum(
        (Fraction(digit) * Fraction(p) ** (y.n_min + i) for i, digit in enumerate(y.digits)),
        Fraction(0),
    )
    if y.tail is Tail.PMINUS1:
        total -= Fraction(p) ** y.tail_start
    return PRational(p, total, y.precision)


def chi(q: PRational) -> CombPoint:
    """
    The image of q in the comb of F_p: the reversed Hensel digits read as a real
    expansion, on the right face for positive-tailed images and the left face for
    images ending with p - 1 digits.
    """
    if q.approximate or not q.finite_hensel:
        raise DomainError(f"{q} has no exact image; use chi_truncated")
    y = rho_psi(q)
    if y.is_zero:
        return CombPoint(Fraction(0), Face.INTERIOR)
    face = Face.LEFT if y.tail is Tail.PMINUS1 else Face.RIGHT
    return CombPoint(y.value(), face)


def chi_inverse(point: CombPoint, p: int, precision: Optional[int] = None) -> PRational:
    """
    The p-adic number mapped to a point of the comb of F_p.

    Teeth need a face; zeros of F_p other than 0 have infinite expansions and are
    returned modulo p^precision.
    """
    t = _check_nonnegative(point.position)
    if t == 0:
        return PRational(p, Fraction(0))
    if has_p_power_denominator(t, p):
        left, right = phi_faces(t, p)
        if point.face is Face.INTERIOR:
            raise DomainError(f"{t} carries a tooth of F_{p}; pick its left or right face")
        return psi_inverse_rho(left if point.face is Face.LEFT else right)
    if precision is None:
        raise DomainError(f"{t} has an infinite expansion in base {p}; give a precision")
    return psi_inverse_rho(phi(t, p, precision))


def face_gap(t: Rational, p: int) -> Fraction:
    """chi_inverse of the left face of t minus that of its right face."""
    left = chi_inverse(CombPoint(Fraction(t), Face.LEFT), p)
    right = chi_inverse(CombPoint(Fraction(t), Face.RIGHT), p)
    return left.value - right.value


@dataclass(frozen=True)
class TruncatedImage:
    """
    Approximate image of a p-adic number with an infinite expansion: the exact image
    lies in [position, position + error_bound].
    """

    p: int
    position: Fraction
    precision: int

    @property
    def error_bound(self) -> Fraction:
        return Fraction(self.p) ** -(self.precision - 1)


def chi_truncated(q: PRational, precision: int) -> TruncatedImage:
    """chi(q) from the Hensel digits of index below `precision`."""
    y = rho_psi(q, precision)
    kept = {k: y.digit(k) for k in range(min(y.n_min, precision), precision)}
    return TruncatedImage(q.p, PSequence.from_digits(q.p, kept).value(), precision)


@dataclass(frozen=True)
class FpComb:
    """
    The comb F_p on [0, inf): F_p(t) = p^(-n) when n is the last p-ary digit of t.

    Positions are exact rationals. The supremum over (s, t) is p^(-n) for the least n
    such that a positive multiple of p^(-n) lies strictly between s and t.
    """

    p: int

    def check_position(self, x: Rational) -> None:
        _check_nonnegative(x)

    def height_at(self, x: Rational) -> Fraction:
        return fp_value(x, self.p)

    def _coarsest_level(self, bound: Fraction) -> int:
        """The level -k of the least power p^k exceeding bound."""
        k = 0
        while Fraction(self.p) ** k <= bound:
            k += 1
        return -k

    def sup_between(self, s: Rational, t: Rational) -> Fraction:
        s, t = _check_nonnegative(s), _check_nonnegative(t)
        if t < s:
            s, t = t, s
        if s == t:
            return Fraction(0)
        n = self._coarsest_level(t)
        while True:
            step = Fraction(self.p) ** -n
            next_multiple = (s // step + 1) * step
            if next_multiple < t:
                return step
            n += 1

    def finest_level(self, epsilon: Rational) -> int:
        """Largest n with p^(-n) >= epsilon."""
        epsilon = Fraction(epsilon)
        if not epsilon > 0:
            raise DomainError(f"cutoff must be positive, got {epsilon}")
        n = 0
        while Fraction(self.p) ** -(n + 1) >= epsilon:
            n += 1
        while Fraction(self.p) ** -n < epsilon:
            n -= 1
        return n

    def truncate(self, length: Rational, epsilon: Rational) -> Comb:
        """The finite comb of the teeth of height >= epsilon strictly inside (0, length)."""
        length = _check_nonnegative(length)
        step = Fraction(self.p) ** -self.finest_level(epsilon)
        teeth = []
        position = step
        while position < length:
            teeth.append((position, self.height_at(position)))
            position += step
        logger.debug("F_%d on [0, %s]: %d teeth above %s", self.p, length, len(teeth), epsilon)
        return Comb(Fraction(0), length, tuple(teeth))

    def tooth_count(self, length: Rational, epsilon: Rational) -> int:
        """
        Number of teeth of height >= epsilon in (0, length): for every level n with
        p^(-n) >= epsilon, the multiples of p^(-n) in (0, length) that are not multiples
        of p^(-(n-1)).
        """
        length = _check_nonnegative(length)
        finest = self.finest_level(epsilon)

        def multiples(n: int) -> int:
            step = Fraction(self.p) ** -n
            return max(0, -(-length // step) - 1)

        count = 0
        n = finest
        while multiples(n) > 0:
            count += multiples(n) - multiples(n - 1)
            n -= 1
        return count


def fp_distance(a: CombPoint, b: CombPoint, p: int) -> Fraction:
    """Comb distance between two points of the completed F_p comb."""
    return comb_distance(FpComb(p), a, b)
