"""GF(2^s) arithmetic with explicit modulus polynomials.

Field elements are plain integers in [0, 2^s): bit i holds the coefficient
of x^i in the polynomial basis.  Addition is XOR; multiplication reduces
modulo a configured irreducible polynomial, encoded as an (s+1)-bit integer
mask with the x^0 coefficient at the least-significant bit.

A :class:`FieldCtx` is immutable after construction and all operations are
pure, so contexts can be shared freely between workers.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainMismatch, InvOfZero

# Default irreducible polynomials, one per supported extension degree.
# Bit i of the mask is the coefficient of x^i (bit s is always set).
DEFAULT_MODULI = {
    1: 0b11,              # x + 1
    2: 0b111,             # x^2 + x + 1
    4: 0b10011,           # x^4 + x + 1
    6: 0b1000011,         # x^6 + x + 1
    8: 0b100011101,       # x^8 + x^4 + x^3 + x^2 + 1
    12: 0b1000001010011,  # x^12 + x^6 + x^4 + x + 1
}

_TABLE_LIMIT = 1 << 16  # build exp/log tables up to this field size


def _poly_deg(p: int) -> int:
    return p.bit_length() - 1


def _poly_mod(a: int, m: int) -> int:
    dm = _poly_deg(m)
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _poly_mulmod(a: int, b: int, m: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a = _poly_mod(a << 1, m)
    return out


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _is_irreducible(m: int) -> bool:
    """Rabin test over F_2: x^(2^s) == x mod m and gcd checks for each
    maximal proper divisor s/p of the degree s."""
    s = _poly_deg(m)
    if s < 1:
        return False
    x = 0b10

    def frob(power: int) -> int:
        # x^(2^power) mod m
        t = x
        for _ in range(power):
            t = _poly_mulmod(t, t, m)
        return t

    if frob(s) != _poly_mod(x, m):
        return False
    for p in _prime_factors(s):
        if _poly_gcd(frob(s // p) ^ _poly_mod(x, m), m) != 1:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FieldCtx:
    """Arithmetic context for GF(2^s).

    Parameters
    ----------
    s : int
        Extension degree; the field has q = 2^s elements.
    modulus : int or None
        Irreducible polynomial mask.  Bit i is the coefficient of x^i and
        bit s must be set.  ``None`` selects the shipped default for
        s in {1, 2, 4, 6, 8, 12}.
    """

    def __init__(self, s: int, modulus: int | None = None):
        if s < 1:
            raise ValueError(f"extension degree must be >= 1, got {s}")
        if modulus is None:
            if s not in DEFAULT_MODULI:
                raise ValueError(
                    f"no default modulus for s={s}; supply one explicitly "
                    f"(defaults exist for {sorted(DEFAULT_MODULI)})"
                )
            modulus = DEFAULT_MODULI[s]
        if _poly_deg(modulus) != s:
            raise ValueError(
                f"modulus 0b{modulus:b} does not have degree {s}"
            )
        if not _is_irreducible(modulus):
            raise ValueError(f"modulus 0b{modulus:b} is reducible over F_2")
        self.s = s
        self.modulus = modulus
        self.q = 1 << s
        self._gamma: int | None = None
        self.exp_np: np.ndarray | None = None
        self.log_np: np.ndarray | None = None
        if self.q <= _TABLE_LIMIT:
            self._build_tables()

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldCtx)
            and self.s == other.s
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.s, self.modulus))

    def __repr__(self) -> str:
        return f"FieldCtx(s={self.s}, modulus=0b{self.modulus:b})"

    # -- core arithmetic ---------------------------------------------------

    def check_element(self, a: int) -> int:
        if not isinstance(a, (int, np.integer)) or not 0 <= a < self.q:
            raise DomainMismatch(f"{a!r} is not an element of GF(2^{self.s})")
        return int(a)

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def _raw_mul(self, a: int, b: int) -> int:
        return _poly_mulmod(a, b, self.modulus)

    def mul(self, a: int, b: int) -> int:
        if self.log_np is not None:
            if a == 0 or b == 0:
                return 0
            return int(
                self.exp_np[int(self.log_np[a]) + int(self.log_np[b])]
            )
        return self._raw_mul(a, b)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise InvOfZero("zero has no multiplicative inverse")
        # a^(q-2) = a^(-1) in GF(q)
        return self.pow(a, self.q - 2)

    def trace(self, x: int) -> int:
        """Absolute trace to F_2: x + x^2 + x^4 + ... + x^(2^(s-1))."""
        t = 0
        acc = x
        for _ in range(self.s):
            t ^= acc
            acc = self.mul(acc, acc)
        if t not in (0, 1):
            raise AssertionError("trace left the prime field")
        return t

    def element_order(self, a: int) -> int:
        if a == 0:
            raise InvOfZero("zero has no multiplicative order")
        order = self.q - 1
        for p in _prime_factors(self.q - 1):
            while order % p == 0 and self.pow(a, order // p) == 1:
                order //= p
        return order

    # -- generator and tables ----------------------------------------------

    def generator(self) -> int:
        """Smallest-valued element of multiplicative order q-1."""
        if self._gamma is None:
            target = self.q - 1
            for g in range(1, self.q):
                ok = all(
                    self._raw_pow(g, target // p) != 1
                    for p in _prime_factors(target)
                )
                if ok or target == 1:
                    self._gamma = g
                    break
        return self._gamma

    def _raw_pow(self, a: int, e: int) -> int:
        out = 1
        base = a
        while e:
            if e & 1:
                out = self._raw_mul(out, base)
            base = self._raw_mul(base, base)
            e >>= 1
        return out

    def _build_tables(self) -> None:
        """Precompute exp/log tables for vectorized multiplication.

        log[0] is a sentinel pointing into the zero-padded tail of the exp
        table, so exp[log[a] + log[b]] is correct even when a or b is 0.
        """
        q = self.q
        g = self.generator()
        period = q - 1
        sentinel = 2 * period
        exp = np.zeros(4 * q, dtype=np.int64)
        log = np.full(q, sentinel, dtype=np.int64)
        x = 1
        for i in range(period):
            exp[i] = x
            exp[i + period] = x
            log[x] = i
            x = self._raw_mul(x, g)
        if x != 1:
            raise AssertionError("generator order mismatch")
        self.exp_np = exp
        self.log_np = log

    def to_json(self) -> dict:
        return {"s": self.s, "modulus": self.modulus}

    @classmethod
    def from_json(cls, data: dict) -> "FieldCtx":
        return cls(int(data["s"]), int(data["modulus"]))


# -- functional surface ------------------------------------------------------


def field_arith(ctx: FieldCtx, op: str, a: int, b: int | None = None) -> int:
    """Dispatch one arithmetic operation; validates operands against ctx."""
    a = ctx.check_element(a)
    if op == "inv":
        return ctx.inv(a)
    if b is None:
        raise TypeError(f"operation {op!r} needs a second operand")
    if op == "pow":
        return ctx.pow(a, int(b))
    b = ctx.check_element(b)
    if op == "add":
        return ctx.add(a, b)
    if op == "mul":
        return ctx.mul(a, b)
    raise ValueError(f"unknown operation {op!r}")


def trace(ctx: FieldCtx, x: int) -> int:
    return ctx.trace(ctx.check_element(x))


def find_generator(ctx: FieldCtx) -> int:
    return ctx.generator()


def ensure_same_field(a: FieldCtx, b: FieldCtx) -> None:
    if a != b:
        raise DomainMismatch(f"field contexts differ: {a!r} vs {b!r}")
