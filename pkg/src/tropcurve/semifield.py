"""Exact max-plus scalars, slope germs, and tropical Laurent polynomials.

Everything here is a pure immutable value over arbitrary-precision
rationals; the additive identity -inf is encoded as ``None`` internally
and printed as ``-inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import TropError

RatLike = "Fraction | int | str"


def rat(x) -> Fraction:
    """Coerce an int, a ``p/q`` string, or a Fraction to an exact rational.

    Floats are rejected: this package never computes with binary floating
    point.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise TropError(f"not a rational literal: {x!r}") from exc
    raise TropError(f"exact rational required, got {type(x).__name__}: {x!r}")


@dataclass(frozen=True, order=False)
class TropValue:
    """An element of the max-plus semifield: a rational, or -inf."""

    coef: Fraction | None = None

    @staticmethod
    def of(x) -> "TropValue":
        if isinstance(x, TropValue):
            return x
        return TropValue(rat(x))

    @property
    def is_neg_inf(self) -> bool:
        return self.coef is None

    def add(self, other: "TropValue") -> "TropValue":
        """Tropical sum: max, with -inf neutral."""
        if self.coef is None:
            return other
        if other.coef is None:
            return self
        return self if self.coef >= other.coef else other

    def mul(self, other: "TropValue") -> "TropValue":
        """Tropical product: ordinary +, with -inf absorbing."""
        if self.coef is None or other.coef is None:
            return NEG_INF
        return TropValue(self.coef + other.coef)

    def inv(self) -> "TropValue":
        if self.coef is None:
            raise TropError("zero has no multiplicative inverse")
        return TropValue(-self.coef)

    def pow(self, k: int) -> "TropValue":
        if self.coef is None:
            if k <= 0:
                raise TropError("zero has no multiplicative inverse")
            return NEG_INF
        return TropValue(self.coef * k)

    def __le__(self, other: "TropValue") -> bool:
        if self.coef is None:
            return True
        if other.coef is None:
            return False
        return self.coef <= other.coef

    def __lt__(self, other: "TropValue") -> bool:
        return self <= other and self != other

    def __str__(self) -> str:
        return "-inf" if self.coef is None else str(self.coef)


NEG_INF = TropValue(None)
UNIT = TropValue(Fraction(0))


def trop_sum(values: Iterable[TropValue]) -> TropValue:
    out = NEG_INF
    for v in values:
        out = out.add(v)
    return out


def trop_prod(values: Iterable[TropValue]) -> TropValue:
    out = UNIT
    for v in values:
        out = out.mul(v)
    return out


@dataclass(frozen=True)
class Germ:
    """Value-plus-integer-slope-vector element of the rank-n germ semifield.

    A germ records a rational coefficient together with one integer slope
    per local direction; the rank-0 semifield is exactly the max-plus
    scalars.  The zero germ has ``coef is None``.
    """

    n: int
    coef: Fraction | None
    slopes: tuple[int, ...] | None

    def __post_init__(self):
        if (self.coef is None) != (self.slopes is None):
            raise TropError("germ must be zero in both fields or neither")
        if self.slopes is not None and len(self.slopes) != self.n:
            raise TropError(f"germ over rank {self.n} needs {self.n} slopes, got {len(self.slopes)}")

    @staticmethod
    def of(coef, slopes: Iterable[int]) -> "Germ":
        sl = tuple(int(s) for s in slopes)
        return Germ(len(sl), rat(coef), sl)

    @staticmethod
    def zero(n: int) -> "Germ":
        return Germ(n, None, None)

    @staticmethod
    def unit(n: int) -> "Germ":
        return Germ(n, Fraction(0), (0,) * n)

    @staticmethod
    def from_trop(t: TropValue) -> "Germ":
        if t.is_neg_inf:
            return Germ.zero(0)
        return Germ(0, t.coef, ())

    @property
    def is_neg_inf(self) -> bool:
        return self.coef is None

    def _require_rank(self, other: "Germ") -> None:
        if self.n != other.n:
            raise TropError(f"germ rank mismatch: {self.n} vs {other.n}")

    def add(self, other: "Germ") -> "Germ":
        """Larger coefficient wins; ties take the componentwise slope max."""
        self._require_rank(other)
        if self.coef is None:
            return other
        if other.coef is None:
            return self
        if self.coef > other.coef:
            return self
        if self.coef < other.coef:
            return other
        return Germ(self.n, self.coef, tuple(max(a, b) for a, b in zip(self.slopes, other.slopes)))

    def mul(self, other: "Germ") -> "Germ":
        self._require_rank(other)
        if self.coef is None or other.coef is None:
            return Germ.zero(self.n)
        return Germ(self.n, self.coef + other.coef, tuple(a + b for a, b in zip(self.slopes, other.slopes)))

    def inv(self) -> "Germ":
        if self.coef is None:
            raise TropError("zero has no multiplicative inverse")
        return Germ(self.n, -self.coef, tuple(-s for s in self.slopes))

    def pow(self, k: int) -> "Germ":
        if self.coef is None:
            if k <= 0:
                raise TropError("zero has no multiplicative inverse")
            return self
        return Germ(self.n, self.coef * k, tuple(s * k for s in self.slopes))

    def forget(self, k: int) -> "Germ":
        """Drop slope component k (1-based), landing in the rank n-1 semifield."""
        if not 1 <= k <= self.n:
            raise TropError(f"component {k} out of range for rank {self.n}")
        if self.coef is None:
            return Germ.zero(self.n - 1)
        sl = self.slopes[: k - 1] + self.slopes[k:]
        return Germ(self.n - 1, self.coef, sl)

    def slope_sum(self) -> int:
        """Sum of the slope components; zero exactly for locally harmonic germs."""
        if self.coef is None:
            raise TropError("slope sum undefined at zero")
        return sum(self.slopes)

    def to_trop(self) -> TropValue:
        if self.n != 0:
            raise TropError(f"rank {self.n} germ is not a scalar")
        return NEG_INF if self.coef is None else TropValue(self.coef)

    def __str__(self) -> str:
        if self.coef is None:
            return "-inf"
        return f"({self.coef}, ({', '.join(str(s) for s in self.slopes)}))"


@dataclass(frozen=True)
class TropPoly:
    """Tropical Laurent polynomial: a finite exponent-to-coefficient map.

    The empty map is the zero polynomial (identically -inf); absent
    exponents have coefficient -inf.
    """

    nvars: int
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self):
        seen = set()
        for exp, coef in self.terms:
            if len(exp) != self.nvars:
                raise TropError(f"exponent {exp} has wrong arity for {self.nvars} variables")
            if exp in seen:
                raise TropError(f"duplicate exponent {exp}")
            seen.add(exp)
        if list(self.terms) != sorted(self.terms, key=lambda t: t[0]):
            raise TropError("terms must be sorted by exponent")

    @staticmethod
    def of(nvars: int, terms: Mapping[tuple[int, ...], "RatLike"]) -> "TropPoly":
        items = tuple(sorted((tuple(int(e) for e in exp), rat(c)) for exp, c in terms.items()))
        return TropPoly(nvars, items)

    @staticmethod
    def zero(nvars: int) -> "TropPoly":
        return TropPoly(nvars, ())

    @staticmethod
    def monomial(coef, exp: Iterable[int]) -> "TropPoly":
        e = tuple(int(x) for x in exp)
        return TropPoly(len(e), ((e, rat(coef)),))

    @staticmethod
    def constant(nvars: int, coef) -> "TropPoly":
        return TropPoly.monomial(coef, (0,) * nvars)

    @property
    def is_neg_inf(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def term_map(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self.terms)

    def add(self, other: "TropPoly") -> "TropPoly":
        if self.nvars != other.nvars:
            raise TropError("variable count mismatch")
        merged = self.term_map()
        for exp, coef in other.terms:
            if exp in merged:
                merged[exp] = max(merged[exp], coef)
            else:
                merged[exp] = coef
        return TropPoly.of(self.nvars, merged)

    def mul(self, other: "TropPoly") -> "TropPoly":
        if self.nvars != other.nvars:
            raise TropError("variable count mismatch")
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 + c2
                if e not in out or out[e] < c:
                    out[e] = c
        return TropPoly.of(self.nvars, out)

    def scale(self, coef) -> "TropPoly":
        t = TropValue.of(coef) if not isinstance(coef, TropValue) else coef
        if t.is_neg_inf:
            return TropPoly.zero(self.nvars)
        return TropPoly.of(self.nvars, {exp: c + t.coef for exp, c in self.terms})

    def pow(self, k: int) -> "TropPoly":
        if k < 0:
            if not self.is_monomial:
                raise TropError("only monomials are invertible")
            exp, coef = self.terms[0]
            return TropPoly.monomial(-coef, tuple(-e for e in exp)).pow(-k)
        out = TropPoly.constant(self.nvars, 0)
        for _ in range(k):
            out = out.mul(self)
        return out

    def eval(self, point: Iterable) -> tuple[TropValue, frozenset[tuple[int, ...]]]:
        """Value at a rational point and the set of exponents attaining it."""
        pt = [rat(x) for x in point]
        if len(pt) != self.nvars:
            raise TropError(f"point has dimension {len(pt)}, expected {self.nvars}")
        best: Fraction | None = None
        arg: set[tuple[int, ...]] = set()
        for exp, coef in self.terms:
            v = coef + sum((e * x for e, x in zip(exp, pt)), Fraction(0))
            if best is None or v > best:
                best = v
                arg = {exp}
            elif v == best:
                arg.add(exp)
        if best is None:
            return NEG_INF, frozenset()
        return TropValue(best), frozenset(arg)

    def degree(self) -> int | None:
        """Max term degree of a tropical polynomial; ``None`` for the zero polynomial."""
        if any(e < 0 for exp, _ in self.terms for e in exp):
            raise TropError("not a tropical polynomial: negative exponent present")
        if not self.terms:
            return None
        return max(sum(exp) for exp, _ in self.terms)

    def to_germ(self) -> Germ:
        """Collapse all terms into the rank-n germ semifield."""
        out = Germ.zero(self.nvars)
        for exp, coef in self.terms:
            out = out.add(Germ(self.nvars, coef, exp))
        return out

    def format(self) -> str:
        """Text form, one ``coeff : e1 e2 .. en`` line per term; round-trips exactly."""
        if not self.terms:
            return "-inf\n"
        lines = [f"{coef} : {' '.join(str(e) for e in exp)}" for exp, coef in self.terms]
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str, nvars: int | None = None) -> "TropPoly":
        from .errors import FileFormatError

        stripped = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())]
        stripped = [(no, line) for no, line in stripped if line]
        if len(stripped) == 1 and stripped[0][1] == "-inf":
            if nvars is None:
                raise FileFormatError("zero polynomial needs an explicit variable count")
            return TropPoly.zero(nvars)
        terms: dict[tuple[int, ...], Fraction] = {}
        for no, line in stripped:
            if ":" not in line:
                raise FileFormatError("expected 'coeff : exponents'", line=no)
            head, _, tail = line.partition(":")
            try:
                coef = rat(head.strip())
            except TropError as exc:
                raise FileFormatError(str(exc), line=no) from exc
            try:
                exp = tuple(int(tok) for tok in tail.split())
            except ValueError as exc:
                raise FileFormatError(f"bad exponent list {tail.strip()!r}", line=no) from exc
            if nvars is None:
                nvars = len(exp)
            if len(exp) != nvars:
                raise FileFormatError(f"expected {nvars} exponents, got {len(exp)}", line=no)
            if exp in terms:
                raise FileFormatError(f"duplicate exponent {exp}", line=no)
            terms[exp] = coef
        if nvars is None:
            raise FileFormatError("empty polynomial file")
        return TropPoly.of(nvars, terms)

    def __str__(self) -> str:
        return self.format().rstrip("\n")


@dataclass(frozen=True)
class IdentityCheck:
    description: str
    holds: bool


@dataclass(frozen=True)
class GeneratorReport:
    n: int
    ok: bool
    identities: tuple[IdentityCheck, ...]


def germ_generator_report(n: int, bound: int = 8) -> GeneratorReport:
    """Check the explicit identities expressing unit slope germs over small generating sets.

    Rank 1 and 2 are generated by a single germ, higher ranks by two; the
    report replays the defining identities exactly and passes only if every
    one holds.
    """
    if not 1 <= n <= bound:
        raise TropError(f"rank must be between 1 and {bound}")
    checks: list[IdentityCheck] = []

    def unit_slope(k: int) -> Germ:
        return Germ.of(0, tuple(1 if i == k else 0 for i in range(n)))

    def record(desc: str, got: Germ, want: Germ) -> Germ:
        checks.append(IdentityCheck(f"{desc} = {want} (got {got})", got == want))
        return got

    one = Germ.unit(n)
    if n == 1:
        record("(0,(1))", Germ.of(0, (1,)), unit_slope(0))
    elif n == 2:
        v = Germ.of(0, (1, -1))
        record("(0,(1,-1)) [+] (0,(0,0))", v.add(one), unit_slope(0))
        record("(0,(1,-1))^-1 [+] (0,(0,0))", v.inv().add(one), unit_slope(1))
    else:
        v1 = Germ.of(0, (1, 0) + (1,) * (n - 2))
        v2 = Germ.of(0, (0, 1) + tuple(range(1, n - 1)))
        e1 = record("v1 v2^-1 [+] 1", v1.mul(v2.inv()).add(one), unit_slope(0))
        w1 = v1.mul(e1.inv())
        e2 = record(f"v2 (v1 e1^-1)^-({n - 2}) [+] 1", v2.mul(w1.pow(-(n - 2))).add(one), unit_slope(1))
        w2 = v2.mul(e2.inv())
        for k in range(3, n + 1):
            ek = record(
                f"(v1 e1^-1 ..)^{k - 1} (v2 e2^-1 ..)^-1 [+] 1",
                w1.pow(k - 1).mul(w2.inv()).add(one),
                unit_slope(k - 1),
            )
            w1 = w1.mul(ek.inv())
            w2 = w2.mul(ek.pow(k - 2).inv())
    ok = all(c.holds for c in checks)
    return GeneratorReport(n, ok, tuple(checks))
