"""Baire-space names restricted to ultimately periodic sequences.

Everything here is exact: a name is a finite preamble followed by a period
repeated forever, so domain questions such as "does p contain a zero" or
"is p binary" are decided from the two finite lists.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable


class StreamError(ValueError):
    pass


class FiniteWord(tuple):
    """A finite sequence standing where a Baire point was expected."""

    def __repr__(self):
        return f"FiniteWord({list(self)})"


class UPName:
    """The sequence preamble . period^omega in minimal normal form."""

    __slots__ = ("preamble", "period")

    def __init__(self, preamble: Iterable[int] = (), period: Iterable[int] = (0,)):
        pre = [int(x) for x in preamble]
        per = [int(x) for x in period]
        if not per:
            raise StreamError("period must be nonempty")
        if any(x < 0 for x in pre + per):
            raise StreamError("entries must be natural numbers")
        n = len(per)
        for d in range(1, n + 1):
            if n % d == 0 and per == per[:d] * (n // d):
                per = per[:d]
                break
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = [per[-1]] + per[:-1]
        object.__setattr__(self, "preamble", tuple(pre))
        object.__setattr__(self, "period", tuple(per))

    def __setattr__(self, key, value):
        raise AttributeError("UPName is immutable")

    @classmethod
    def const(cls, n: int) -> "UPName":
        """The constant sequence n n n ..."""
        return cls((), (n,))

    @classmethod
    def from_function(cls, f: Callable[[int], int], start: int, period_len: int) -> "UPName":
        """Name of f, given that f(i + period_len) = f(i) for all i >= start."""
        return cls([f(i) for i in range(start)],
                   [f(i) for i in range(start, start + period_len)])

    def at(self, n: int) -> int:
        if n < len(self.preamble):
            return self.preamble[n]
        return self.period[(n - len(self.preamble)) % len(self.period)]

    __getitem__ = at

    def prefix(self, n: int) -> tuple:
        return tuple(self.at(i) for i in range(n))

    def values(self) -> frozenset:
        """range(p)"""
        return frozenset(self.preamble) | frozenset(self.period)

    def recurring(self) -> frozenset:
        """Values occurring infinitely often."""
        return frozenset(self.period)

    def count(self, value: int) -> float:
        """Number of occurrences (math.inf when infinite)."""
        if value in self.period:
            return math.inf
        return self.preamble.count(value)

    def is_binary(self) -> bool:
        return self.values() <= {0, 1}

    @property
    def horizon(self) -> int:
        """Length of preamble plus period: enough symbols to determine the name."""
        return len(self.preamble) + len(self.period)

    def __eq__(self, other):
        if isinstance(other, UPName):
            return self.preamble == other.preamble and self.period == other.period
        return NotImplemented

    def __hash__(self):
        return hash((self.preamble, self.period))

    def __repr__(self):
        return f"UPName({list(self.preamble)}, {list(self.period)})"

    def __str__(self):
        pre = ",".join(map(str, self.preamble))
        per = ",".join(map(str, self.period))
        return f"{pre};({per})"


def parse_upname(text: str) -> UPName:
    """``1,2;(3,4)`` is 1 2 3 4 3 4 ...; parentheses are optional, ``0`` alone is all zeros."""
    if ";" in text:
        pre, per = text.split(";", 1)
    else:
        pre, per = "", text
    per = per.strip()
    if per.startswith("(") != per.endswith(")"):
        raise StreamError(f"unbalanced period in {text!r}")
    per = per.strip("()")

    def nums(s):
        try:
            return [int(x) for x in s.replace(",", " ").split()]
        except ValueError:
            raise StreamError(f"bad stream name {text!r}") from None

    if not nums(per):
        raise StreamError(f"empty period in {text!r}")
    return UPName(nums(pre), nums(per))


# ---------------------------------------------------------------------------
# pairing


def interleave(p: UPName, q: UPName) -> UPName:
    """<p,q>(2n) = p(n), <p,q>(2n+1) = q(n)."""
    start = max(len(p.preamble), len(q.preamble))
    per = math.lcm(len(p.period), len(q.period))
    return UPName.from_function(lambda i: p.at(i // 2) if i % 2 == 0 else q.at(i // 2),
                                2 * start, 2 * per)


def proj_even(p: UPName) -> UPName:
    return UPName.from_function(lambda n: p.at(2 * n), (len(p.preamble) + 1) // 2, len(p.period))


def proj_odd(p: UPName) -> UPName:
    return UPName.from_function(lambda n: p.at(2 * n + 1), len(p.preamble) // 2 + 1,
                                len(p.period))


def cantor_pair(n: int, k: int) -> int:
    """<n,k> = (n+k+1)(n+k)/2 + k"""
    return (n + k + 1) * (n + k) // 2 + k


def cantor_unpair(m: int) -> tuple:
    w = (math.isqrt(8 * m + 1) - 1) // 2
    k = m - w * (w + 1) // 2
    return w - k, k


class TupleName:
    """<p_0, p_1, ...> with finitely many declared components, all others ``default``.

    Tupled names are generally not ultimately periodic (component entries land
    on the quadratically spaced positions <n,k>), so this stays a lazy sequence.
    """

    def __init__(self, components: dict, default: UPName):
        self.components = {int(i): p for i, p in components.items()}
        self.default = default

    def component(self, i: int) -> UPName:
        return self.components.get(i, self.default)

    def at(self, m: int) -> int:
        n, k = cantor_unpair(m)
        return self.component(n).at(k)

    __getitem__ = at

    def prefix(self, n: int) -> tuple:
        return tuple(self.at(i) for i in range(n))

    def as_upname(self) -> UPName | None:
        """The tuple as a UPName when all components are one constant sequence."""
        comps = set(self.components.values()) | {self.default}
        if len(comps) == 1:
            (c,) = comps
            if len(c.preamble) == 0 and len(c.period) == 1:
                return c
        return None


def tuple_countable(components: dict, default: UPName = UPName.const(0)) -> TupleName:
    return TupleName(components, default)


def proj_i(t: TupleName, i: int) -> UPName:
    """i-th component, read back from the tupled sequence itself."""
    ref = t.component(i)
    return UPName.from_function(lambda k: t.at(cantor_pair(i, k)), len(ref.preamble),
                                len(ref.period))


# ---------------------------------------------------------------------------
# shifts and completion


def shift_plus(p: UPName) -> UPName:
    return UPName([x + 1 for x in p.preamble], [x + 1 for x in p.period])


def shift_minus(p: UPName):
    """Concatenate p(i)-1, where 0-1 is the empty word.  A FiniteWord results when
    only finitely many entries are nonzero."""
    pre = [x - 1 for x in p.preamble if x > 0]
    per = [x - 1 for x in p.period if x > 0]
    if not per:
        return FiniteWord(pre)
    return UPName(pre, per)


class _Bottom:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "BOTTOM"

    __str__ = __repr__


BOTTOM = _Bottom()


class _Undefined:
    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class SpaceDescriptor:
    """A represented space: ``decoder`` returns UNDEFINED outside its domain."""

    name: str
    decoder: Callable
    precomplete: bool = False

    def decode(self, p):
        if not isinstance(p, UPName):
            return UNDEFINED
        return self.decoder(p)


BAIRE = SpaceDescriptor("Baire", lambda p: p)
CANTOR = SpaceDescriptor("Cantor", lambda p: p if p.is_binary() else UNDEFINED)
NAT = SpaceDescriptor("N", lambda p: p.at(0))


def decode_completion(space: SpaceDescriptor, p: UPName):
    """delta_bar(p) = delta(p - 1) when p - 1 is a name in the domain, BOTTOM otherwise."""
    q = shift_minus(p)
    if isinstance(q, FiniteWord):
        return BOTTOM
    x = space.decode(q)
    return BOTTOM if x is UNDEFINED else x


def completion_space(space: SpaceDescriptor) -> SpaceDescriptor:
    return SpaceDescriptor(f"completion of {space.name}",
                           lambda p: decode_completion(space, p), precomplete=True)


# ---------------------------------------------------------------------------
# transformers


class PrefixTransformer:
    """A sequential transducer: ``step(state, symbol) -> (state, output word)``.

    Output on a prefix is the concatenation of the step outputs, hence monotone.
    On ultimately periodic input the output is found exactly by detecting a
    repeated state at period boundaries (``key`` maps states to hashable keys).
    """

    def __init__(self, init, step, name: str = "F", key=None):
        self.init = init
        self.step = step
        self.name = name
        self.key = key or (lambda s: s)

    def __repr__(self):
        return f"PrefixTransformer({self.name})"

    def prefix(self, word) -> tuple:
        s, out = self.init, []
        for x in word:
            s, o = self.step(s, x)
            out.extend(o)
        return tuple(out)

    def __call__(self, p, bound: int = 10_000):
        return self.apply(p, bound)

    def apply(self, p: UPName, bound: int = 10_000):
        """Exact output: a UPName, or a FiniteWord when the transducer stalls."""
        s, out = self.init, []
        for x in p.preamble:
            s, o = self.step(s, x)
            out.extend(o)
        seen = {}
        for _ in range(bound):
            k = self.key(s)
            if k in seen:
                pos0 = seen[k]
                cyc = out[pos0:]
                if not cyc:
                    return FiniteWord(out[:pos0])
                return UPName(out[:pos0], cyc)
            seen[k] = len(out)
            for x in p.period:
                s, o = self.step(s, x)
                out.extend(o)
        raise StreamError(f"{self.name}: no periodic behaviour within {bound} periods")


def pointwise(fn, name: str = "pointwise") -> PrefixTransformer:
    return PrefixTransformer(None, lambda s, x: (None, (fn(x),)), name)


IDENTITY = pointwise(lambda x: x, "id")
SHIFT_PLUS = pointwise(lambda x: x + 1, "+1")


def totalize(F: PrefixTransformer, lift: bool = True) -> PrefixTransformer:
    """Total transducer G emitting a keep-alive 0 on every input symbol.

    With ``lift`` F's symbols are emitted +1, so shift_minus(G(p)) = F(p) whenever
    F(p) is infinite.  Without it F's symbols pass unchanged, so
    G(p) - 1 = F(p) - 1: both decode identically under any precompletion.
    """

    def step(s, x):
        s2, o = F.step(s, x)
        return s2, (0,) + (tuple(y + 1 for y in o) if lift else tuple(o))

    return PrefixTransformer(F.init, step, f"total({F.name})", F.key)


def random_transducer(rng: random.Random, states: int = 3, classes: int = 3,
                      max_out: int = 2, max_symbol: int = 4, stall: float = 0.3):
    """Random finite-state transducer on symbol classes x mod ``classes``;
    roughly ``stall`` of the transitions emit nothing."""
    table = {}
    for s in range(states):
        for c in range(classes):
            if rng.random() < stall:
                out = ()
            else:
                out = tuple(rng.randint(0, max_symbol) for _ in range(rng.randint(1, max_out)))
            table[(s, c)] = (rng.randrange(states), out)

    def step(s, x):
        return table[(s, x % classes)]

    return PrefixTransformer(0, step, "random")


def emit_then_stall(word) -> PrefixTransformer:
    """Emits ``word`` on the first input symbol, then nothing."""
    word = tuple(word)
    return PrefixTransformer(True, lambda s, x: (False, word if s else ()), "stall")


# ---------------------------------------------------------------------------
# concrete problems


def lpo(p: UPName) -> int:
    """0 if p contains a zero, else 1."""
    return 0 if 0 in p.values() else 1


def sort_problem(p: UPName) -> UPName:
    """0^k 1^omega if p has exactly k zeros, 0^omega if infinitely many."""
    if not p.is_binary():
        raise StreamError("SORT expects a binary sequence")
    k = p.count(0)
    if k == math.inf:
        return UPName.const(0)
    return UPName([0] * k, [1])


OMEGA = None  # ACC over all of N


class AllNaturalsExcept(frozenset):
    """A cofinite set of naturals, stored as its complement."""

    def __contains__(self, n):
        return isinstance(n, int) and n >= 0 and not frozenset.__contains__(self, n)

    def __repr__(self):
        return f"N \\ {set(self) or '{}'}"

    def take(self, bound: int):
        return [n for n in range(bound) if n in self]


def acc_domain(X, p: UPName) -> bool:
    """range(p) is inside {0, n+1} for some n in X."""
    nonzero = p.values() - {0}
    if len(nonzero) > 1:
        return False
    if not nonzero:
        return True
    (m,) = nonzero
    return X is OMEGA or m - 1 < X


def acc_x(X, p: UPName):
    """{n in X : n+1 not in range(p)}; X is a natural number >= 2 or OMEGA."""
    if X is not OMEGA and X < 2:
        raise StreamError("ACC_X needs X >= 2 or X = omega")
    if not acc_domain(X, p):
        raise StreamError("ACC_X precondition: range(p) must be inside {0, n+1}, n in X")
    excluded = {m - 1 for m in p.values() if m > 0}
    if X is OMEGA:
        return AllNaturalsExcept(excluded)
    return frozenset(n for n in range(X) if n not in excluded)


@dataclass
class Problem:
    """Executable single- or finitely-multi-valued problem on names."""

    name: str
    input_space: SpaceDescriptor
    output_space: SpaceDescriptor
    in_domain: Callable
    solutions: Callable  # element -> finite iterable of output elements
    encode: Callable  # output element -> canonical UPName
    completed: bool = False
    member: Callable | None = None  # exact solution test when solutions() is truncated

    def decode_input(self, p):
        return self.input_space.decode(p)

    def decode_output(self, w):
        return self.output_space.decode(w)

    def accepts(self, x, y) -> bool:
        if not self.in_domain(x):
            return True
        if y is BOTTOM:
            return False
        if self.member is not None:
            return self.member(x, y)
        return y in set(self.solutions(x))


def completion(f: Problem) -> Problem:
    """Total on the completed input space; anything goes outside dom(f)."""
    return Problem(
        f"comp({f.name})",
        completion_space(f.input_space),
        completion_space(f.output_space),
        lambda x: x is not BOTTOM and f.in_domain(x),
        f.solutions,
        lambda y: shift_plus(f.encode(y)),
        completed=True,
        member=f.member,
    )


LPO = Problem("LPO", BAIRE, NAT, lambda x: True, lambda x: [lpo(x)], UPName.const)
SORT = Problem("SORT", CANTOR, CANTOR, lambda x: True, lambda x: [sort_problem(x)],
               lambda y: y)

ACC_SOLUTION_BOUND = 8  # solutions of ACC_N checked per input


def acc_problem(X) -> Problem:
    label = "N" if X is OMEGA else str(X)

    def sols(x):
        s = acc_x(X, x)
        return s.take(ACC_SOLUTION_BOUND) if isinstance(s, AllNaturalsExcept) else sorted(s)

    def dom(x):
        return acc_domain(X, x)

    return Problem(f"ACC_{label}", BAIRE, NAT, dom, sols, UPName.const,
                   member=lambda x, y: y in acc_x(X, x))


ACC_2 = acc_problem(2)
ACC_N = acc_problem(OMEGA)
PROBLEMS = {"LPO": LPO, "SORT": SORT, "ACC_2": ACC_2, "ACC_N": ACC_N}


# ---------------------------------------------------------------------------
# completeness witnesses


def _lpo_k():
    return pointwise(lambda x: 0 if x == 1 else 1, "K_LPO")


def _acc_k(X):
    def step(first, x):
        if first is None and x > 1:
            first = x
        if x > 1 and x == first and (X is OMEGA or x - 2 < X):
            return first, (x - 1,)
        return first, (0,)

    return PrefixTransformer(None, step, "K_ACC")


def completeness_witness(problem: str):
    """(H, K) with H . G . K realizing the completion of ``problem`` from any realizer G."""
    if problem in ("LPO", "SORT"):
        return SHIFT_PLUS, _lpo_k()
    if problem in ("ACC_2", "ACC"):
        return SHIFT_PLUS, _acc_k(2)
    if problem == "ACC_N":
        return SHIFT_PLUS, _acc_k(OMEGA)
    raise KeyError(f"no witness for {problem!r}")


def wbwt_k() -> PrefixTransformer:
    """K(p)(n) = p(n)-1 if p(n) > 0, else the i in {0,1} with i+1 most frequent so far."""

    def step(diff, x):
        if x == 1:
            diff += 1
        elif x == 2:
            diff -= 1
        if x > 0:
            return diff, (x - 1,)
        return diff, (0 if diff >= 0 else 1,)

    return _DriftCounter(0, step, "K_WBWT")


class _DriftCounter(PrefixTransformer):
    """Counter of 1s minus 2s; the counter itself need not repeat on periodic input."""

    def apply(self, p: UPName, bound: int = 10_000):
        delta = p.period.count(1) - p.period.count(2)
        if delta == 0:
            return super().apply(p, bound)
        s, out = self.init, []
        for x in p.preamble:
            s, o = self.step(s, x)
            out.extend(o)
        n = len(p.period)
        for _ in range(bound):
            if s * delta > 0 and abs(s) > n:
                # the sign of the counter is fixed from here on, so every period emits the same word
                cyc = []
                for x in p.period:
                    s, o = self.step(s, x)
                    cyc.extend(o)
                return UPName(out, cyc)
            for x in p.period:
                s, o = self.step(s, x)
                out.extend(o)
        raise StreamError(f"{self.name}: no periodic behaviour within {bound} periods")


def antitone_k() -> PrefixTransformer:
    """p -> 0^(p(0)+1) 1 0^(p(1)+1) 1 ..."""
    return PrefixTransformer(None, lambda s, x: (None, (0,) * (x + 1) + (1,)), "K_antitone")


@dataclass
class ReductionReport:
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self):
        if self.ok:
            return f"{self.checked} samples, all pass"
        head = "; ".join(f"{p}: {why}" for p, why in self.failures[:3])
        return f"{self.checked} samples, {len(self.failures)} failures ({head})"


def check_reduction(f: Problem, g: Problem, H: PrefixTransformer, K: PrefixTransformer,
                    samples) -> ReductionReport:
    """Verify that H(G(K(p))) solves f for every sample and every g-solution G may return."""
    failures = []
    n = 0
    for p in samples:
        if not isinstance(p, UPName):
            raise StreamError(f"sample {p!r} is not an ultimately periodic name")
        x = f.decode_input(p)
        if x is UNDEFINED:
            raise StreamError(f"sample {p} is outside the input representation of {f.name}")
        n += 1
        u = K.apply(p)
        y = g.decode_input(u)
        if y is UNDEFINED or not g.in_domain(y):
            failures.append((p, f"K output {u} is outside dom({g.name})"))
            continue
        for sol in g.solutions(y):
            w = H.apply(g.encode(sol))
            z = f.decode_output(w)
            if not f.accepts(x, z):
                failures.append((p, f"output {w} decodes to {z}, not a solution"))
                break
    return ReductionReport(n, failures)


def all_upnames(max_preamble: int = 4, max_period: int = 3, max_symbol: int = 3):
    """Every distinct name with the given size bounds, in a fixed order."""
    seen = {}
    symbols = range(max_symbol + 1)
    for a in range(max_preamble + 1):
        for pre in itertools.product(symbols, repeat=a):
            for b in range(1, max_period + 1):
                for per in itertools.product(symbols, repeat=b):
                    seen.setdefault(UPName(pre, per), None)
    return list(seen)


def random_upname(rng: random.Random, max_preamble: int = 4, max_period: int = 3,
                  max_symbol: int = 3) -> UPName:
    pre = [rng.randint(0, max_symbol) for _ in range(rng.randint(0, max_preamble))]
    per = [rng.randint(0, max_symbol) for _ in range(rng.randint(1, max_period))]
    return UPName(pre, per)


def unroll_equal(p: UPName, q: UPName) -> bool:
    """Semantic equality by comparing enough symbols of both sequences."""
    n = 2 * max(p.horizon, q.horizon) + math.lcm(len(p.period), len(q.period))
    return p.prefix(n) == q.prefix(n)
