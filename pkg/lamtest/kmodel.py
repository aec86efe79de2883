"""
K-models as symbolic ordered webs.

A model is a finite partial K-model (atoms, a strict order, and the partial
iso j given as a table); its extensional completion is never built. Elements
of the completion are atoms or arrow nodes `{a, b} -> tail`, compared lazily
by unfolding atoms one step through j.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Union

from lamtest import config
from lamtest.errors import (
    ModelMismatchError,
    ModelSpecError,
    ParseError,
    ResourceLimitError,
    WindowExceededError,
)

logger = logging.getLogger("kmodel")


# -------------------------------------------------
# Elements
# -------------------------------------------------
@dataclass(frozen=True)
class Atom:
    name: str

    @cached_property
    def key(self) -> tuple:
        return (0, self.name)

    @property
    def depth(self) -> int:
        return 0

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arrow:
    head: tuple["Element", ...]
    tail: "Element"

    @cached_property
    def key(self) -> tuple:
        return (1, tuple(e.key for e in self.head), self.tail.key)

    @cached_property
    def depth(self) -> int:
        return 1 + max([e.depth for e in self.head] + [self.tail.depth])

    def __str__(self) -> str:
        return "{" + ", ".join(str(e) for e in self.head) + "} -> " + str(self.tail)


Element = Union[Atom, Arrow]
Antichain = tuple[Element, ...]


def as_antichain(elements: Iterable[Element]) -> Antichain:
    """Sorted, duplicate-free tuple. Does not check incomparability."""
    return tuple(sorted(set(elements), key=lambda e: e.key))


def show_antichain(a: Antichain) -> str:
    return "{" + ", ".join(str(e) for e in a) + "}"


# -------------------------------------------------
# GSpec: finitely presented g : N -> N
# -------------------------------------------------
_GSPEC_ARITY = {"const": 1, "affine": 2}


@dataclass(frozen=True)
class GSpec:
    kind: str
    values: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("const", "table", "affine"):
            raise ModelSpecError(f"unknown gspec kind {self.kind!r}")
        if self.kind == "table" and not self.values:
            raise ModelSpecError("table gspec needs at least one value")
        if self.kind in _GSPEC_ARITY and len(self.values) != _GSPEC_ARITY[self.kind]:
            raise ModelSpecError(f"{self.kind} gspec takes {_GSPEC_ARITY[self.kind]} values")
        if any(v < 0 for v in self.values):
            raise ModelSpecError("gspec values must be non-negative")

    def __call__(self, n: int) -> int:
        if self.kind == "const":
            return self.values[0]
        if self.kind == "table":
            return self.values[min(n, len(self.values) - 1)]
        a, b = self.values
        return a * n + b

    @property
    def tail_start(self) -> int | None:
        """First index from which g is constant (None for affine)."""
        if self.kind == "const":
            return 0
        if self.kind == "table":
            return len(self.values) - 1
        return None

    @property
    def key(self) -> tuple:
        return (self.kind, self.values)

    @classmethod
    def const(cls, k: int) -> "GSpec":
        return cls("const", (k,))

    @classmethod
    def table(cls, values: Iterable[int]) -> "GSpec":
        return cls("table", tuple(values))

    @classmethod
    def parse(cls, text: str) -> "GSpec":
        parts = text.replace(",", " ").split()
        if not parts:
            raise ParseError("empty gspec")
        kind, *rest = parts
        try:
            values = tuple(int(v) for v in rest)
        except ValueError:
            raise ParseError(f"gspec values must be integers: {text!r}")
        try:
            return cls(kind, values)
        except ModelSpecError as e:
            raise ParseError(f"bad gspec {text!r}: {e}")

    def __str__(self) -> str:
        if self.kind == "table":
            return "table " + ",".join(str(v) for v in self.values)
        return f"{self.kind} " + " ".join(str(v) for v in self.values)


# -------------------------------------------------
# Models
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class Model:
    name: str
    atoms: tuple[str, ...]
    order: frozenset  # strict pairs (p, q) meaning p < q, transitively closed
    entries: tuple  # (head atom names sorted, tail atom, image atom)
    frontier: frozenset = frozenset()
    shift: tuple = ()  # partial atom automorphism used for lasso detection; empty = identity

    def __post_init__(self):
        object.__setattr__(self, "atom_set", frozenset(self.atoms))
        object.__setattr__(self, "fold_table", {(h, t): img for h, t, img in self.entries})
        object.__setattr__(self, "unfold_table", {img: (h, t) for h, t, img in self.entries})
        object.__setattr__(self, "shift_table", dict(self.shift))
        object.__setattr__(self, "_hash", hash(self.signature))

    @property
    def signature(self) -> tuple:
        return (
            tuple(sorted(self.atoms)),
            tuple(sorted(self.order)),
            tuple(sorted(self.entries)),
            tuple(sorted(self.frontier)),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Model) and self.signature == other.signature

    def __hash__(self) -> int:
        return self._hash

    def base_leq(self, p: str, q: str) -> bool:
        return p == q or (p, q) in self.order

    def __str__(self) -> str:
        return self.name


def check_atom(model: Model, name: str) -> None:
    if name not in model.atom_set:
        raise ModelMismatchError(f"unknown atom {name!r} for model {model.name}")


def check_element(model: Model, alpha: Element) -> None:
    if isinstance(alpha, Atom):
        check_atom(model, alpha.name)
        return
    for e in alpha.head:
        check_element(model, e)
    check_element(model, alpha.tail)


def _split(model: Model, alpha: Element) -> tuple[Antichain, Element]:
    if isinstance(alpha, Arrow):
        return alpha.head, alpha.tail
    check_atom(model, alpha.name)
    if alpha.name in model.frontier:
        raise WindowExceededError(
            f"atom {alpha.name} lies on the frontier of the {model.name} window; "
            f"raise the window size"
        )
    head, tail = model.unfold_table[alpha.name]
    return tuple(Atom(h) for h in head), Atom(tail)


@lru_cache(maxsize=1 << 18)
def leq(model: Model, alpha: Element, beta: Element) -> bool:
    """alpha <= beta in the completion of model."""
    if isinstance(alpha, Atom) and isinstance(beta, Atom):
        check_atom(model, alpha.name)
        check_atom(model, beta.name)
        return model.base_leq(alpha.name, beta.name)
    a, a_tail = _split(model, alpha)
    b, b_tail = _split(model, beta)
    # contravariant in the head
    return antichain_leq(model, b, a) and leq(model, a_tail, b_tail)


def antichain_leq(model: Model, a: Iterable[Element], b: Iterable[Element]) -> bool:
    b = tuple(b)
    return all(any(leq(model, x, y) for y in b) for x in a)


def comparable(model: Model, x: Element, y: Element) -> bool:
    return leq(model, x, y) or leq(model, y, x)


def is_antichain(model: Model, s: Iterable[Element]) -> bool:
    items = as_antichain(s)
    return not any(comparable(model, x, y) for x, y in itertools.combinations(items, 2))


def normalize_antichain(model: Model, s: Iterable[Element]) -> Antichain:
    items = as_antichain(s)
    kept = []
    for x in items:
        dominated = False
        for y in items:
            if y == x or not leq(model, x, y):
                continue
            if not leq(model, y, x) or y.key < x.key:
                dominated = True
                break
        if not dominated:
            kept.append(x)
    return tuple(kept)


def fold(model: Model, a: Iterable[Element], alpha: Element) -> Element:
    head = as_antichain(a)
    if isinstance(alpha, Atom) and all(isinstance(e, Atom) for e in head):
        image = model.fold_table.get((tuple(e.name for e in head), alpha.name))
        if image is not None:
            return Atom(image)
    return Arrow(head, alpha)


def unfold(model: Model, alpha: Element, k: int) -> tuple[tuple[Antichain, ...], Element]:
    heads = []
    for _ in range(k):
        head, alpha = _split(model, alpha)
        heads.append(head)
    return tuple(heads), alpha


def shift_element(model: Model, alpha: Element) -> Element | None:
    """Apply the window shift; None where it is undefined."""
    if not model.shift:
        return alpha
    if isinstance(alpha, Atom):
        target = model.shift_table.get(alpha.name)
        return None if target is None else Atom(target)
    head = [shift_element(model, e) for e in alpha.head]
    tail = shift_element(model, alpha.tail)
    if tail is None or any(e is None for e in head):
        return None
    return fold(model, head, tail)


# -------------------------------------------------
# Enumeration
# -------------------------------------------------
def enumerate_antichains(model: Model, pool: Iterable[Element], width: int) -> Iterator[Antichain]:
    pool = as_antichain(pool)
    for size in range(width + 1):
        for combo in itertools.combinations(pool, size):
            if all(not comparable(model, x, y) for x, y in itertools.combinations(combo, 2)):
                yield combo


def enumerate_elements(model: Model, depth: int, width: int) -> tuple[Element, ...]:
    """Canonical elements of arrow-nesting <= depth, heads of at most width members.

    Frontier atoms of a materialized window are left out: they cannot be
    compared against arrows.
    """
    seen = {Atom(a) for a in model.atoms if a not in model.frontier}
    level = sorted(seen, key=lambda e: e.key)
    for _ in range(depth):
        heads = list(enumerate_antichains(model, level, width))
        for a in heads:
            for tail in level:
                e = fold(model, a, tail)
                if e in seen:
                    continue
                seen.add(e)
                if len(seen) > config.MAX_ELEMENTS:
                    raise ResourceLimitError(
                        f"more than {config.MAX_ELEMENTS} elements at depth {depth}, width {width}"
                    )
        level = sorted(seen, key=lambda e: e.key)
    logger.debug(f"{model.name}: {len(level)} elements at depth {depth}, width {width}")
    return tuple(level)


# -------------------------------------------------
# Builtin models
# -------------------------------------------------
BUILTINS = {
    "dinf": "Scott's D-infinity: * = {} -> *",
    "park": "Park's P-infinity: * = {*} -> *",
    "norm": "Norm (D*-infinity): p < q, p = {q} -> p, q = {p} -> q",
    "strat": "a well-stratified web: * < o, * = {} -> *, o = {} -> o",
    "omega": "inductive omega completion: n = {k | k < n} -> n (windowed)",
    "zed": "co-inductive Z completion: n = {n+1} -> n (windowed)",
    "hf": "functionals H^f: a{n}_1 = {} -> ... -> {} -> {a{n+1}_1} -> * (windowed, needs f table)",
}


def _close_order(atoms: Iterable[str], pairs: Iterable[tuple[str, str]]) -> frozenset:
    closed = set(pairs)
    changed = True
    while changed:
        changed = False
        for (p, q), (r, s) in itertools.product(list(closed), repeat=2):
            if q == r and (p, s) not in closed:
                closed.add((p, s))
                changed = True
    loops = sorted(p for p, q in closed if p == q)
    if loops:
        raise ModelSpecError(f"order is not antisymmetric (cycle through {', '.join(loops)})")
    return frozenset(closed)


def _validate(model: Model) -> Model:
    atoms = model.atom_set
    for head, tail, image in model.entries:
        for name in (*head, tail, image):
            if name not in atoms:
                raise ModelSpecError(f"j entry mentions unknown atom {name!r}")
        if tuple(sorted(set(head))) != head:
            raise ModelSpecError(f"j entry head {head} is not a sorted set")
        for p, q in itertools.combinations(head, 2):
            if model.base_leq(p, q) or model.base_leq(q, p):
                raise ModelSpecError(f"j entry head {{{', '.join(head)}}} is not an antichain")
    if len(model.fold_table) != len(model.entries):
        raise ModelSpecError("j has two images for the same (antichain, atom)")
    if len(model.unfold_table) != len(model.entries):
        raise ModelSpecError("j is not injective")
    for name in model.frontier:
        if name not in atoms:
            raise ModelSpecError(f"frontier atom {name!r} is not an atom")
        if name in model.unfold_table:
            raise ModelSpecError(f"frontier atom {name!r} already has a j-preimage")
    missing = sorted(atoms - model.frontier - set(model.unfold_table))
    if missing:
        raise ModelSpecError(f"j is not surjective: no preimage for {', '.join(missing)}")

    def arrow_leq(e1, e2) -> bool:
        (h1, t1, _), (h2, t2, _) = e1, e2
        heads = all(any(model.base_leq(x, y) for y in h1) for x in h2)
        return heads and model.base_leq(t1, t2)

    for e1, e2 in itertools.product(model.entries, repeat=2):
        images = model.base_leq(e1[2], e2[2])
        arrows = arrow_leq(e1, e2)
        if images and not arrows:
            raise ModelSpecError(f"j is not order-reflecting: {e1[2]} <= {e2[2]}")
        if arrows and not images:
            raise ModelSpecError(f"j is not order-preserving at {e1[2]}, {e2[2]}")
    return model


def _make(name, atoms, pairs, entries, frontier=(), shift=()) -> Model:
    atoms = tuple(atoms)
    model = Model(
        name=name,
        atoms=atoms,
        order=_close_order(atoms, pairs),
        entries=tuple((tuple(sorted(h)), t, i) for h, t, i in entries),
        frontier=frozenset(frontier),
        shift=tuple(shift),
    )
    return _validate(model)


def builtin(name: str, size: int | None = None, table: Iterable[int] | None = None) -> Model:
    size = config.WINDOW_ATOMS if size is None else size
    if name == "dinf":
        return _make("dinf", ["*"], [], [((), "*", "*")])
    if name == "park":
        return _make("park", ["*"], [], [(("*",), "*", "*")])
    if name == "norm":
        return _make("norm", ["p", "q"], [("p", "q")], [(("p",), "q", "q"), (("q",), "p", "p")])
    if name == "strat":
        return _make("strat", ["*", "o"], [("*", "o")], [((), "*", "*"), ((), "o", "o")])
    if name == "omega":
        if size < 1:
            raise ModelSpecError("omega needs a window of at least one atom")
        atoms = [str(n) for n in range(size)]
        entries = [(tuple(str(k) for k in range(n)), str(n), str(n)) for n in range(size)]
        return _make(f"omega[{size}]", atoms, [], entries)
    if name == "zed":
        if size < 1:
            raise ModelSpecError("zed needs a window of at least one atom")
        span = range(-size, size + 1)
        entries = [((str(n + 1),), str(n), str(n)) for n in span if n < size]
        shift = [(str(n), str(n + 1)) for n in span if n < size]
        return _make(f"zed[{size}]", [str(n) for n in span], [], entries, {str(size)}, shift)
    if name == "hf":
        if table is None:
            raise ModelSpecError("hf needs an f table")
        return _build_hf(GSpec.table(table), max(size, 1))
    raise ModelSpecError(f"unknown builtin model {name!r}; known: {', '.join(BUILTINS)}")


def hf_atom(n: int, j: int) -> str:
    return f"a{n}_{j}"


def _build_hf(f: GSpec, levels: int) -> Model:
    atoms = ["*"]
    entries = [((), "*", "*")]
    for n in range(levels):
        atoms += [hf_atom(n, j) for j in range(1, f(n) + 2)]
        entries += [((), hf_atom(n, j + 1), hf_atom(n, j)) for j in range(1, f(n) + 1)]
        if n + 1 < levels:
            entries.append(((hf_atom(n + 1, 1),), "*", hf_atom(n, f(n) + 1)))
    # every a{n}_j sits below *, which makes j an order iso
    pairs = [(a, "*") for a in atoms if a != "*"]
    last = levels - 1
    shift = [("*", "*")] + [
        (hf_atom(n, j), hf_atom(n + 1, j))
        for n in range(f.tail_start, last)
        for j in range(1, f(n) + 2)
    ]
    return _make(
        f"hf[{f}][{levels}]",
        atoms,
        pairs,
        entries,
        {hf_atom(last, f(last) + 1)},
        shift,
    )


# -------------------------------------------------
# Model-spec documents
# -------------------------------------------------
_ARROW_LINE = re.compile(r"^\{([^}]*)\}\s*(\S+)\s*=\s*(\S+)$")


def load_model(text: str, name: str = "custom") -> Model:
    atoms: list[str] = []
    pairs: list[tuple[str, str]] = []
    entries: list[tuple[tuple[str, ...], str, str]] = []
    frontier: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ModelSpecError(f"line {lineno}: expected 'key: value', got {raw.strip()!r}")
        key, rest = key.strip(), rest.strip()
        if key == "atoms":
            atoms += rest.split()
        elif key == "order":
            chain = [p.strip() for p in rest.split("<")]
            if len(chain) < 2 or not all(chain):
                raise ModelSpecError(f"line {lineno}: expected 'order: p < q'")
            pairs += list(zip(chain, chain[1:]))
        elif key == "arrow":
            m = _ARROW_LINE.match(rest)
            if not m:
                raise ModelSpecError(f"line {lineno}: expected 'arrow: {{a, b}} tail = image'")
            head = tuple(sorted({h.strip() for h in m.group(1).split(",") if h.strip()}))
            entries.append((head, m.group(2), m.group(3)))
        elif key == "frontier":
            frontier += rest.split()
        else:
            raise ModelSpecError(f"line {lineno}: unknown key {key!r}")
    if not atoms:
        raise ModelSpecError("model spec declares no atoms")
    if len(set(atoms)) != len(atoms):
        raise ModelSpecError("model spec declares an atom twice")
    known = set(atoms)
    for p, q in pairs:
        for a in (p, q):
            if a not in known:
                raise ModelSpecError(f"order mentions unknown atom {a!r}")
    logger.info(f"📄 Loaded model {name}: {len(atoms)} atoms, {len(entries)} j entries")
    return _make(name, atoms, pairs, entries, frontier)
