from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PresentationError


LOGGER = logging.getLogger(__name__)

# Letters are signed 1-based generator indices: 3 is a_3, -3 its inverse.
Word = tuple[int, ...]

SENTINEL = -1
_TOKEN = re.compile(r"([^\s^]+?)(?:\^\{?(-?\d+)\}?)?")


def invert(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def power(letter: int, exponent: int) -> Word:
    if exponent >= 0:
        return (letter,) * exponent
    return (-letter,) * (-exponent)


def free_reduce(word: Sequence[int]) -> Word:
    out: list[int] = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def cyclic_reduce(word: Sequence[int]) -> Word:
    reduced = list(free_reduce(word))
    start = 0
    end = len(reduced)
    while end - start > 1 and reduced[start] == -reduced[end - 1]:
        start += 1
        end -= 1
    return tuple(reduced[start:end])


def is_reduced(word: Sequence[int]) -> bool:
    return all(word[k] != -word[k + 1] for k in range(len(word) - 1))


def is_cyclically_reduced(word: Sequence[int]) -> bool:
    return is_reduced(word) and (len(word) < 2 or word[0] != -word[-1])


def rotations(word: Sequence[int]) -> Iterable[tuple[int, Word]]:
    for shift in range(len(word)):
        yield shift, tuple(word[shift:]) + tuple(word[:shift])


def parse_word(text: str, names: Sequence[str] | None = None) -> Word:
    """Parse "1,-2,3" or, given generator names, "a b^-1 c^2" / "ab^-1c^2"."""
    raw = text.strip()
    if not raw:
        return ()
    if re.fullmatch(r"[-+\d,\s]+", raw):
        letters = tuple(int(tok) for tok in re.split(r"[,\s]+", raw) if tok)
        if any(x == 0 for x in letters):
            raise PresentationError("Generator index 0 is not allowed.", code="bad_letter")
        return letters
    if names is None:
        raise PresentationError("Named letters need generator names.", code="bad_letter", details={"word": raw})
    index = {name: k for k, name in enumerate(names, start=1)}
    out: list[int] = []
    if all(len(name) == 1 for name in names):
        tokens = [m.group(0) for m in re.finditer(r"\S\^\{?-?\d+\}?|\S", raw.replace(" ", ""))]
    else:
        tokens = raw.split()
    for token in tokens:
        match = _TOKEN.fullmatch(token)
        if match is None or match.group(1) not in index:
            raise PresentationError(f"Cannot parse {token!r} in word {raw!r}.", code="bad_letter", details={"word": raw})
        out.extend(power(index[match.group(1)], int(match.group(2) or 1)))
    return tuple(out)


def format_word(word: Sequence[int], names: Sequence[str] | None = None) -> str:
    if not word:
        return "1"
    if names is None:
        return ",".join(str(x) for x in word)
    parts = []
    k = 0
    while k < len(word):
        letter = word[k]
        run = 1
        while k + run < len(word) and word[k + run] == letter:
            run += 1
        exponent = run if letter > 0 else -run
        name = names[abs(letter) - 1]
        parts.append(name if exponent == 1 else f"{name}^{exponent}")
        k += run
    sep = "" if all(len(n) == 1 for n in names) else " "
    return sep.join(parts)


def letter_runs(word: Sequence[int]) -> tuple[int, ...]:
    """Lengths of maximal runs of one repeated letter, the default side decomposition."""
    if not word:
        return ()
    if len(word) > 1 and word[0] == word[-1] and len(set(word)) > 1:
        raise PresentationError(
            "A run of one letter wraps around the relator; rotate it or give sides explicitly.",
            code="wrapping_run",
            details={"word": list(word)},
        )
    runs = [1]
    for prev, cur in zip(word, word[1:]):
        if cur == prev:
            runs[-1] += 1
        else:
            runs.append(1)
    return tuple(runs)


def apply_permutation(perm: Sequence[int], word: Sequence[int]) -> Word:
    """Image of a word under the signed generator map g -> perm[g-1]."""
    return tuple(perm[abs(x) - 1] if x > 0 else -perm[abs(x) - 1] for x in word)


@dataclass(frozen=True)
class Presentation:
    generators: int
    relators: tuple[Word, ...]
    names: tuple[str, ...] | None = None
    sides: tuple[tuple[int, ...], ...] | None = None
    generator_permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.generators < 0:
            raise PresentationError("Negative generator count.", code="bad_generators")
        if self.names is not None and len(self.names) != self.generators:
            raise PresentationError("One name per generator is required.", code="bad_generators")
        for j, word in enumerate(self.relators):
            for letter in word:
                if letter == 0 or abs(letter) > self.generators:
                    raise PresentationError(
                        f"Relator {j} uses unknown generator {letter}.",
                        code="bad_letter",
                        details={"relator": j, "letter": letter},
                    )
        if self.sides is not None:
            if len(self.sides) != len(self.relators):
                raise PresentationError("One side decomposition per relator is required.", code="bad_sides")
            for j, (word, sides) in enumerate(zip(self.relators, self.sides)):
                if sum(sides) != len(word) or any(s < 1 for s in sides):
                    raise PresentationError(
                        f"Sides of relator {j} do not cover its letters.",
                        code="bad_sides",
                        details={"relator": j, "sides": list(sides)},
                    )
        perm = self.generator_permutation
        if perm is not None:
            if sorted(abs(x) for x in perm) != list(range(1, self.generators + 1)):
                raise PresentationError("Generator permutation is not a signed permutation.", code="bad_permutation")

    def name(self, generator: int) -> str:
        if self.names is not None:
            return self.names[generator - 1]
        return f"x{generator}"

    def side_lengths(self, j: int) -> tuple[int, ...]:
        if self.sides is not None:
            return self.sides[j]
        return letter_runs(self.relators[j])

    def side_words(self, j: int) -> list[Word]:
        word = self.relators[j]
        out = []
        cursor = 0
        for length in self.side_lengths(j):
            out.append(word[cursor : cursor + length])
            cursor += length
        return out

    def relator_action(self, perm: Sequence[int] | None = None) -> tuple[tuple[int, int], ...]:
        """For each relator, (index of its image relator, cyclic shift in letters)."""
        perm = perm if perm is not None else self.generator_permutation
        if perm is None:
            raise PresentationError("No generator permutation given.", code="bad_permutation")
        lookup: dict[Word, tuple[int, int]] = {}
        for k, word in enumerate(self.relators):
            for shift, rotated in rotations(word):
                lookup.setdefault(rotated, (k, shift))
        out = []
        for j, word in enumerate(self.relators):
            image = apply_permutation(perm, word)
            hit = lookup.get(image)
            if hit is None:
                raise PresentationError(
                    f"Relator {j} is not mapped onto a relator.",
                    code="not_invariant",
                    details={"relator": j},
                )
            out.append(hit)
        return tuple(out)

    def to_dict(self) -> dict:
        payload = {
            "generators": self.generators,
            "relators": [list(w) for w in self.relators],
        }
        if self.names is not None:
            payload["names"] = list(self.names)
        if self.sides is not None:
            payload["sides"] = [list(s) for s in self.sides]
        if self.generator_permutation is not None:
            payload["generator_permutation"] = list(self.generator_permutation)
        return payload

    def describe(self) -> str:
        gens = ", ".join(self.name(g) for g in range(1, self.generators + 1))
        names = self.names or tuple(self.name(g) for g in range(1, self.generators + 1))
        rels = ", ".join(format_word(w, names) for w in self.relators)
        return f"< {gens} | {rels} >"


def _direction(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


class _CosetTable:
    """Coset graph with union-find labels; undefined edges read as SENTINEL."""

    def __init__(self, directions: int, relators: Sequence[Sequence[int]]):
        self.directions = directions
        self.relators = [list(r) for r in relators]
        self.labels: list[int] = []
        self.neighbors: list[list[int]] = []
        self.start = self.add_coset()

    def add_coset(self) -> int:
        c = len(self.labels)
        self.labels.append(c)
        self.neighbors.append([SENTINEL] * self.directions)
        return c

    def find(self, c: int) -> int:
        labels = self.labels
        root = c
        while labels[root] != root:
            root = labels[root]
        while labels[c] != root:
            labels[c], c = root, labels[c]
        return root

    def unify(self, c1: int, c2: int) -> None:
        pending = [(c1, c2)]
        while pending:
            a, b = pending.pop()
            a = self.find(a)
            b = self.find(b)
            if a == b:
                continue
            a, b = min(a, b), max(a, b)
            self.labels[b] = a
            for d in range(self.directions):
                n1 = self.neighbors[a][d]
                n2 = self.neighbors[b][d]
                if n1 == SENTINEL:
                    self.neighbors[a][d] = n2
                elif n2 != SENTINEL:
                    pending.append((n1, n2))

    def step(self, c: int, d: int) -> int:
        c = self.find(c)
        row = self.neighbors[c]
        if row[d] == SENTINEL:
            row[d] = self.add_coset()
        return self.find(row[d])

    def trace(self, c: int, word: Sequence[int]) -> int:
        c = self.find(c)
        for d in reversed(word):
            c = self.step(c, d)
        return c

    def live(self) -> int:
        return sum(1 for c in range(len(self.labels)) if self.find(c) == c)


def coset_enumeration(p: Presentation, max_cosets: int = 10_000) -> int | None:
    """Index of the trivial subgroup (the group order), or None once ``max_cosets`` is exceeded."""
    directions = 2 * p.generators
    relators = [[_direction(x) for x in w] for w in p.relators if w]
    relators.extend([d, d ^ 1] for d in range(directions))
    table = _CosetTable(directions, relators)
    cursor = 0
    while cursor < len(table.labels):
        c = table.find(cursor)
        if c == cursor:
            for rel in table.relators:
                table.unify(table.trace(c, rel), c)
        cursor += 1
        if len(table.labels) > max_cosets:
            LOGGER.info("coset enumeration stopped at %d cosets", len(table.labels))
            return None
    count = table.live()
    LOGGER.debug("coset enumeration: %d cosets (%d defined)", count, len(table.labels))
    return count


def generator_orbits(perm: Sequence[int]) -> list[list[int]]:
    seen: set[int] = set()
    orbits = []
    for g in range(1, len(perm) + 1):
        if g in seen:
            continue
        orbit = []
        cur = g
        while cur not in seen:
            seen.add(cur)
            orbit.append(cur)
            cur = abs(perm[cur - 1])
        orbits.append(sorted(orbit))
    return orbits


def quotient_presentation(p: Presentation, generator_permutation: Sequence[int] | None = None) -> Presentation:
    """Presentation of the orbit complex: one generator per orbit, one reduced relator per relator orbit."""
    perm = tuple(generator_permutation if generator_permutation is not None else p.generator_permutation or ())
    if len(perm) != p.generators:
        raise PresentationError("A generator permutation is required.", code="bad_permutation")
    if any(x < 0 for x in perm):
        raise PresentationError("Orbit presentations need an orientation-preserving permutation.", code="bad_permutation")
    orbits = generator_orbits(perm)
    orbit_of = {g: k for k, orbit in enumerate(orbits, start=1) for g in orbit}
    action = p.relator_action(perm)
    kept = []
    seen: set[int] = set()
    for j in range(len(p.relators)):
        if j in seen:
            continue
        cur = j
        while cur not in seen:
            seen.add(cur)
            cur = action[cur][0]
        image = tuple(orbit_of[abs(x)] if x > 0 else -orbit_of[abs(x)] for x in p.relators[j])
        kept.append(cyclic_reduce(free_reduce(image)))
    names = tuple(f"p({p.name(orbit[0])})" for orbit in orbits)
    return Presentation(len(orbits), tuple(kept), names)


def meeting_points(p: Presentation, a_letters: Iterable[int]) -> list[tuple[int, int]]:
    """Corner pairs (a-letter, b-letter), normalized so the a-letter comes first."""
    a_set = set(a_letters)
    out = []
    for j in range(len(p.relators)):
        sides = p.side_words(j)
        for k, side in enumerate(sides):
            nxt = sides[(k + 1) % len(sides)]
            x, y = side[-1], nxt[0]
            x_is_a = abs(x) in a_set
            y_is_a = abs(y) in a_set
            if x_is_a == y_is_a:
                raise PresentationError(
                    f"Corner {k} of relator {j} does not join an a-side to a b-side.",
                    code="bad_sides",
                    details={"relator": j, "corner": k},
                )
            out.append((x, y) if x_is_a else (-y, -x))
    return out


def meeting_points_distinct(p: Presentation, a_letters: Iterable[int]) -> bool:
    points = meeting_points(p, a_letters)
    return len(points) == len(set(points))


def word_family_general(n: int, j: int, *, shifted: bool = True) -> tuple[tuple[Word, tuple[int, ...]], tuple[Word, tuple[int, ...]]]:
    """The two 2n-gon labellings for index j with single-letter sides; a_i = i, b_i = n + i.

    ``shifted`` picks A_1 B_j A_2 B_{j+1} ... and A_1 B_j^-1 A_2 B_{j-1}^-1 ...; otherwise B_j repeats.
    """
    if n < 3:
        raise PresentationError("The labelling families need n >= 3.", code="out_of_range")

    def b(idx: int) -> int:
        return n + ((idx - 1) % n) + 1

    first: list[int] = []
    second: list[int] = []
    for i in range(1, n + 1):
        first.append(i)
        first.append(b(j + i - 1) if shifted else b(j))
        second.append(i)
        second.append(-(b(j - i + 1) if shifted else b(j)))
    sides = (1,) * (2 * n)
    return (tuple(first), sides), (tuple(second), sides)


def word_family_presentation(n: int, *, shifted: bool = True) -> Presentation:
    relators = []
    sides = []
    for j in range(1, n + 1):
        for word, side in word_family_general(n, j, shifted=shifted):
            relators.append(word)
            sides.append(side)
    names = tuple(f"a{i}" for i in range(1, n + 1)) + tuple(f"b{i}" for i in range(1, n + 1))
    return Presentation(2 * n, tuple(relators), names, tuple(sides))
