"""Table physics: hidden-identity cards, shuffles, the card supply and the public event log.

Every party (prover model included) touches cards only through :class:`Table`.
Shift values drawn for shuffles stay inside the table; the transcript records
only what an onlooker at a real table would see.
"""

from __future__ import annotations

import enum
import random
from collections import Counter
from typing import Callable, Iterable, Sequence

DEFAULT_SEED = 42

_TWO_53 = 1 << 53


class Suit(enum.Enum):
    CLUB = "♣"
    HEART = "♥"
    SPADE = "♠"
    DIAMOND = "♦"

    # members are singletons; identity hashing keeps dict/Counter lookups in C
    __hash__ = object.__hash__

    def __str__(self) -> str:
        return self.name


CLUB, HEART, SPADE, DIAMOND = Suit.CLUB, Suit.HEART, Suit.SPADE, Suit.DIAMOND


class ProtocolError(RuntimeError):
    """A party tried an action the table does not allow (e.g. flipping a face-up card up)."""


class SupplyError(ProtocolError):
    """The supply ran out of a suit while in strict mode."""


class TableCard:
    __slots__ = ("suit", "face_up", "uid")

    def __init__(self, suit: Suit, face_up: bool = False, uid: int = -1):
        self.suit = suit
        self.face_up = face_up
        self.uid = uid

    def __repr__(self) -> str:
        return f"TableCard({self.suit.name}, {'up' if self.face_up else 'down'}, #{self.uid})"


class TableSequence:
    """An ordered row of cards. Positions are taken modulo the length."""

    __slots__ = ("cards",)

    def __init__(self, cards: Iterable[TableCard] = ()):
        self.cards = list(cards)

    def __len__(self) -> int:
        return len(self.cards)

    def __iter__(self):
        return iter(self.cards)

    def __getitem__(self, pos: int) -> TableCard:
        return self.cards[pos % len(self.cards)]

    def index(self, pos: int) -> int:
        return pos % len(self.cards)

    def rotate(self, r: int) -> None:
        """Cyclic shift to the right by ``r``."""
        k = len(self.cards)
        r %= k
        if r:
            self.cards[:] = self.cards[k - r:] + self.cards[:k - r]

    def hidden_suits(self) -> list[Suit]:
        """Ground truth, for assertions and the prover's own bookkeeping only."""
        return [c.suit for c in self.cards]

    def view(self) -> list[Suit | None]:
        """What an onlooker sees: suits of face-up cards, ``None`` for backs."""
        return [c.suit if c.face_up else None for c in self.cards]


class PileMatrix:
    """An l x k arrangement whose columns (piles) move together under shuffles."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[TableSequence]):
        if not rows:
            raise ProtocolError("a pile matrix needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ProtocolError("all rows of a pile matrix must have the same length")
        self.rows = list(rows)

    @property
    def cols(self) -> int:
        return len(self.rows[0])

    def column(self, j: int) -> list[TableCard]:
        return [row[j] for row in self.rows]


class Supply:
    """Per-suit card stock off the table.

    In strict mode drawing from an empty suit raises :class:`SupplyError`.
    Otherwise the missing card is borrowed and counted in ``shortfall`` so a
    run can still finish and report how far the deck fell short.
    """

    def __init__(self, counts: dict[Suit, int] | None = None, strict: bool = True):
        self.available = Counter({s: 0 for s in Suit})
        if counts:
            self.available.update(counts)
        self.initial = Counter(self.available)
        self.strict = strict
        self.shortfall = Counter()
        self.low_water = Counter(self.available)
        self._next_uid = 0

    def copy(self) -> "Supply":
        other = Supply(strict=self.strict)
        other.available = Counter(self.available)
        other.initial = Counter(self.initial)
        other.shortfall = Counter(self.shortfall)
        other.low_water = Counter(self.low_water)
        other._next_uid = self._next_uid
        return other

    def draw(self, suit: Suit, face_up: bool = False) -> TableCard:
        if self.available[suit] <= 0:
            if self.strict:
                raise SupplyError(f"supply has no {suit.name} left")
            self.shortfall[suit] += 1
        else:
            self.available[suit] -= 1
            if self.available[suit] < self.low_water[suit]:
                self.low_water[suit] = self.available[suit]
        uid = self._next_uid
        self._next_uid += 1
        return TableCard(suit, face_up, uid)

    def give_back(self, card: TableCard) -> None:
        self.available[card.suit] += 1

    def total(self) -> int:
        return sum(self.available.values())


class RandomSource:
    """Seeded uniform shift generator.

    Draws are built from ``random.Random.random()``, whose output is stable
    across Python versions and platforms for a given seed, and turned into
    exact uniform integers by rejection sampling.
    """

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = seed
        self._rng = random.Random(seed)

    def shift(self, k: int) -> int:
        if k <= 0:
            raise ProtocolError("cannot draw a shift over an empty range")
        if k == 1:
            return 0
        limit = _TWO_53 - _TWO_53 % k
        rand = self._rng.random
        while True:
            x = int(rand() * _TWO_53)
            if x < limit:
                return x % k


class ForcedShifts(RandomSource):
    """Test-only source that replays prescribed shifts.

    ``shifts`` is either a sequence (consumed in order; values must lie in
    range) or a callable ``f(draw_index, k) -> r`` whose result is reduced
    mod k. Construction requires ``testing=True`` so it cannot be picked up
    by accident where real randomness is expected.
    """

    def __init__(self, shifts: Sequence[int] | Callable[[int, int], int], *, testing: bool = False):
        if not testing:
            raise ProtocolError("ForcedShifts is a test hook; pass testing=True")
        self.seed = None
        self._shifts = shifts
        self.draws = 0

    def shift(self, k: int) -> int:
        i = self.draws
        self.draws += 1
        if callable(self._shifts):
            return self._shifts(i, k) % k
        if i >= len(self._shifts):
            raise ProtocolError(f"forced shift list exhausted after {i} draws")
        r = self._shifts[i]
        if not 0 <= r < k:
            raise ProtocolError(f"forced shift {r} outside range 0..{k - 1}")
        return r


class ShiftPath(RandomSource):
    """Replays a prefix of shifts, then draws 0, recording every range seen.

    Used to walk the whole tree of shuffle outcomes for exact distribution
    checks (see :func:`enumerate_shift_paths`).
    """

    def __init__(self, prefix: Sequence[int]):
        self.seed = None
        self.prefix = list(prefix)
        self.taken: list[tuple[int, int]] = []

    def shift(self, k: int) -> int:
        i = len(self.taken)
        r = self.prefix[i] if i < len(self.prefix) else 0
        self.taken.append((r, k))
        return r


def enumerate_shift_paths(run: Callable[[RandomSource], object]):
    """Yield ``(probability, result)`` for every shuffle outcome of ``run``.

    ``run`` is called once per leaf of the outcome tree; probabilities are
    exact fractions and sum to one.
    """
    from fractions import Fraction

    prefix: list[int] = []
    while True:
        source = ShiftPath(prefix)
        result = run(source)
        denom = 1
        for _, k in source.taken:
            denom *= k
        yield Fraction(1, denom), result
        taken = source.taken
        j = len(taken) - 1
        while j >= 0 and taken[j][0] == taken[j][1] - 1:
            j -= 1
        if j < 0:
            return
        prefix = [r for r, _ in taken[:j]] + [taken[j][0] + 1]


# --- transcript ----------------------------------------------------------

# Events are tagged tuples: ("PLACE", count, face_down, suits), ("SHUFFLE", kind,
# size, visible), ("REVEAL", pos, suit), ("REPLACE", pos, suit), ("REMOVE", pos),
# ("ROTATE", amount), ("VERDICT", accept).


def format_event(event: tuple) -> str:
    tag = event[0]
    if tag == "PLACE":
        _, count, face_down, suits = event
        if face_down:
            return f"PLACE {count} DOWN"
        return " ".join([f"PLACE {count} UP"] + [s.name for s in suits])
    if tag == "SHUFFLE":
        _, kind, size, visible = event
        text = f"SHUFFLE {kind} {size}"
        if visible:
            text += " UP " + " ".join(f"{where}:{suit.name}" for where, suit in visible)
        return text
    if tag in ("REVEAL", "REPLACE"):
        return f"{tag} {event[1]} {event[2].name}"
    if tag == "VERDICT":
        return "VERDICT ACCEPT" if event[1] else "VERDICT REJECT"
    return f"{tag} {event[1]}"


def parse_event(line: str) -> tuple:
    parts = line.split()
    tag = parts[0]
    if tag == "PLACE":
        count = int(parts[1])
        if parts[2] == "DOWN":
            return ("PLACE", count, True, ())
        return ("PLACE", count, False, tuple(Suit[p] for p in parts[3:]))
    if tag == "SHUFFLE":
        visible = ()
        if len(parts) > 3:
            visible = tuple(
                (where, Suit[name]) for where, name in (p.split(":") for p in parts[4:])
            )
        return ("SHUFFLE", parts[1], int(parts[2]), visible)
    if tag in ("REVEAL", "REPLACE"):
        return (tag, int(parts[1]), Suit[parts[2]])
    if tag == "VERDICT":
        return ("VERDICT", parts[1] == "ACCEPT")
    if tag in ("REMOVE", "ROTATE"):
        return (tag, int(parts[1]))
    raise ValueError(f"unknown transcript event {line!r}")


class Transcript:
    """Ordered log of everything a verifier or onlooker can observe."""

    def __init__(self):
        self.events: list[tuple] = []

    def __len__(self) -> int:
        return len(self.events)

    def append(self, event: tuple) -> None:
        if self.events and self.events[-1][0] == "VERDICT":
            raise ProtocolError("no events may follow the verdict")
        self.events.append(event)

    @property
    def verdict(self) -> bool | None:
        if self.events and self.events[-1][0] == "VERDICT":
            return self.events[-1][1]
        return None

    def lines(self) -> list[str]:
        return [format_event(e) for e in self.events]

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def canonical(self) -> tuple[str, ...]:
        return tuple(self.lines())

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        t = cls()
        for line in text.splitlines():
            if line.strip():
                t.append(parse_event(line))
        return t


# --- the table ------------------------------------------------------------


class Table:
    """Shared physical state of one protocol run.

    Holds the supply, the randomness, the public transcript and the shuffle
    counter. ``last_shift`` keeps the most recent hidden shift for test
    assertions only; it is never written to the transcript.
    """

    def __init__(self, supply: Supply, rng: RandomSource, transcript: Transcript | None = None):
        self.supply = supply
        self.rng = rng
        self.transcript = transcript if transcript is not None else Transcript()
        self.shuffles = 0
        self.last_shift: int | None = None
        # leaky-variant hook: pile shuffles still draw and log, but move nothing
        self.rig_piles = False

    def _log(self, event: tuple) -> None:
        self.transcript.append(event)

    # placing cards

    def place(self, suits: Sequence[Suit], face_down: bool) -> TableSequence:
        """Take cards from the supply and lay them out as a new row."""
        cards = [self.supply.draw(s, face_up=not face_down) for s in suits]
        self._log(("PLACE", len(cards), face_down, () if face_down else tuple(suits)))
        return TableSequence(cards)

    def announce_place(self, count: int) -> None:
        """Log that ``count`` face-down cards already on the table were moved into a row."""
        self._log(("PLACE", count, True, ()))

    def collect(self, cards: Iterable[TableCard]) -> None:
        """Return cards to the supply (public; reveals nothing about face-down cards)."""
        for card in cards:
            card.face_up = False
            self.supply.give_back(card)

    # shuffles

    def _visible(self, rows: Sequence[TableSequence]) -> tuple:
        if len(rows) == 1:
            return tuple((str(i), c.suit) for i, c in enumerate(rows[0].cards) if c.face_up)
        return tuple(
            (f"{r}.{i}", c.suit)
            for r, row in enumerate(rows)
            for i, c in enumerate(row.cards)
            if c.face_up
        )

    def random_cut(self, seq: TableSequence) -> TableSequence:
        k = len(seq)
        if k == 0:
            raise ProtocolError("random cut of an empty sequence")
        r = self.rng.shift(k)
        seq.rotate(r)
        self.last_shift = r
        self.shuffles += 1
        self._log(("SHUFFLE", "CUT", k, self._visible([seq])))
        return seq

    def pile_shifting_shuffle(self, mat: PileMatrix) -> PileMatrix:
        k = mat.cols
        if k == 0:
            raise ProtocolError("pile-shifting shuffle of a matrix with no columns")
        r = self.rng.shift(k)
        if self.rig_piles:
            r = 0
        for row in mat.rows:
            row.rotate(r)
        self.last_shift = r
        self.shuffles += 1
        self._log(("SHUFFLE", "PILE", k, self._visible(mat.rows)))
        return mat

    # flipping and rearranging

    def reveal(self, seq: TableSequence, pos: int) -> Suit:
        card = seq[pos]
        if card.face_up:
            raise ProtocolError(f"card at position {seq.index(pos)} is already face up")
        card.face_up = True
        self._log(("REVEAL", seq.index(pos), card.suit))
        return card.suit

    @staticmethod
    def turn_all_face_down(seq: TableSequence) -> TableSequence:
        for card in seq.cards:
            card.face_up = False
        return seq

    def replace_with_supply(self, seq: TableSequence, pos: int, new_suit: Suit) -> None:
        i = seq.index(pos)
        old = seq.cards[i]
        if not old.face_up:
            raise ProtocolError(f"cannot replace face-down card at position {i}")
        new = self.supply.draw(new_suit, face_up=True)
        self.supply.give_back(old)
        old.face_up = False
        seq.cards[i] = new
        self._log(("REPLACE", i, new_suit))

    def remove_card(self, seq: TableSequence, pos: int) -> TableSequence:
        i = seq.index(pos)
        card = seq.cards[i]
        if not card.face_up:
            raise ProtocolError(f"cannot remove face-down card at position {i}")
        del seq.cards[i]
        card.face_up = False
        self.supply.give_back(card)
        self._log(("REMOVE", i))
        return seq

    def rotate_public(self, seq: TableSequence, amount: int) -> TableSequence:
        if any(not c.face_up for c in seq.cards):
            raise ProtocolError("public rotation requires every card face up")
        seq.rotate(amount)
        self._log(("ROTATE", amount % len(seq)))
        return seq

    def rotate_columns(self, mat: PileMatrix, amount: int) -> PileMatrix:
        """Public column rotation; with two columns, amount 1 is the swap."""
        for row in mat.rows:
            row.rotate(amount)
        self._log(("ROTATE", amount % mat.cols))
        return mat

    def verdict(self, accept: bool) -> None:
        self._log(("VERDICT", accept))
