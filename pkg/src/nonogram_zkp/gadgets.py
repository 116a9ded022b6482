"""Reusable card gadgets: commitment copy, commitment format check, chosen cut."""

from __future__ import annotations

from typing import Sequence

from .cards import CLUB, HEART, PileMatrix, Suit, Table, TableSequence
from .nonogram import B, W, Color

VALID_PAIRS = ((CLUB, HEART), (HEART, CLUB))


class Reject(Exception):
    """The verifier saw something it does not accept; ``reason`` names the failed check."""

    reason = "REJECT"

    def __init__(self, detail: str = "", reason: str | None = None):
        super().__init__(detail)
        if reason is not None:
            self.reason = reason


class FormatReject(Reject):
    reason = "FORMAT"


class MarkerReject(Reject):
    reason = "MARKER"


class Commitment:
    """A face-down pair: (CLUB, HEART) encodes black, (HEART, CLUB) white."""

    __slots__ = ("pair",)

    def __init__(self, pair: TableSequence):
        if len(pair) != 2:
            raise ValueError("a commitment is exactly two cards")
        self.pair = pair

    @property
    def hidden_pair(self) -> tuple[Suit, Suit]:
        return (self.pair.cards[0].suit, self.pair.cards[1].suit)

    @property
    def hidden_color(self) -> Color | None:
        """Ground-truth decoding (``None`` when malformed). Not available to the verifier."""
        pair = self.hidden_pair
        if pair == (CLUB, HEART):
            return B
        if pair == (HEART, CLUB):
            return W
        return None


def encode(color: Color) -> tuple[Suit, Suit]:
    return (CLUB, HEART) if color is B else (HEART, CLUB)


def commit(table: Table, pair: Sequence[Suit]) -> Commitment:
    """Prover secretly lays down a face-down pair."""
    return Commitment(table.place(pair, face_down=True))


def _check_and_align(table: Table, mat: PileMatrix) -> None:
    first = mat.rows[0]
    revealed = (table.reveal(first, 0), table.reveal(first, 1))
    if revealed not in VALID_PAIRS:
        raise FormatReject(f"commitment opened as {revealed[0].name} {revealed[1].name}")
    table.rotate_columns(mat, 0 if revealed == (CLUB, HEART) else 1)


def copy_commitment(table: Table, c: Commitment) -> tuple[Commitment, Commitment]:
    """Two fresh commitments to the same value; the original is opened and discarded."""
    helpers = [table.place((CLUB, HEART), face_down=False) for _ in range(2)]
    for row in helpers:
        table.turn_all_face_down(row)
    mat = PileMatrix([c.pair, *helpers])
    table.pile_shifting_shuffle(mat)
    _check_and_align(table, mat)
    table.collect(c.pair.cards)
    return Commitment(helpers[0]), Commitment(helpers[1])


def verify_format(table: Table, c: Commitment) -> Commitment:
    """Copy without the third row: checks the pair is well formed and hands back a fresh copy."""
    helper = table.place((CLUB, HEART), face_down=False)
    table.turn_all_face_down(helper)
    mat = PileMatrix([c.pair, helper])
    table.pile_shifting_shuffle(mat)
    _check_and_align(table, mat)
    table.collect(c.pair.cards)
    return Commitment(helper)


def chosen_cut(
    table: Table,
    seq: TableSequence,
    secret_index: int,
    helper_suits: Sequence[Suit] | None = None,
    *,
    late_turn_down: bool = False,
) -> int:
    """Let the prover pick the card at ``secret_index`` without the verifier learning which.

    Shuffles ``seq`` in place and returns the public position of the chosen
    card. ``helper_suits`` overrides the honest marker row (adversary tests).
    ``late_turn_down`` is the leaky-variant hook: face-up cards in ``seq``
    are only turned down after the shuffle.
    """
    k = len(seq)
    if helper_suits is None:
        if not 0 <= secret_index < k:
            raise ValueError(f"secret index {secret_index} outside 0..{k - 1}")
        helper_suits = [HEART] * k
        helper_suits[secret_index] = CLUB
    elif len(helper_suits) != k:
        raise ValueError("marker row must be as long as the sequence")
    helper = table.place(helper_suits, face_down=True)
    mat = PileMatrix([seq, helper])
    table.pile_shifting_shuffle(mat)
    if late_turn_down:
        table.turn_all_face_down(seq)
    revealed = [table.reveal(helper, i) for i in range(k)]
    table.collect(helper.cards)
    marks = [i for i, s in enumerate(revealed) if s is CLUB]
    if len(marks) != 1 or revealed.count(HEART) != k - 1:
        raise MarkerReject(f"marker row showed {len(marks)} clubs")
    return marks[0]
