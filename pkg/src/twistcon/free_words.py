"""Reduced words, endomorphisms and balls in finitely generated free groups.

A word is stored as a tuple of signed integer codes: generator ``g`` with
sign ``s`` is the code ``s * (g + 1)``.  Words are reduced eagerly, so two
words are equal as group elements exactly when their code tuples are equal.

Text format: lower-case letters are generators, capitals their inverses,
e.g. ``"abA"`` is a*b*a^-1.  Endomorphisms are written ``"a->ab; b->b"``.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

DEFAULT_BALL_CAP = 10**7

ALPHABET = "abcdefghijklmnopqrstuvwxyz"


class Letter(NamedTuple):
    generator: int
    sign: int


class RankMismatch(ValueError):
    pass


class BallCapExceeded(RuntimeError):
    def __init__(self, predicted: int, cap: int):
        super().__init__(f"ball would hold {predicted} elements, cap is {cap}")
        self.predicted = predicted
        self.cap = cap


def _letter_code(letter, rank: int) -> int:
    if isinstance(letter, int):
        code = letter
        if code == 0:
            raise ValueError("0 is not a letter code")
        gen = abs(code) - 1
    else:
        gen, sign = letter
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        code = sign * (gen + 1)
    if not 0 <= gen < rank:
        raise ValueError(f"generator index {gen} out of range for rank {rank}")
    return code


def reduce_codes(codes: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for c in codes:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def mul_codes(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    """Product of two reduced code tuples (cancellation only at the seam)."""
    k = 0
    lu, lv = len(u), len(v)
    while k < lu and k < lv and u[lu - 1 - k] == -v[k]:
        k += 1
    if k == 0:
        return u + v
    return u[: lu - k] + v[k:]


def inv_codes(u: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-c for c in reversed(u))


class Word:
    """An immutable reduced word in the free group of rank ``rank``."""

    __slots__ = ("rank", "code")

    def __init__(self, rank: int, code: Sequence[int] = ()):
        code = tuple(code)
        for c in code:
            _letter_code(c, rank)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "code", reduce_codes(code))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def _trusted(cls, rank: int, code: tuple[int, ...]) -> "Word":
        w = object.__new__(cls)
        object.__setattr__(w, "rank", rank)
        object.__setattr__(w, "code", code)
        return w

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "Word":
        text = text.strip()
        if text in ("", "e", "1", "ε"):
            return cls(rank or 1, ())
        codes = []
        for ch in text:
            idx = ALPHABET.find(ch.lower())
            if idx < 0:
                raise ValueError(f"bad letter {ch!r} in word {text!r}")
            codes.append(idx + 1 if ch.islower() else -(idx + 1))
        if rank is None:
            rank = max(abs(c) for c in codes)
        return cls(rank, codes)

    @property
    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter(abs(c) - 1, 1 if c > 0 else -1) for c in self.code)

    def __len__(self) -> int:
        return len(self.code)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.rank == other.rank and self.code == other.code

    def __hash__(self) -> int:
        return hash((self.rank, self.code))

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __str__(self) -> str:
        return format_code(self.code)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, rank={self.rank})"


def format_code(code: Sequence[int]) -> str:
    if not code:
        return "e"
    return "".join(ALPHABET[c - 1] if c > 0 else ALPHABET[-c - 1].upper() for c in code)


def reduce(letters: Iterable, rank: int) -> Word:
    """Freely reduce a sequence of letters (``Letter``/pairs or signed codes)."""
    codes = [_letter_code(x, rank) for x in letters]
    return Word._trusted(rank, reduce_codes(codes))


def identity(rank: int) -> Word:
    return Word._trusted(rank, ())


def multiply(u: Word, v: Word) -> Word:
    if u.rank != v.rank:
        raise RankMismatch(f"rank {u.rank} vs {v.rank}")
    return Word._trusted(u.rank, mul_codes(u.code, v.code))


def invert(u: Word) -> Word:
    return Word._trusted(u.rank, inv_codes(u.code))


class FreeEndo:
    """Endomorphism of F_m given by the images of the positive generators."""

    __slots__ = ("rank", "images", "_img", "_inv")

    def __init__(self, rank: int, images: Sequence[Word]):
        if len(images) != rank:
            raise ValueError(f"need {rank} images, got {len(images)}")
        for w in images:
            if w.rank != rank:
                raise RankMismatch(f"image {w} has rank {w.rank}, expected {rank}")
        self.rank = rank
        self.images = tuple(images)
        self._img = tuple(w.code for w in images)
        self._inv = tuple(inv_codes(w.code) for w in images)

    @classmethod
    def identity(cls, rank: int) -> "FreeEndo":
        return cls(rank, [Word(rank, (g + 1,)) for g in range(rank)])

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "FreeEndo":
        """Parse ``"a->ab; b->b"``; unlisted generators are fixed."""
        pairs = []
        for part in text.replace(",", ";").split(";"):
            part = part.strip()
            if not part:
                continue
            if "->" not in part:
                raise ValueError(f"expected 'x->word', got {part!r}")
            lhs, rhs = (s.strip() for s in part.split("->", 1))
            if len(lhs) != 1 or not lhs.islower():
                raise ValueError(f"left side must be a generator letter, got {lhs!r}")
            pairs.append((ALPHABET.index(lhs), rhs))
        if rank is None:
            letters = [g for g, _ in pairs]
            for _, rhs in pairs:
                letters.extend(ALPHABET.index(ch.lower()) for ch in rhs if ch.isalpha())
            rank = max(letters) + 1
        images = [Word(rank, (g + 1,)) for g in range(rank)]
        for g, rhs in pairs:
            if g >= rank:
                raise ValueError(f"generator {ALPHABET[g]} outside rank {rank}")
            images[g] = Word.parse(rhs, rank) if rhs not in ("", "e", "1") else identity(rank)
        return cls(rank, images)

    def apply_codes(self, code: Sequence[int]) -> tuple[int, ...]:
        out: list[int] = []
        for c in code:
            piece = self._img[c - 1] if c > 0 else self._inv[-c - 1]
            for d in piece:
                if out and out[-1] == -d:
                    out.pop()
                else:
                    out.append(d)
        return tuple(out)

    def __call__(self, w: Word) -> Word:
        return apply_endo(self, w)

    def __str__(self) -> str:
        return "; ".join(f"{ALPHABET[g]}->{w}" for g, w in enumerate(self.images))

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeEndo) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)


def apply_endo(phi: FreeEndo, w: Word) -> Word:
    if phi.rank != w.rank:
        raise RankMismatch(f"endomorphism rank {phi.rank} vs word rank {w.rank}")
    return Word._trusted(w.rank, phi.apply_codes(w.code))


def ball_size(m: int, n: int) -> int:
    if n <= 0:
        return 1
    if m == 1:
        return 2 * n + 1
    q = 2 * m - 1
    return 1 + 2 * m * (q**n - 1) // (q - 1)


def sphere_size(m: int, n: int) -> int:
    if n == 0:
        return 1
    return 2 * m * (2 * m - 1) ** (n - 1)


def letter_order(rank: int) -> list[int]:
    """Codes in enumeration order a < A < b < B < ..."""
    out = []
    for g in range(rank):
        out += [g + 1, -(g + 1)]
    return out


def enumerate_ball_codes(m: int, n: int, cap: int = DEFAULT_BALL_CAP) -> list[tuple[int, ...]]:
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    predicted = ball_size(m, n)
    if predicted > cap:
        raise BallCapExceeded(predicted, cap)
    order = letter_order(m)
    out: list[tuple[int, ...]] = [()]
    layer: list[tuple[int, ...]] = [()]
    for _ in range(n):
        nxt = []
        for w in layer:
            last = w[-1] if w else 0
            for c in order:
                if c != -last:
                    nxt.append(w + (c,))
        out.extend(nxt)
        layer = nxt
    return out


def enumerate_ball(m: int, n: int, cap: int = DEFAULT_BALL_CAP) -> list[Word]:
    """All reduced words of length <= n in length-lexicographic order."""
    return [Word._trusted(m, c) for c in enumerate_ball_codes(m, n, cap)]


def in_twisted_stabiliser(phi: FreeEndo, g: Word, w: Word) -> bool:
    """Whether w*g == g*phi(w), i.e. w lies in Stab_phi(g) = Fix(i_g o phi)."""
    if not (phi.rank == g.rank == w.rank):
        raise RankMismatch("ranks disagree")
    return mul_codes(w.code, g.code) == mul_codes(g.code, phi.apply_codes(w.code))
