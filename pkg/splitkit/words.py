"""
words.py
Exact arithmetic on reduced words of a finite-rank free group.

Words are plain strings: a lowercase letter is a basis generator and the
matching uppercase letter is its inverse, so "abA" is a.b.a^-1. The empty
string is the identity.
"""
import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from .common.errors import WordError

logger = logging.getLogger(__name__)

Word = str

IDENTITY: Word = ""


# ─── Parsing ──────────────────────────────────────────────────────────────────

def check_word(word: str, alphabet: Optional[Iterable[str]] = None) -> None:
    """
    Check that a word only uses ASCII letters, optionally from a basis.

    Args:
        word: Candidate word.
        alphabet: Lowercase basis letters; any letter allowed when None.

    Raises:
        WordError: On a character outside the alphabet.
    """
    allowed = None if alphabet is None else set(alphabet)
    for position, ch in enumerate(word):
        if not (ch.isascii() and ch.isalpha()):
            raise WordError(f"invalid character {ch!r} at position {position} in {word!r}")
        if allowed is not None and ch.lower() not in allowed:
            raise WordError(
                f"letter {ch!r} at position {position} in {word!r} is not in the basis "
                f"({''.join(sorted(allowed))})"
            )


def parse_word(text: str, alphabet: Optional[Iterable[str]] = None) -> Word:
    """
    Parse user input into a reduced word. "1" and "" denote the identity;
    spaces and dots are ignored so "a.b.A" and "a b A" are accepted.

    Args:
        text: Input text.
        alphabet: Optional basis letters to validate against.

    Returns:
        Word: The freely reduced word.
    """
    cleaned = text.replace(" ", "").replace(".", "")
    if cleaned in ("", "1"):
        return IDENTITY
    check_word(cleaned, alphabet)
    return reduce_word(cleaned)


# ─── Free reduction ───────────────────────────────────────────────────────────

def _cancels(x: str, y: str) -> bool:
    return x != y and x.lower() == y.lower()


def reduce_word(word: str) -> Word:
    """Freely reduce a word with a single stack pass."""
    stack: List[str] = []
    for ch in word:
        if stack and _cancels(stack[-1], ch):
            stack.pop()
        else:
            stack.append(ch)
    return "".join(stack)


def is_reduced(word: str) -> bool:
    return all(not _cancels(a, b) for a, b in zip(word, word[1:]))


def inverse(word: Word) -> Word:
    return word[::-1].swapcase()


def reduce_concat(u: Word, v: Word) -> Word:
    """
    Free reduction of the concatenation of two reduced words.

    Only the junction can cancel, so this runs in time proportional to the
    cancelled prefix.
    """
    i = 0
    limit = min(len(u), len(v))
    while i < limit and _cancels(u[len(u) - 1 - i], v[i]):
        i += 1
    return u[:len(u) - i] + v[i:]


def product(*words: Word) -> Word:
    result = IDENTITY
    for w in words:
        result = reduce_concat(result, reduce_word(w))
    return result


def power(word: Word, exponent: int) -> Word:
    """Reduced word for word^exponent (negative exponents allowed)."""
    base = word if exponent >= 0 else inverse(word)
    result = IDENTITY
    for _ in range(abs(exponent)):
        result = reduce_concat(result, base)
    return result


def conjugate(g: Word, word: Word) -> Word:
    """Reduced g.word.g^-1."""
    return product(g, word, inverse(g))


def commutes(u: Word, v: Word) -> bool:
    return product(u, v) == product(v, u)


# ─── Cyclic structure ─────────────────────────────────────────────────────────

def cyclic_reduce(word: Word) -> Tuple[Word, Word]:
    """
    Split a reduced word as p.c.p^-1 with c cyclically reduced.

    Returns:
        Tuple (p, c).
    """
    i = 0
    n = len(word)
    while 2 * (i + 1) <= n and _cancels(word[i], word[n - 1 - i]):
        i += 1
    return word[:i], word[i:n - i]


def _smallest_period(c: Word) -> int:
    n = len(c)
    for d in range(1, n + 1):
        if n % d == 0 and c[:d] * (n // d) == c:
            return d
    return n


def root(word: Word) -> Tuple[Word, int]:
    """
    Maximal root of a non-trivial reduced word.

    Args:
        word: Non-empty reduced word.

    Returns:
        (r, k) with r^k == word, k maximal and r not a proper power.

    Raises:
        WordError: If word is the identity.
    """
    if not word:
        raise WordError("identity has no root")
    p, c = cyclic_reduce(word)
    d = _smallest_period(c)
    return p + c[:d] + inverse(p), len(c) // d


def _letter_key(ch: str, basis: Optional[Sequence[str]] = None) -> Tuple[object, bool]:
    # basis order when given, else alphabetical; positive letter before its inverse
    letter = ch.lower()
    if basis is not None:
        return basis.index(letter), ch.isupper()
    return letter, ch.isupper()


def _word_key(word: Word, basis: Optional[Sequence[str]] = None) -> List[Tuple[object, bool]]:
    return [_letter_key(ch, basis) for ch in word]


@dataclass(frozen=True)
class CyclicWord:
    """Canonical representative of a conjugacy class."""
    letters: Word

    def __str__(self) -> str:
        return self.letters or "1"


def cyclic_normal_form(word: Word, basis: Optional[Sequence[str]] = None) -> CyclicWord:
    """
    Least rotation of the cyclic reduction; equal iff conjugate.

    Letters compare by their position in basis (positive before inverse),
    or alphabetically when no basis is given.
    """
    _, c = cyclic_reduce(reduce_word(word))
    if not c:
        return CyclicWord(IDENTITY)
    if basis is not None:
        missing = sorted({ch.lower() for ch in c} - set(basis))
        if missing:
            raise WordError(f"letters {missing} not in basis")
    best = min((c[i:] + c[:i] for i in range(len(c))), key=lambda w: _word_key(w, basis))
    return CyclicWord(best)


def are_conjugate(x: Word, y: Word) -> bool:
    return cyclic_normal_form(x) == cyclic_normal_form(y)


def conjugator(x: Word, y: Word) -> Optional[Word]:
    """
    Find g with g.x.g^-1 == y.

    Args:
        x: Reduced word.
        y: Reduced word.

    Returns:
        A conjugator, or None when x and y are not conjugate.
    """
    p, c = cyclic_reduce(x)
    q, d = cyclic_reduce(y)
    if len(c) != len(d):
        return None
    if not c:
        return IDENTITY
    for j in range(len(c)):
        if c[j:] + c[:j] == d:
            return product(q, inverse(c[:j]), inverse(p))
    return None


# ─── Commensurability and powers ──────────────────────────────────────────────

def commensurable(u: Word, w: Word) -> bool:
    """
    True iff <u> and <w> intersect non-trivially.

    Raises:
        WordError: If either word is the identity.
    """
    if not u or not w:
        raise WordError("commensurability is only defined for non-trivial words")
    ru, _ = root(u)
    rw, _ = root(w)
    return ru == rw or ru == inverse(rw)


def power_of(x: Word, u: Word) -> Optional[int]:
    """
    Exponent k with x == u^k, or None.

    Raises:
        WordError: If u is the identity.
    """
    if not u:
        raise WordError("cannot take powers of the identity")
    if not x:
        return 0
    ru, ku = root(u)
    rx, kx = root(x)
    if kx % ku:
        return None
    if rx == ru:
        return kx // ku
    if rx == inverse(ru):
        return -(kx // ku)
    return None


def common_root_exponents(words: Sequence[Word]) -> Tuple[Word, List[int]]:
    """
    Express pairwise commensurable words as powers of one root.

    Returns:
        (rho, exponents) with words[i] == rho^exponents[i].

    Raises:
        WordError: If the words are not all commensurable.
    """
    if not words:
        raise WordError("no words given")
    rho, _ = root(words[0])
    exponents = []
    for w in words:
        k = power_of(w, rho) if w else None
        if k is None:
            raise WordError(f"{w!r} is not a power of {rho!r}")
        exponents.append(k)
    return rho, exponents


def gcd_all(values: Iterable[int]) -> int:
    result = 0
    for v in values:
        result = gcd(result, abs(v))
    return result


# ─── Tuple conjugacy ──────────────────────────────────────────────────────────

def _solve_twist_exponent(rho: Word, x: Word, target: Word) -> Optional[int]:
    """m with rho^m.x.rho^-m == target, for x not commuting with rho."""
    bound = len(x) + len(target) + 2 * len(rho) + 2
    for magnitude in range(bound + 1):
        for m in ((0,) if magnitude == 0 else (magnitude, -magnitude)):
            if conjugate(power(rho, m), x) == target:
                return m
    return None


def simultaneous_conjugacy(xs: Sequence[Word], ys: Sequence[Word]) -> Optional[Word]:
    """
    Find one g with g.x_i.g^-1 == y_i for every i.

    The first non-trivial coordinate fixes g up to right multiplication by
    powers of its root rho; each further coordinate either commutes with rho
    (and must already match) or pins the power down to at most one value.

    Args:
        xs: Tuple of reduced words.
        ys: Tuple of reduced words, same length.

    Returns:
        A conjugator or None.

    Raises:
        WordError: On a length mismatch.
    """
    if len(xs) != len(ys):
        raise WordError(f"tuple length mismatch: {len(xs)} != {len(ys)}")

    pivot = next((i for i, x in enumerate(xs) if x), None)
    if pivot is None:
        return IDENTITY if not any(ys) else None

    g0 = conjugator(xs[pivot], ys[pivot])
    if g0 is None:
        return None
    rho, _ = root(xs[pivot])

    chosen: Optional[int] = None
    for x, y in zip(xs, ys):
        if not x:
            if y:
                return None
            continue
        target = product(inverse(g0), y, g0)
        if commutes(x, rho):
            if x != target:
                return None
            continue
        m = _solve_twist_exponent(rho, x, target)
        if m is None or (chosen is not None and m != chosen):
            return None
        chosen = m

    g = product(g0, power(rho, chosen or 0))
    logger.debug("simultaneous conjugator for %s -> %s: %r", xs, ys, g)
    return g
