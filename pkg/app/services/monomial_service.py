"""
Monomial algebras C<x_1..x_n>/(e_1..e_p): overlap checks, normal-word and cyclic-word counts,
and the search for admissible degree collections
"""
import logging
import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from app.config import NECKLACE_CAP, SEARCH_BUDGET, THREADS
from app.models import EdgeModel, MonomialPresentationModel, QuiverModel
from app.services.algebra_service import NCPoly, Presentation
from app.services.series_service import TruncSeries

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]

WITNESS = "witness"
NONE_EXISTS = "none"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MonomialPresentation:
    letters: Tuple[str, ...]
    degrees: Tuple[int, ...]
    relations: Tuple[Word, ...] = ()

    @classmethod
    def from_model(cls, model: MonomialPresentationModel) -> "MonomialPresentation":
        letters = tuple(letter.name for letter in model.alphabet)
        index = {name: k for k, name in enumerate(letters)}
        return cls(
            letters=letters,
            degrees=tuple(letter.degree for letter in model.alphabet),
            relations=tuple(tuple(index[x] for x in word) for word in model.relations),
        )

    @classmethod
    def from_words(cls, alphabet: str, relations: Sequence[str], degrees: Optional[Sequence[int]] = None):
        """Single-character letters, e.g. from_words("xy", ["xxyy", "xyxyy"])"""
        letters = tuple(alphabet)
        index = {name: k for k, name in enumerate(letters)}
        degrees = tuple(degrees) if degrees is not None else (1,) * len(letters)
        if len(degrees) != len(letters):
            raise ValueError("one degree per letter")
        for word in relations:
            if not word:
                raise ValueError("relation words must be nonempty")
            unknown = [x for x in word if x not in index]
            if unknown:
                raise ValueError(f"unknown generator {unknown[0]!r} in relation")
        return cls(letters, degrees, tuple(tuple(index[x] for x in word) for word in relations))

    def weight(self, word: Word) -> int:
        return sum(self.degrees[x] for x in word)

    def spell(self, word: Word) -> str:
        return "".join(self.letters[x] for x in word)

    def to_presentation(self) -> Presentation:
        """One-vertex quiver with a loop per letter, each relation a single path"""
        quiver = QuiverModel(
            vertices=["0"],
            edges=[EdgeModel(tail="0", head="0", degree=d, name=name) for name, d in zip(self.letters, self.degrees)],
        )
        relations = [NCPoly(((word, Fraction(1)),), 0, 0, self.weight(word)) for word in dict.fromkeys(self.relations)]
        return Presentation(quiver, relations)


@dataclass(frozen=True)
class AdmissibleVerdict:
    status: str
    words: Tuple[Word, ...] = ()
    explored: int = 0

    @property
    def admissible(self) -> bool:
        return self.status == WITNESS


def _is_factor(u: Word, w: Word) -> bool:
    n = len(u)
    return any(w[k:k + n] == u for k in range(len(w) - n + 1))


def _overlaps(e: Word, f: Word) -> bool:
    """Some nonempty proper suffix of e is a prefix of f"""
    for k in range(1, min(len(e), len(f))):
        if e[-k:] == f[:k]:
            return True
    return False


def non_overlapping(e: Sequence, f: Sequence) -> bool:
    """
    No proper containment and no suffix/prefix overlap, in either order.

    For e == f only proper shifts count, so xy is non-overlapping with
    itself while xx is not.
    """
    e, f = tuple(e), tuple(f)
    if not e or not f:
        raise ValueError("words must be nonempty")
    if e == f:
        return not _overlaps(e, e)
    if _is_factor(e, f) or _is_factor(f, e):
        return False
    return not (_overlaps(e, f) or _overlaps(f, e))


def strongly_free(p: MonomialPresentation) -> bool:
    words = p.relations
    return all(non_overlapping(words[i], words[j]) for i in range(len(words)) for j in range(i, len(words)))


class AvoidanceAutomaton:
    """
    Aho-Corasick automaton over letter indices.

    A state is dead when the text read so far ends with some relation word.
    """

    def __init__(self, alphabet_size: int, words: Sequence[Word]):
        self.alphabet_size = alphabet_size
        self.goto: List[Dict[int, int]] = [{}]
        self.fail: List[int] = [0]
        self.dead: List[bool] = [False]
        for word in words:
            self._add(word)
        self.delta = self._build()

    def _add(self, word: Word) -> None:
        state = 0
        for letter in word:
            if letter not in self.goto[state]:
                self.goto.append({})
                self.fail.append(0)
                self.dead.append(False)
                self.goto[state][letter] = len(self.goto) - 1
            state = self.goto[state][letter]
        self.dead[state] = True

    def _build(self) -> List[List[int]]:
        delta = [[0] * self.alphabet_size for _ in self.goto]
        queue = deque()
        for letter in range(self.alphabet_size):
            child = self.goto[0].get(letter)
            if child is None:
                delta[0][letter] = 0
            else:
                delta[0][letter] = child
                queue.append(child)
        while queue:
            state = queue.popleft()
            self.dead[state] = self.dead[state] or self.dead[self.fail[state]]
            for letter in range(self.alphabet_size):
                child = self.goto[state].get(letter)
                if child is None:
                    delta[state][letter] = delta[self.fail[state]][letter]
                else:
                    self.fail[child] = delta[self.fail[state]][letter]
                    delta[state][letter] = child
                    queue.append(child)
        return delta

    @property
    def state_count(self) -> int:
        return len(self.goto)

    def step(self, state: int, letter: int) -> int:
        return self.delta[state][letter]

    def walk_counts(self, degrees: Sequence[int], order: int) -> List[int]:
        """Number of weight-r words avoiding every relation word, r = 0..order"""
        counts: List[List[int]] = [[0] * self.state_count for _ in range(order + 1)]
        counts[0][0] = 1
        for r in range(1, order + 1):
            layer = counts[r]
            for letter, d in enumerate(degrees):
                if d > r:
                    continue
                previous = counts[r - d]
                for state, value in enumerate(previous):
                    if value:
                        target = self.delta[state][letter]
                        if not self.dead[target]:
                            layer[target] += value
        return [sum(layer) for layer in counts]


class MonomialService:
    def __init__(self, necklace_cap: Optional[int] = None, search_budget: Optional[int] = None,
                 threads: Optional[int] = None):
        self.necklace_cap = NECKLACE_CAP if necklace_cap is None else necklace_cap
        self.search_budget = SEARCH_BUDGET if search_budget is None else search_budget
        self.threads = THREADS if threads is None else threads

    def count_normal_words(self, p: MonomialPresentation, N: int) -> TruncSeries:
        automaton = AvoidanceAutomaton(len(p.letters), p.relations)
        return TruncSeries(automaton.walk_counts(p.degrees, N), N)

    # -- cyclic words ----------------------------------------------------

    def _necklaces_from(self, p: MonomialPresentation, automaton: AvoidanceAutomaton,
                        first: int, r: int) -> Tuple[int, int]:
        """(surviving necklaces, words visited) for weight-r representatives starting with `first`"""
        survivors = 0
        visited = 0
        start = automaton.step(0, first)
        if automaton.dead[start] or p.degrees[first] > r:
            return 0, 0
        stack: List[Tuple[Word, int, int]] = [((first,), start, p.degrees[first])]
        while stack:
            word, state, weight = stack.pop()
            visited += 1
            if visited > self.necklace_cap:
                raise RuntimeError(f"necklace cap exceeded ({self.necklace_cap}) at weight {r}")
            if weight == r:
                if self._is_representative(word) and self._cyclically_avoids(p, word):
                    survivors += 1
                continue
            for letter in range(len(p.letters)):
                # a representative never has a letter smaller than its first
                if letter < first:
                    continue
                w = weight + p.degrees[letter]
                if w > r:
                    continue
                target = automaton.step(state, letter)
                if not automaton.dead[target]:
                    stack.append((word + (letter,), target, w))
        return survivors, visited

    @staticmethod
    def _is_representative(word: Word) -> bool:
        return all(word <= word[k:] + word[:k] for k in range(1, len(word)))

    @staticmethod
    def _cyclically_avoids(p: MonomialPresentation, word: Word) -> bool:
        n = len(word)
        for e in p.relations:
            if len(e) > n:
                continue
            wrapped = (word + word)[: n + len(e) - 1]
            if _is_factor(e, wrapped):
                return False
        return True

    def count_cyclic_avoiding(self, p: MonomialPresentation, N: int) -> TruncSeries:
        """Necklaces of weight r with no relation word as a cyclic factor; constant term 1"""
        automaton = AvoidanceAutomaton(len(p.letters), p.relations)
        counts = [1]
        letters = range(len(p.letters))
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for r in range(1, N + 1):
                results = list(pool.map(lambda a: self._necklaces_from(p, automaton, a, r), letters))
                counts.append(sum(survivors for survivors, _ in results))
        logger.info(f"✅ cyclic word counts to weight {N}: {counts}")
        return TruncSeries(counts, N)

    # -- admissibility ---------------------------------------------------

    def _words_of_weight(self, degrees: Sequence[int], r: int) -> List[Word]:
        words: List[Word] = []

        def extend(prefix: Word, weight: int) -> None:
            if weight == r:
                words.append(prefix)
                return
            for letter, d in enumerate(degrees):
                if weight + d <= r:
                    extend(prefix + (letter,), weight + d)

        extend((), 0)
        return words

    def admissible_search(self, degrees_gen: Sequence[int], degrees_rel: Sequence[int],
                          budget: Optional[int] = None) -> AdmissibleVerdict:
        """
        Backtracking search for pairwise non-overlapping words w_j with weight r_j.

        Exhausting the search certifies that no such words exist.
        """
        budget = self.search_budget if budget is None else budget
        if not degrees_gen or any(d < 1 for d in degrees_gen) or any(r < 1 for r in degrees_rel):
            raise ValueError("all degrees must be positive")
        candidates = {r: [w for w in self._words_of_weight(degrees_gen, r) if non_overlapping(w, w)]
                      for r in set(degrees_rel)}
        chosen: List[Word] = []
        explored = 0

        def search(j: int) -> Optional[bool]:
            nonlocal explored
            if j == len(degrees_rel):
                return True
            for w in candidates[degrees_rel[j]]:
                explored += 1
                if explored > budget:
                    return None
                if w in chosen or not all(non_overlapping(w, u) for u in chosen):
                    continue
                chosen.append(w)
                found = search(j + 1)
                if found is not False:
                    return found
                chosen.pop()
            return False

        found = search(0)
        if found is None:
            logger.warning(f"⚠️ admissible search budget {budget} exhausted for {list(degrees_rel)}")
            return AdmissibleVerdict(INCONCLUSIVE, (), explored)
        if found:
            return AdmissibleVerdict(WITNESS, tuple(chosen), explored)
        return AdmissibleVerdict(NONE_EXISTS, (), explored)

    def minimal_admissible_partner(self, r: int, s_max: int, degrees_gen: Sequence[int] = (1, 1)) -> Optional[int]:
        """Smallest s <= s_max with (degrees_gen; r, s) admissible"""
        for s in range(1, s_max + 1):
            verdict = self.admissible_search(degrees_gen, [r, s])
            if verdict.status == INCONCLUSIVE:
                raise RuntimeError(f"search budget exceeded at s = {s}")
            if verdict.admissible:
                return s
        return None

    def random_strongly_free(self, rng: random.Random, letters: int = 2, max_length: int = 6,
                             max_words: int = 3) -> List[Word]:
        """A nonempty strongly free set of words of length 2..max_length, drawn by rejection"""
        words: List[Word] = []
        target = rng.randint(1, max_words)
        attempts = 0
        while len(words) < target and attempts < 1000:
            attempts += 1
            length = rng.randint(2, max_length)
            w = tuple(rng.randrange(letters) for _ in range(length))
            if non_overlapping(w, w) and w not in words and all(non_overlapping(w, u) for u in words):
                words.append(w)
        if not words:
            raise RuntimeError("no strongly free word drawn")
        return words


def closed_form_normal_words(p: MonomialPresentation, N: int) -> TruncSeries:
    """1 / (1 - sum_k t^deg(x_k) + sum_i t^weight(e_i))"""
    poly: Dict[int, int] = {0: 1}
    for d in p.degrees:
        poly[d] = poly.get(d, 0) - 1
    for e in p.relations:
        w = p.weight(e)
        poly[w] = poly.get(w, 0) + 1
    return TruncSeries.from_poly(poly, N).inverse()


# Global service instance
monomial_service = MonomialService()
