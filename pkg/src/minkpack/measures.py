"""Bernoulli measures on digit words, cylinder-union sets, and pushforwards.

Measurable sets are represented as finite unions of non-nested cylinder
words; on the totally disconnected spaces this library targets, those
unions already generate the Borel algebra, so measure evaluation is exact
finite arithmetic.  Pillar boundary overlaps carry measure zero and are
ignored.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from .dimension import BetaSequence, solve_similarity_dimension
from .ifs import CylinderWord, SimilarIFS, SpongeSystem, ValidationError, project_ifs

WEIGHT_SUM_TOL = 1e-10


@dataclass(frozen=True)
class BernoulliMeasure:
    """Probability weights over digit identifiers, evaluated on words as products."""

    weights: dict
    context: object = None

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        if not self.weights:
            raise ValidationError("measure needs at least one digit weight")
        for digit, w in self.weights.items():
            if not 0 < w <= 1:
                raise ValidationError(f"weight of digit {digit!r} is {w}, not in (0,1]")
        total = math.fsum(self.weights.values())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {total!r}, expected 1")

    def weight(self, digit) -> float:
        try:
            return self.weights[digit]
        except KeyError:
            raise ValidationError(f"unknown digit identifier {digit!r}") from None


@dataclass(frozen=True)
class MeasurableSet:
    """Finite union of pairwise non-nested cylinder words."""

    words: tuple[CylinderWord, ...]

    def __post_init__(self):
        words = tuple(
            w if isinstance(w, CylinderWord) else CylinderWord(tuple(w)) for w in self.words
        )
        object.__setattr__(self, "words", words)
        ordered = sorted(words, key=lambda w: w.letters)
        for a, b in zip(ordered, ordered[1:]):
            if b.letters[: len(a.letters)] == a.letters:
                raise ValidationError(
                    f"nested cylinder words: {a.letters} is a prefix of {b.letters}"
                )

    @property
    def max_rank(self) -> int:
        return max((w.rank for w in self.words), default=0)

    def __len__(self):
        return len(self.words)


def bernoulli_weights(sponge: SpongeSystem, betas: BetaSequence) -> BernoulliMeasure:
    """Digit weights prod_j ratio_j^beta_j; the level-d Moran equation makes
    them a probability vector."""
    if len(betas.betas) != sponge.dimension:
        raise ValidationError(
            f"beta sequence has {len(betas.betas)} levels, sponge has {sponge.dimension}"
        )
    weights = {}
    for d in sponge.digits:
        w = 1.0
        for comp, beta in zip(d.components, betas.betas):
            w *= float(comp.ratio) ** beta
        weights[d.digit] = w
    return BernoulliMeasure(weights=weights, context=sponge)


def uniform_measure(system) -> BernoulliMeasure:
    """Equal weight on every digit of a box or symbolic system."""
    n = len(system.digits)
    return BernoulliMeasure(
        weights={d.digit if hasattr(d, "digit") else d: 1.0 / n for d in system.digits},
        context=system,
    )


def natural_measure(system) -> BernoulliMeasure:
    """The canonical Bernoulli measure of an instance.

    Sponges get the Moran-equation weights, similitude IFSs get ratio^s with
    s the similarity dimension, symbolic systems get uniform weight.
    """
    if isinstance(system, SpongeSystem):
        from .dimension import solve_beta_sequence

        return bernoulli_weights(system, solve_beta_sequence(system))
    if isinstance(system, SimilarIFS):
        ratios = [float(r) for r in system.ratios()]
        s = solve_similarity_dimension(ratios)
        return BernoulliMeasure(
            weights={d.digit: r**s for d, r in zip(system.digits, ratios)}, context=system
        )
    return uniform_measure(system)


def measure_of_word(mu: BernoulliMeasure, word) -> float:
    """Product of letter weights; the empty word has measure 1."""
    letters = word.letters if isinstance(word, CylinderWord) else tuple(word)
    out = 1.0
    for letter in letters:
        out *= mu.weight(letter)
    return out


def projected_measure(sponge: SpongeSystem, betas: BetaSequence, j: int, prefix_word) -> float:
    """Measure of a word over the level-j projected alphabet.

    Letters are indices into project_ifs(sponge, j); each index carries the
    weight prod_{k<=j} ratio_k^beta_k of its prefix tuple.
    """
    if not 1 <= j <= sponge.dimension:
        raise ValidationError(f"projection index {j} outside 1..{sponge.dimension}")
    prefixes = project_ifs(sponge, j)
    weights = []
    for prefix in prefixes:
        w = 1.0
        for k in range(j):
            w *= float(prefix[k].ratio) ** betas.betas[k]
        weights.append(w)
    out = 1.0
    letters = prefix_word.letters if isinstance(prefix_word, CylinderWord) else tuple(prefix_word)
    for letter in letters:
        if not 0 <= letter < len(prefixes):
            raise ValidationError(f"prefix letter {letter!r} outside 0..{len(prefixes) - 1}")
        out *= weights[letter]
    return out


def measure_of_set(mu: BernoulliMeasure, mset: MeasurableSet) -> float:
    """Sum of word measures over a non-nested cylinder union."""
    if not isinstance(mset, MeasurableSet):
        mset = MeasurableSet(tuple(mset))
    return math.fsum(measure_of_word(mu, w) for w in mset.words)


class WordBijection:
    """Rank-preserving bijection on cylinder words.

    Either letterwise (a digit permutation, valid at every rank) or an
    explicit per-rank table valid up to its maximum rank.
    """

    def __init__(self, digit_map=None, tables=None):
        if (digit_map is None) == (tables is None):
            raise ValidationError("give exactly one of digit_map or tables")
        self.digit_map = dict(digit_map) if digit_map is not None else None
        self.tables = tables
        if self.digit_map is not None:
            values = list(self.digit_map.values())
            if set(values) != set(self.digit_map) or len(set(values)) != len(values):
                raise ValidationError("digit map is not a permutation of its keys")
            self._inverse = {v: k for k, v in self.digit_map.items()}

    @classmethod
    def from_digit_permutation(cls, mapping) -> "WordBijection":
        return cls(digit_map=mapping)

    @classmethod
    def from_table(cls, pairs) -> "WordBijection":
        tables: dict[int, dict] = defaultdict(dict)
        for src, dst in pairs:
            src = tuple(src)
            dst = tuple(dst)
            if len(src) != len(dst):
                raise ValidationError(f"table pair {src} -> {dst} changes rank")
            tables[len(src)][src] = dst
        for rank, table in tables.items():
            if len(set(table.values())) != len(table):
                raise ValidationError(f"table at rank {rank} is not injective")
        obj = cls(tables=dict(tables))
        obj._inverse_tables = {
            rank: {v: k for k, v in table.items()} for rank, table in obj.tables.items()
        }
        return obj

    @property
    def max_rank(self):
        """Largest supported rank; None when letterwise (unbounded)."""
        if self.digit_map is not None:
            return None
        return max(self.tables, default=0)

    def apply(self, word):
        letters = word.letters if isinstance(word, CylinderWord) else tuple(word)
        if self.digit_map is not None:
            return tuple(self.digit_map[c] for c in letters)
        return self._lookup(self.tables, letters)

    def preimage(self, word):
        letters = word.letters if isinstance(word, CylinderWord) else tuple(word)
        if self.digit_map is not None:
            return tuple(self._inverse[c] for c in letters)
        return self._lookup(self._inverse_tables, letters)

    def _lookup(self, tables, letters):
        rank = len(letters)
        if rank not in tables:
            raise ValidationError(f"word of rank {rank} exceeds supported table ranks")
        try:
            return tables[rank][letters]
        except KeyError:
            raise ValidationError(f"word {letters} missing from rank-{rank} table") from None


def pushforward_measure(code_map: WordBijection, mu: BernoulliMeasure, mset: MeasurableSet) -> float:
    """Pushforward evaluation: the measure of the preimage cylinder union."""
    if not isinstance(mset, MeasurableSet):
        mset = MeasurableSet(tuple(mset))
    if code_map.max_rank is not None and mset.max_rank > code_map.max_rank:
        raise ValidationError(
            f"set rank {mset.max_rank} exceeds bijection table rank {code_map.max_rank}"
        )
    return math.fsum(measure_of_word(mu, code_map.preimage(w)) for w in mset.words)


def equivalence_test(mu, nu, family) -> tuple[float, float]:
    """(min, max) of nu(S)/mu(S) over a family of measurable sets.

    Measures may be BernoulliMeasure instances or callables on sets.  The
    spread max(upper, 1/lower) is the empirical comparability constant; over
    a finite family that is evidence, never a verdict.
    """
    family = list(family)
    if not family:
        raise ValidationError("family of sets is empty")

    def evaluate(measure, mset):
        if isinstance(measure, BernoulliMeasure):
            return measure_of_set(measure, mset)
        return measure(mset)

    ratios = []
    for mset in family:
        m = evaluate(mu, mset)
        n = evaluate(nu, mset)
        if m <= 0 or n <= 0:
            raise ValidationError(f"zero-measure member in family: mu={m}, nu={n}")
        ratios.append(n / m)
    return min(ratios), max(ratios)
