"""Regular languages as a Boolean GBI-algebra, via deterministic automata."""
from __future__ import annotations

import itertools
from dataclasses import dataclass


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class DFA:
    alphabet: tuple
    delta: tuple          # delta[q][i] = next state on alphabet[i]
    start: int
    finals: frozenset

    @property
    def n(self) -> int:
        return len(self.delta)

    def step(self, q: int, ch) -> int:
        return self.delta[q][self.alphabet.index(ch)]

    def run(self, word, q: int | None = None) -> int:
        q = self.start if q is None else q
        for ch in word:
            q = self.step(q, ch)
        return q

    def accepts(self, word) -> bool:
        return self.run(word) in self.finals

    def words(self, max_len: int):
        for k in range(max_len + 1):
            for w in itertools.product(self.alphabet, repeat=k):
                if self.accepts(w):
                    yield "".join(map(str, w)) if all(isinstance(c, str) for c in w) else w

    def reachable(self) -> "DFA":
        seen = {self.start: 0}
        order = [self.start]
        for q in order:
            for r in self.delta[q]:
                if r not in seen:
                    seen[r] = len(order)
                    order.append(r)
        delta = tuple(tuple(seen[r] for r in self.delta[q]) for q in order)
        return DFA(self.alphabet, delta, 0, frozenset(seen[q] for q in order if q in self.finals))

    def minimize(self) -> "DFA":
        d = self.reachable()
        part = {q: int(q in d.finals) for q in range(d.n)}
        while True:
            sig = {q: (part[q],) + tuple(part[r] for r in d.delta[q]) for q in range(d.n)}
            ids = {s: i for i, s in enumerate(sorted(set(sig.values())))}
            new = {q: ids[sig[q]] for q in range(d.n)}
            if len(set(new.values())) == len(set(part.values())):
                part = new
                break
            part = new
        k = len(set(part.values()))
        delta = [None] * k
        for q in range(d.n):
            delta[part[q]] = tuple(part[r] for r in d.delta[q])
        out = DFA(d.alphabet, tuple(delta), part[d.start], frozenset(part[q] for q in d.finals))
        return out.reachable()

    def is_empty(self) -> bool:
        return not (self.reachable().finals)

    def equivalent(self, other: "DFA") -> bool:
        return symmetric_difference(self, other).is_empty()

    def subset_of(self, other: "DFA") -> bool:
        return intersection(self, complement(other)).is_empty()


def _same(a: DFA, b: DFA):
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"{a.alphabet} vs {b.alphabet}")


def _product(a: DFA, b: DFA, accept) -> DFA:
    _same(a, b)
    index = {}
    order = []

    def idx(p):
        if p not in index:
            index[p] = len(order)
            order.append(p)
        return index[p]

    idx((a.start, b.start))
    delta = []
    i = 0
    while i < len(order):
        p, q = order[i]
        delta.append(tuple(idx((a.delta[p][c], b.delta[q][c])) for c in range(len(a.alphabet))))
        i += 1
    finals = frozenset(index[(p, q)] for (p, q) in order if accept(p in a.finals, q in b.finals))
    return DFA(a.alphabet, tuple(delta), 0, finals)


def union(a, b):
    return _product(a, b, lambda x, y: x or y)


def intersection(a, b):
    return _product(a, b, lambda x, y: x and y)


def symmetric_difference(a, b):
    return _product(a, b, lambda x, y: x != y)


def complement(a: DFA) -> DFA:
    return DFA(a.alphabet, a.delta, a.start, frozenset(range(a.n)) - a.finals)


def concatenation(a: DFA, b: DFA) -> DFA:
    """Subset construction over pairs (state of ``a``, set of states of ``b``)."""
    _same(a, b)

    def close(p, qs):
        qs = set(qs)
        if p in a.finals:
            qs.add(b.start)
        return (p, frozenset(qs))

    index = {}
    order = []

    def idx(s):
        if s not in index:
            index[s] = len(order)
            order.append(s)
        return index[s]

    idx(close(a.start, ()))
    delta = []
    i = 0
    while i < len(order):
        p, qs = order[i]
        row = []
        for c in range(len(a.alphabet)):
            row.append(idx(close(a.delta[p][c], {b.delta[q][c] for q in qs})))
        delta.append(tuple(row))
        i += 1
    finals = frozenset(index[s] for s in order if s[1] & b.finals)
    return DFA(a.alphabet, tuple(delta), 0, finals)


def _states_after(a: DFA, b: DFA) -> set:
    """States of ``b`` reached by reading some word of ``a``."""
    pairs = {(a.start, b.start)}
    todo = [(a.start, b.start)]
    while todo:
        p, q = todo.pop()
        for c in range(len(a.alphabet)):
            nxt = (a.delta[p][c], b.delta[q][c])
            if nxt not in pairs:
                pairs.add(nxt)
                todo.append(nxt)
    return {q for p, q in pairs if p in a.finals}


def _from(m: DFA, q: int) -> DFA:
    return DFA(m.alphabet, m.delta, q, m.finals)


def _sigma_star(alphabet) -> DFA:
    return DFA(tuple(alphabet), (tuple(0 for _ in alphabet),), 0, frozenset({0}))


def left_residual(a: DFA, m: DFA) -> DFA:
    """``a \\ m = {w : u w in m for every u in a}``."""
    _same(a, m)
    starts = sorted(_states_after(a, m))
    out = _sigma_star(m.alphabet)
    for q in starts:
        out = intersection(out, _from(m, q))
    return out.minimize()


def right_residual(m: DFA, a: DFA) -> DFA:
    """``m / a = {w : w u in m for every u in a}``."""
    _same(a, m)
    finals = frozenset(q for q in range(m.n) if _from(a, a.start).subset_of(_from(m, q)))
    return DFA(m.alphabet, m.delta, m.start, finals).minimize()


def regular_language_ops(a: DFA, b: DFA) -> dict:
    """All Boolean and residuated operations on two automata."""
    return {"union": union(a, b), "intersection": intersection(a, b), "complement": complement(a),
            "concatenation": concatenation(a, b), "lres": left_residual(a, b), "rres": right_residual(a, b)}


# ------------------------------------------------------------------ constructors

def from_words(words, alphabet) -> DFA:
    """Automaton for a finite set of words (a trie plus a sink)."""
    alphabet = tuple(alphabet)
    nodes = {(): 0}
    order = [()]
    for w in words:
        for k in range(1, len(w) + 1):
            if tuple(w[:k]) not in nodes:
                nodes[tuple(w[:k])] = len(order)
                order.append(tuple(w[:k]))
    sink = len(order)
    delta = []
    for p in order:
        delta.append(tuple(nodes.get(p + (c,), sink) for c in alphabet))
    delta.append(tuple(sink for _ in alphabet))
    finals = frozenset(nodes[tuple(w)] for w in words)
    return DFA(alphabet, tuple(delta), 0, finals)


def epsilon(alphabet) -> DFA:
    return from_words([""], alphabet)


def empty(alphabet) -> DFA:
    alphabet = tuple(alphabet)
    return DFA(alphabet, (tuple(0 for _ in alphabet),), 0, frozenset())


def sigma_star(alphabet) -> DFA:
    return _sigma_star(tuple(alphabet))


def star_of_word(word, alphabet) -> DFA:
    """``(word)*`` for a nonempty word."""
    alphabet = tuple(alphabet)
    k = len(word)
    sink = k
    delta = []
    for i in range(k):
        delta.append(tuple((i + 1) % k if c == word[i] else sink for c in alphabet))
    delta.append(tuple(sink for _ in alphabet))
    return DFA(alphabet, tuple(delta), 0, frozenset({0}))
