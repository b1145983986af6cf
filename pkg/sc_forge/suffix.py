"""Generalized suffix automaton for longest-common-substring queries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional


@dataclass(frozen=True)
class Match:
    """A common substring: query[end - length:end]"""

    length: int
    end: int


class SuffixAutomaton:
    """Suffix automaton over one or more strings.

    State 0 is the root. ``trans`` holds the transitions, ``link`` the suffix
    links and ``length`` the longest string of each state.
    """

    def __init__(self, strings: Iterable[str] = ()):
        self.trans: list[dict[str, int]] = [{}]
        self.link: list[Optional[int]] = [None]
        self.length: list[int] = [0]
        for s in strings:
            self.add_string(s)

    def __len__(self) -> int:
        return len(self.trans)

    def _new_state(self, length: int, trans: Optional[dict[str, int]] = None, link: Optional[int] = None) -> int:
        self.trans.append(dict(trans) if trans else {})
        self.link.append(link)
        self.length.append(length)
        return len(self.trans) - 1

    def _clone(self, p: int, q: int, c: str) -> int:
        clone = self._new_state(self.length[p] + 1, self.trans[q], self.link[q])
        self.link[q] = clone
        while p is not None and self.trans[p].get(c) == q:
            self.trans[p][c] = clone
            p = self.link[p]
        return clone

    def extend(self, c: str, last: int) -> int:
        if c in self.trans[last]:
            # the string read so far already exists (generalized case)
            q = self.trans[last][c]
            if self.length[last] + 1 == self.length[q]:
                return q
            return self._clone(last, q, c)
        p: Optional[int] = last
        current = self._new_state(self.length[last] + 1)
        while p is not None and c not in self.trans[p]:
            self.trans[p][c] = current
            p = self.link[p]
        if p is None:
            self.link[current] = 0
            return current
        q = self.trans[p][c]
        if self.length[p] + 1 == self.length[q]:
            self.link[current] = q
        else:
            self.link[current] = self._clone(p, q, c)
        return current

    def add_string(self, s: str) -> None:
        last = 0
        for c in s:
            last = self.extend(c, last)

    def contains(self, s: str) -> bool:
        state = 0
        for c in s:
            state = self.trans[state].get(c)
            if state is None:
                return False
        return True

    def longest_common_substring(self, query: str, cap: Optional[int] = None) -> Match:
        """Longest substring of `query` (of length at most `cap`) recognized by the automaton.

        Ties resolve to the leftmost end position in `query`.
        """
        best = Match(0, 0)
        state, matched = 0, 0
        for position, c in enumerate(query):
            while state and c not in self.trans[state]:
                state = self.link[state]
                matched = self.length[state]
            if c in self.trans[state]:
                state = self.trans[state][c]
                matched += 1
            else:
                state, matched = 0, 0
            usable = matched if cap is None else min(matched, cap)
            if usable > best.length:
                best = Match(usable, position + 1)
        return best
