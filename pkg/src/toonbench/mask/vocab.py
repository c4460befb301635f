"""Token vocabularies and the byte trie used for mask computation.

Fixture file format: one token per line, ``id<TAB>hex-encoded bytes``,
ids dense 0..V-1, no empty tokens.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable, List, Optional


class TrieNode:
    __slots__ = ("children", "token_ids")

    def __init__(self):
        self.children: dict = {}  # byte -> TrieNode
        self.token_ids: list = []  # tokens whose byte string ends here


class Vocabulary:
    """Immutable token table with a trie index over token byte strings."""

    def __init__(self, tokens: List[bytes]):
        if any(len(t) == 0 for t in tokens):
            raise ValueError("empty token byte string")
        self.tokens = list(tokens)
        self.root = TrieNode()
        for tid, tok in enumerate(self.tokens):
            node = self.root
            for b in tok:
                nxt = node.children.get(b)
                if nxt is None:
                    nxt = TrieNode()
                    node.children[b] = nxt
                node = nxt
            node.token_ids.append(tid)

    def __len__(self) -> int:
        return len(self.tokens)

    def token_bytes(self, tid: int) -> bytes:
        return self.tokens[tid]


def save_vocabulary(vocab: Vocabulary, path) -> None:
    lines = [f"{i}\t{tok.hex()}" for i, tok in enumerate(vocab.tokens)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_vocabulary(path) -> Vocabulary:
    tokens: list = []
    for lineno, line in enumerate(Path(path).read_text(encoding="ascii").splitlines(), 1):
        if not line.strip():
            continue
        try:
            ids, hexs = line.split("\t")
            tid = int(ids)
            tok = bytes.fromhex(hexs)
        except ValueError as e:
            raise ValueError(f"{path}:{lineno}: malformed vocabulary line") from e
        if tid != len(tokens):
            raise ValueError(f"{path}:{lineno}: ids must be dense starting at 0")
        tokens.append(tok)
    return Vocabulary(tokens)


def build_toy_vocabulary(corpus: Iterable[str], merges: int = 200,
                         max_len: int = 6) -> Vocabulary:
    """256 single-byte tokens plus the most frequent multi-byte substrings
    of the corpus, for tractable brute-force testing."""
    counts: Counter = Counter()
    for text in corpus:
        data = text.encode("utf-8")
        for n in range(2, max_len + 1):
            for i in range(len(data) - n + 1):
                counts[data[i:i + n]] += 1
    # deterministic: by descending count, then by the bytes themselves
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    tokens = [bytes([b]) for b in range(256)]
    for tok, cnt in ranked:
        if len(tokens) >= 256 + merges:
            break
        if cnt < 2:
            break
        tokens.append(tok)
    return Vocabulary(tokens)
