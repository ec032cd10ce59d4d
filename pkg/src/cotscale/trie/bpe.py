"""Byte-level pair-merge tokenizer trained from scratch, no pre-tokenization.

Training repeatedly merges the most frequent adjacent token pair (ties go to
the lexicographically smallest pair) until the vocabulary target is reached
or nothing is left to merge. Tokens are byte strings; the saved form lists
the base vocabulary and the ordered merges in hex.
"""

from __future__ import annotations

from collections import Counter

from sklearn.base import BaseEstimator


def _as_bytes(text) -> bytes:
    if isinstance(text, bytes):
        return text
    if isinstance(text, str):
        return text.encode("utf-8")
    raise TypeError(f"expected str or bytes, got {type(text).__name__}")


def _apply_merge(seq: list, left: bytes, right: bytes, merged: bytes) -> list:
    out = []
    i = 0
    while i < len(seq):
        if i + 1 < len(seq) and seq[i] == left and seq[i + 1] == right:
            out.append(merged)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


class BpeTokenizer(BaseEstimator):
    """Pair-merge tokenizer over raw bytes.

    After ``fit`` the instance carries ``vocab_`` (id -> byte string, base
    bytes first in sorted order, then merged tokens in merge order) and
    ``merges_`` (ordered list of merged pairs).
    """

    def __init__(self, vocab_size: int = 500):
        self.vocab_size = vocab_size

    def fit(self, corpus):
        corpus = [_as_bytes(doc) for doc in corpus]
        if not corpus:
            raise ValueError("corpus must be non-empty")
        base = sorted({bytes([b]) for doc in corpus for b in doc})
        if not base:
            raise ValueError("corpus contains no bytes")
        if self.vocab_size < len(base):
            raise ValueError(
                f"vocab_size={self.vocab_size} is below the {len(base)} distinct bytes"
            )
        sequences = [[bytes([b]) for b in doc] for doc in corpus]
        merges: list = []
        vocab: list = list(base)
        while len(vocab) < self.vocab_size:
            pairs = Counter()
            for seq in sequences:
                pairs.update(zip(seq, seq[1:]))
            if not pairs:
                break
            best = min(pairs.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            merged = best[0] + best[1]
            sequences = [_apply_merge(seq, best[0], best[1], merged) for seq in sequences]
            merges.append(best)
            vocab.append(merged)
        self.base_vocab_ = tuple(base)
        self.merges_ = merges
        self.vocab_ = {i: tok for i, tok in enumerate(vocab)}
        self.token_to_id_ = {tok: i for i, tok in self.vocab_.items()}
        return self

    def encode(self, text) -> list:
        """Token ids after replaying the merges in training order."""
        self._check_fitted()
        data = _as_bytes(text)
        base = set(self.base_vocab_)
        seq = [bytes([b]) for b in data]
        for tok in seq:
            if tok not in base:
                raise ValueError(f"byte {tok!r} not covered by the base vocabulary")
        for left, right in self.merges_:
            seq = _apply_merge(seq, left, right, left + right)
        return [self.token_to_id_[tok] for tok in seq]

    def decode(self, ids) -> bytes:
        self._check_fitted()
        return b"".join(self.vocab_[int(i)] for i in ids)

    def save(self, path) -> None:
        """Plain-text form: base vocab then one merge per line, both in hex."""
        self._check_fitted()
        lines = [f"base {len(self.base_vocab_)}"]
        lines.extend(tok.hex() for tok in self.base_vocab_)
        lines.append(f"merges {len(self.merges_)}")
        lines.extend(f"{left.hex()} {right.hex()}" for left, right in self.merges_)
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "BpeTokenizer":
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
        if not lines or not lines[0].startswith("base "):
            raise ValueError("malformed tokenizer file")
        n_base = int(lines[0].split()[1])
        base = [bytes.fromhex(ln) for ln in lines[1 : 1 + n_base]]
        idx = 1 + n_base
        if not lines[idx].startswith("merges "):
            raise ValueError("malformed tokenizer file")
        n_merges = int(lines[idx].split()[1])
        merges = []
        for ln in lines[idx + 1 : idx + 1 + n_merges]:
            left, right = ln.split()
            merges.append((bytes.fromhex(left), bytes.fromhex(right)))
        tok = cls(vocab_size=n_base + n_merges)
        tok.base_vocab_ = tuple(base)
        tok.merges_ = merges
        vocab = list(base) + [left + right for left, right in merges]
        tok.vocab_ = {i: t for i, t in enumerate(vocab)}
        tok.token_to_id_ = {t: i for i, t in tok.vocab_.items()}
        return tok

    def _check_fitted(self) -> None:
        if not hasattr(self, "vocab_"):
            raise ValueError("BpeTokenizer is not fitted")


def train_bpe(corpus, vocab_size: int) -> BpeTokenizer:
    """Fit a tokenizer on byte strings; stops early when nothing merges."""
    return BpeTokenizer(vocab_size=vocab_size).fit(corpus)
