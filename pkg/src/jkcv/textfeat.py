"""Bag-of-words features restricted to the top-N terms by summed tf-idf.

The tokenizer is deliberately primitive: lowercase, then take runs of
alphanumeric characters. tf-idf is used only to select the vocabulary;
the emitted features are raw term counts.
"""
from __future__ import annotations

import csv
import math
import re
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dataset

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased runs of alphanumeric characters; empties dropped."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Corpus:
    """Raw documents with a parallel dense label vector.

    ``label_names`` maps label id -> original label string when the corpus
    was read from disk.
    """

    documents: tuple[str, ...]
    labels: np.ndarray
    label_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "documents", tuple(self.documents))
        if len(self.documents) != labels.shape[0]:
            raise ValueError(
                f"{len(self.documents)} documents but {labels.shape[0]} labels"
            )
        if len(self.documents) == 0:
            raise ValueError("corpus is empty")
        if labels.min() < 0:
            raise ValueError("labels must be dense non-negative ids")
        present = np.unique(labels)
        if present.shape[0] != labels.max() + 1:
            raise ValueError("every class needs at least one document")

    @property
    def class_count(self) -> int:
        return int(self.labels.max()) + 1


def encode_labels(raw: list[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Map raw label strings to dense ids.

    If every label parses as an integer the sort is numeric, otherwise
    lexicographic, so ids are stable across runs.
    """
    distinct = sorted(set(raw))
    try:
        distinct = sorted(distinct, key=int)
    except ValueError:
        pass
    index = {name: i for i, name in enumerate(distinct)}
    return np.array([index[r] for r in raw], dtype=np.int64), tuple(distinct)


def read_delimited_corpus(path: str | Path, delimiter: str = "\t") -> Corpus:
    """Two-column delimited file: label, document text. UTF-8."""
    labels_raw, docs = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter=delimiter), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 2 columns, got {len(row)}"
                )
            labels_raw.append(row[0])
            docs.append(row[1])
    labels, names = encode_labels(labels_raw)
    return Corpus(tuple(docs), labels, names)


def read_directory_corpus(root: str | Path) -> Corpus:
    """Directory-per-class layout: each subdirectory is a class, each file
    a document. Subdirectories and files are visited in sorted order."""
    root = Path(root)
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise ValueError(f"no class subdirectories under {root}")
    docs, labels_raw = [], []
    for class_dir in class_dirs:
        for doc_path in sorted(p for p in class_dir.iterdir() if p.is_file()):
            docs.append(doc_path.read_text(encoding="utf-8"))
            labels_raw.append(class_dir.name)
    labels, names = encode_labels(labels_raw)
    return Corpus(tuple(docs), labels, names)


@dataclass(frozen=True)
class Vocabulary:
    """Selected terms ordered by selection score (desc), ties lexicographic."""

    terms: tuple[str, ...]
    df: tuple[int, ...]
    idf: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.terms)


def build_vocabulary(corpus: Corpus, top_n: int) -> Vocabulary:
    """Keep the ``top_n`` terms with the highest summed tf-idf.

    Per term: idf = ln((1 + n_docs) / (1 + df)) + 1 and the score is the
    total raw count over the corpus times idf. When the corpus has fewer
    distinct terms than ``top_n`` all of them are returned with a warning.
    """
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    n_docs = len(corpus.documents)
    tf_total: Counter = Counter()
    df: Counter = Counter()
    for doc in corpus.documents:
        counts = Counter(tokenize(doc))
        tf_total.update(counts)
        df.update(counts.keys())
    if len(tf_total) < top_n:
        warnings.warn(
            f"corpus has {len(tf_total)} distinct terms < top_n={top_n}; "
            "keeping all of them",
            UserWarning,
        )
    idf = {t: math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in tf_total}
    ranked = sorted(tf_total, key=lambda t: (-tf_total[t] * idf[t], t))
    chosen = ranked[:top_n]
    return Vocabulary(
        terms=tuple(chosen),
        df=tuple(df[t] for t in chosen),
        idf=tuple(idf[t] for t in chosen),
    )


def vectorize(corpus: Corpus, vocab: Vocabulary) -> Dataset:
    """Raw-count feature matrix over the vocabulary; labels pass through.
    Out-of-vocabulary tokens are dropped."""
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty")
    col = {t: j for j, t in enumerate(vocab.terms)}
    X = np.zeros((len(corpus.documents), len(vocab)), dtype=np.float64)
    for i, doc in enumerate(corpus.documents):
        for tok, c in Counter(tokenize(doc)).items():
            j = col.get(tok)
            if j is not None:
                X[i, j] = c
    return Dataset(X, corpus.labels, corpus.class_count)
