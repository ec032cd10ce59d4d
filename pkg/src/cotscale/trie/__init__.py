"""Byte-pair tokenization and prefix-trie degree analysis."""

from .analysis import (
    REPORT_COLUMNS,
    TrieCorrelation,
    enumerate_traces,
    task_vs_trie_degree,
    write_correlation_csv,
    write_degree_report_csv,
)
from .bpe import BpeTokenizer, train_bpe
from .prefix import DegreeReport, PrefixTrie, TrieNode, build_trie, degree_report

__all__ = [
    "BpeTokenizer",
    "DegreeReport",
    "PrefixTrie",
    "REPORT_COLUMNS",
    "TrieCorrelation",
    "TrieNode",
    "build_trie",
    "degree_report",
    "enumerate_traces",
    "task_vs_trie_degree",
    "train_bpe",
    "write_correlation_csv",
    "write_degree_report_csv",
]
