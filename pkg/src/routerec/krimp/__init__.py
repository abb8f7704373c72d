"""MDL code-table compression: mining, greedy cover, sizes, construction."""
from .codetable import (
    CodeTable,
    CodeTableEntry,
    CompressionStats,
    Itemset,
    KrimpError,
    code_lengths,
    cover,
    encoded_ct_size,
    encoded_db_size,
    read_code_table,
    singleton_standard_table,
    standard_code_lengths,
    total_size,
    write_code_table,
)
from .compress import CompressResult, krimp_compress
from .kernels import USING_NUMBA, cover_bits, cover_usages, pack_rows, unpack_row, words_for
from .mining import (
    Candidate,
    CandidateLimitError,
    mine_candidates,
    mine_candidates_with_tids,
)

__all__ = [
    "CodeTable",
    "CodeTableEntry",
    "CompressionStats",
    "Itemset",
    "KrimpError",
    "Candidate",
    "CandidateLimitError",
    "CompressResult",
    "USING_NUMBA",
    "code_lengths",
    "cover",
    "cover_bits",
    "cover_usages",
    "encoded_ct_size",
    "encoded_db_size",
    "krimp_compress",
    "mine_candidates",
    "mine_candidates_with_tids",
    "pack_rows",
    "read_code_table",
    "singleton_standard_table",
    "standard_code_lengths",
    "total_size",
    "unpack_row",
    "words_for",
    "write_code_table",
]
