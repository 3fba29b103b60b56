"""Exact verification of the parity property of L(p, m_i**2) between consecutive odd primes,
the gap bound it implies, and the Legendre/Andrica/Brocard/Oppermann predicates."""
from .backend import kernels
from .conjectures import (IntervalVerdict, andrica_check, andrica_rank_key, brocard_check,
                          compare_andrica, legendre_check, oppermann_check)
from .engine import (Checkpoint, RangeSummary, ScanConfig, checkpoint_load, checkpoint_save,
                     merge_summaries, plan_shards, run_scan)
from .errors import (CapacityError, CheckpointError, CheckpointMismatch, DomainError,
                     ParityScanError, UsageError)
from .exact import LIMIT
from .parity import (GapVerdict, ParityVerdict, base_case_L, beyond_midpoint_probe, chain_check,
                     closed_form_L, eq14_check, gap_bound_check, largest_multiple, lemma1_check,
                     lemma2_check, parity_scan_pair)
from .primes import (PrimePair, PrimeWindow, count_primes_open, is_prime, iterate_pairs,
                     sieve_segment)
from .report import emit_report, exit_code

BACKEND = kernels.NAME
__version__ = "0.1.0"
