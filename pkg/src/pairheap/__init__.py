"""pairheap: meldable pairing heaps with lazy decrease-key.

The library couples three things that are usually kept apart:

* :mod:`pairheap.core` - the heap itself, with exact cost counters and a
  configurable policy (lazy or eager decrease-key, periodic clean-up,
  meld without clean-up, direct relinking);
* :mod:`pairheap.workload` - deterministic trace generators and a replay
  runner checked against a naive sorted-multiset oracle;
* :mod:`pairheap.audit` - an offline auditor that recolors a finished
  trace and verifies the potential-function bookkeeping the amortized
  bounds rest on.
"""

from .core import (BadHandleError, EmptyHeapError, HeapError, Heap,
                   KeyIncreaseError, LinkOrigin, NodeHandle, NotInHeapError,
                   SelfMeldError, UnknownHeapError, Universe,
                   ValidationReport, VariantConfig)
from .metrics import CostCounters, OpRecord
from .trace import TraceError, TraceEvent, format_trace, parse_trace, write_trace
from .workload import (Oracle, OracleError, RunVerdict, TraceReplayError,
                       WorkloadSpec, dijkstra_trace, generate, oracle_step,
                       run_trace)

__version__ = "0.1.0"

__all__ = [
    "BadHandleError", "CostCounters", "EmptyHeapError", "Heap", "HeapError",
    "KeyIncreaseError", "LinkOrigin", "NodeHandle", "NotInHeapError",
    "OpRecord", "Oracle", "OracleError", "RunVerdict", "SelfMeldError",
    "TraceError", "TraceEvent", "TraceReplayError", "UnknownHeapError",
    "Universe", "ValidationReport", "VariantConfig", "WorkloadSpec",
    "dijkstra_trace", "format_trace", "generate", "oracle_step",
    "parse_trace", "run_trace", "write_trace",
]
