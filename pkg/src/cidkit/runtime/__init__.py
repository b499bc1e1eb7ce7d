from cidkit.runtime.monitor import TraceMonitor, Verdict, Violation, check_trace
from cidkit.runtime.simulator import (
    ComponentInstance,
    Deferred,
    ModelNotWellFormed,
    Nil,
    ObjectRef,
    Refs,
    Simulator,
    Subscribed,
)
from cidkit.runtime.trace import MalformedEvent, dump_trace, parse_trace

__all__ = [
    "ComponentInstance",
    "Deferred",
    "MalformedEvent",
    "ModelNotWellFormed",
    "Nil",
    "ObjectRef",
    "Refs",
    "Simulator",
    "Subscribed",
    "TraceMonitor",
    "Verdict",
    "Violation",
    "check_trace",
    "dump_trace",
    "parse_trace",
]
