"""Node automata for broadcasting and gossiping with beeps, and their run helpers."""

from .base import ProtocolError
from .broadcast import BroadcastRelay, BroadcastResult, BroadcastSource, run_broadcast
from .diameter import DiamEstNode, DiamEstResult, blue_round, run_diam_est
from .findmax import FindMaxNode, FindMaxResult, findmax_length, run_find_max, run_modified_find_max
from .gossip import GossipNode, GossipResult, random_messages, read_messages, run_gossip, write_messages
from .ordering import OrderingNode, OrderingResult, run_ordering
from .schedule import Plan, plan_schedule
from .sync import SyncNode, SyncResult, frame_length, run_sync, sync_guard

__all__ = [
    "BroadcastRelay", "BroadcastResult", "BroadcastSource", "DiamEstNode", "DiamEstResult",
    "FindMaxNode", "FindMaxResult", "GossipNode", "GossipResult", "OrderingNode", "OrderingResult",
    "Plan", "ProtocolError", "SyncNode", "SyncResult", "blue_round", "findmax_length", "frame_length",
    "plan_schedule", "random_messages", "read_messages", "run_broadcast", "run_diam_est", "run_find_max", "run_gossip",
    "run_modified_find_max", "run_ordering", "run_sync", "sync_guard", "write_messages",
]
