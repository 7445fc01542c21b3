"""Message passing between robots: scheduling, range gating, loss and noise.

A robot whose transmit timer fires (every ``tx_period_ticks``, phase-offset
by robot id so the swarm does not burst in sync) offers its armed message
to every robot within the communication radius.  Each offer independently
survives with ``msg_success_prob``; surviving offers reach the receiver's
message callback together with a distance estimate, which is the true
distance plus a fresh Gaussian draw, floored at zero.

Randomness comes from the world's single stream.  Per sender, the loss
draws are consumed in ascending receiver order, then the noise draws for
the delivered subset in ascending receiver order.  Loss draws are skipped
entirely when ``msg_success_prob >= 1`` and noise draws when the noise
std is zero, so noiseless configs consume no channel randomness.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAYLOAD_SIZE = 9


@dataclass(frozen=True)
class Message:
    """Fixed 9-byte payload plus the sender's id."""

    payload: bytes
    sender_id: int

    def __post_init__(self) -> None:
        if len(self.payload) != PAYLOAD_SIZE:
            raise ValueError(f"payload must be exactly {PAYLOAD_SIZE} bytes, got {len(self.payload)}")


@dataclass(frozen=True)
class Reception:
    """A delivered message paired with the receiver's distance estimate."""

    message: Message
    estimated_distance: float

    def __post_init__(self) -> None:
        if self.estimated_distance < 0:
            raise ValueError("estimated_distance must be non-negative")


@dataclass
class ChannelParams:
    comm_radius_mm: float = 100.0
    msg_success_prob: float = 1.0
    distance_noise_std_mm: float = 0.0
    tx_period_ticks: int = 16

    def __post_init__(self) -> None:
        if self.comm_radius_mm <= 0:
            raise ValueError("comm_radius_mm must be positive")
        if not 0.0 <= self.msg_success_prob <= 1.0:
            raise ValueError("msg_success_prob must be in [0, 1]")
        if self.distance_noise_std_mm < 0:
            raise ValueError("distance_noise_std_mm must be non-negative")
        if self.tx_period_ticks < 1:
            raise ValueError("tx_period_ticks must be a positive integer")


@dataclass
class ChannelStats:
    """Counters over a run: every in-range offer, and those delivered."""

    offers: int = 0
    delivered: int = 0
    distance_errors_sq_sum: float = 0.0

    def reset(self) -> None:
        self.offers = 0
        self.delivered = 0
        self.distance_errors_sq_sum = 0.0


def apply_channel(
    distances: np.ndarray,
    params: ChannelParams,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Run offers at the given true distances through the lossy channel.

    Returns (delivered mask over the offers, estimated distances for the
    delivered subset).  Draw order follows the offer order.
    """
    k = len(distances)
    if params.msg_success_prob >= 1.0:
        delivered = np.ones(k, dtype=bool)
    elif params.msg_success_prob <= 0.0:
        delivered = np.zeros(k, dtype=bool)
    else:
        delivered = rng.random(k) < params.msg_success_prob
    kept = distances[delivered]
    if params.distance_noise_std_mm > 0.0 and len(kept):
        noise = rng.normal(0.0, params.distance_noise_std_mm, len(kept))
        estimated = np.maximum(0.0, kept + noise)
    else:
        estimated = kept
    return delivered, estimated


def transmitters_this_tick(tick: int, n: int, tx_period_ticks: int) -> range:
    """Robot ids whose transmit timer fires this tick (id = tick mod period)."""
    return range(tick % tx_period_ticks, n, tx_period_ticks)


def deliver_messages(world) -> int:
    """Fire due transmitters and dispatch receptions; returns deliveries.

    Runs inside the tick, after the controller loops: each due robot's
    ``message_tx`` is asked for a payload; robots returning ``None`` stay
    silent.  Receivers get their ``message_rx`` callback immediately, and
    a sender whose message went out is notified via ``message_tx_success``.
    """
    params: ChannelParams = world.channel
    senders = transmitters_this_tick(world.tick, world.n, params.tx_period_ticks)
    if not senders:
        return 0

    apis = world.apis
    controllers = world.controllers

    armed: list[tuple[int, Message]] = []
    for i in senders:
        payload = controllers[i].message_tx(apis[i])
        if payload is None:
            continue
        if len(payload) > PAYLOAD_SIZE:
            raise ValueError(
                f"robot {i}: message payload is {len(payload)} bytes, max {PAYLOAD_SIZE}"
            )
        armed.append((i, Message(bytes(payload).ljust(PAYLOAD_SIZE, b"\x00"), i)))
    if not armed:
        return 0

    backend = world.comms_backend()
    sender_ids = np.fromiter((i for i, _ in armed), dtype=np.int64, count=len(armed))
    offsets, cand, dist = backend.query_many(sender_ids, params.comm_radius_mm)

    stats: ChannelStats = world.channel_stats
    stats.offers += len(cand)
    # one draw batch for the whole tick: candidates are already laid out in
    # (sender id, receiver id) order, which is the draw-order contract
    delivered, estimated = apply_channel(dist, params, world.rng)
    if params.distance_noise_std_mm > 0.0 and len(estimated):
        err = estimated - dist[delivered]
        stats.distance_errors_sq_sum += float(np.dot(err, err))
    stats.delivered += len(estimated)

    sender_slot = np.repeat(np.arange(len(armed)), np.diff(offsets))[delivered]
    messages = [m for _, m in armed]
    receivers = cand[delivered].tolist()
    slots = sender_slot.tolist()
    dists_mm = estimated.tolist()
    for j, slot, d_mm in zip(receivers, slots, dists_mm):
        controllers[j].message_rx(apis[j], messages[slot], d_mm)
    for i, _ in armed:
        controllers[i].message_tx_success(apis[i])
    return len(receivers)
