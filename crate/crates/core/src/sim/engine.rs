use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{QueueStats, Scheduler, SimConfig, SimResult, Stability};
use crate::assignment::Scheme;
use crate::routing::Router;
use crate::{ChannelId, Error, NodeId, Result};

/// One successful transmission in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transmission {
    pub slot: u64,
    pub channel: ChannelId,
    pub from: NodeId,
    pub from_tx: u32,
    pub to: NodeId,
    pub to_tx: u32,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    pair: u32,
    hop: u16,
    born: u64,
}

#[derive(Debug, Clone, Copy)]
struct Step {
    queue: u32,
    to: NodeId,
    to_tx: u32,
    channel: ChannelId,
}

struct Channel {
    id: ChannelId,
    /// Queue index of each member's radio on this channel.
    queues: Vec<u32>,
    members: Vec<NodeId>,
    head_only: bool,
    next: usize,
}

/// Slot-by-slot engine behind [`super::run`]. Exposed so tests can inspect
/// every transmission.
pub struct Simulator {
    n: u32,
    t: u32,
    lambda: f64,
    horizon: u64,
    warmup: u64,
    scheduler: Scheduler,
    capacity: Option<usize>,
    rng: ChaCha8Rng,
    channels: Vec<Channel>,
    /// Route steps of pair `(s-1)*n + (d-1)` live in `steps[offsets[p]..offsets[p+1]]`.
    offsets: Vec<usize>,
    steps: Vec<Step>,
    queues: Vec<VecDeque<Packet>>,
    slot: u64,
    sent: Vec<Transmission>,
    moving: Vec<Packet>,
    generated: u64,
    delivered: u64,
    dropped: u64,
    window_generated: u64,
    window_delivered: u64,
    window_hops: u64,
    delivered_by_source: Vec<u64>,
    queue_max: Vec<usize>,
    queue_sum: Vec<u64>,
    thirds_max: [usize; 3],
}

impl Simulator {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.check()?;
        let a = &cfg.assignment;
        let router = Router::new(a, cfg.router)?;
        let n = a.n_nodes();
        let t = a.n_transceivers();
        let queue = |node: NodeId, tx: u32| (node - 1) * t + (tx - 1);

        let mut offsets = Vec::with_capacity((n * n) as usize + 1);
        let mut steps = Vec::new();
        offsets.push(0);
        for s in 1..=n {
            for d in 1..=n {
                if s != d {
                    for h in router.route(s, d)?.hops {
                        let to_tx = a
                            .group_by_channel(h.channel)
                            .and_then(|g| g.tx_of(h.to))
                            .ok_or_else(|| Error::invalid(format!("{} cannot hear channel {}", h.to, h.channel)))?;
                        steps.push(Step {
                            queue: queue(h.from, h.tx),
                            to: h.to,
                            to_tx,
                            channel: h.channel,
                        });
                    }
                }
                offsets.push(steps.len());
            }
        }

        let channels = a
            .groups()
            .iter()
            .map(|g| Channel {
                id: g.channel,
                queues: (0..g.len()).map(|p| queue(g.members[p], g.tx_at(p))).collect(),
                members: g.members.clone(),
                head_only: a.scheme() == Scheme::Log2 && g.tx_index == 2,
                next: 0,
            })
            .collect();

        let nq = (n * t) as usize;
        Ok(Simulator {
            n,
            t,
            lambda: cfg.lambda.min(1.0),
            horizon: cfg.horizon,
            warmup: cfg.warmup,
            scheduler: cfg.scheduler,
            capacity: cfg.queue_capacity,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            channels,
            offsets,
            steps,
            queues: vec![VecDeque::new(); nq],
            slot: 0,
            sent: Vec::new(),
            moving: Vec::new(),
            generated: 0,
            delivered: 0,
            dropped: 0,
            window_generated: 0,
            window_delivered: 0,
            window_hops: 0,
            delivered_by_source: vec![0; n as usize],
            queue_max: vec![0; nq],
            queue_sum: vec![0; nq],
            thirds_max: [0; 3],
        })
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn finished(&self) -> bool {
        self.slot >= self.horizon
    }

    /// Member position allowed to transmit on `channel` in `slot` under
    /// strict TDMA.
    pub fn owner(&self, channel: ChannelId, slot: u64) -> Option<NodeId> {
        let c = self.channels.iter().find(|c| c.id == channel)?;
        let pos = if c.head_only {
            0
        } else {
            (slot % c.members.len() as u64) as usize
        };
        Some(c.members[pos])
    }

    /// Packets currently queued anywhere.
    pub fn in_flight(&self) -> u64 {
        self.queues.iter().map(|q| q.len() as u64).sum()
    }

    fn route(&self, pair: u32) -> &[Step] {
        let p = pair as usize;
        &self.steps[self.offsets[p]..self.offsets[p + 1]]
    }

    fn enqueue(&mut self, p: Packet) {
        let q = self.route(p.pair)[p.hop as usize].queue as usize;
        if self.capacity.is_some_and(|cap| self.queues[q].len() >= cap) {
            self.dropped += 1;
        } else {
            self.queues[q].push_back(p);
        }
    }

    /// Runs one slot and returns its transmissions.
    pub fn step(&mut self) -> &[Transmission] {
        let slot = self.slot;
        let measuring = slot >= self.warmup;

        for s in 1..=self.n {
            if self.lambda > 0.0 && self.rng.gen::<f64>() < self.lambda {
                let mut d = self.rng.gen_range(1..self.n);
                if d >= s {
                    d += 1;
                }
                self.generated += 1;
                if measuring {
                    self.window_generated += 1;
                }
                let pair = (s - 1) * self.n + (d - 1);
                self.enqueue(Packet {
                    pair,
                    hop: 0,
                    born: slot,
                });
            }
        }

        self.sent.clear();
        self.moving.clear();
        for ci in 0..self.channels.len() {
            let c = &self.channels[ci];
            let len = c.queues.len();
            let pos = match (self.scheduler, c.head_only) {
                (_, true) => (!self.queues[c.queues[0] as usize].is_empty()).then_some(0),
                (Scheduler::StrictTdma, false) => {
                    let p = (slot % len as u64) as usize;
                    Some(p).filter(|&p| !self.queues[c.queues[p] as usize].is_empty())
                }
                (Scheduler::WorkConservingRr, false) => (0..len)
                    .map(|i| (c.next + i) % len)
                    .find(|&p| !self.queues[c.queues[p] as usize].is_empty()),
            };
            let Some(pos) = pos else { continue };
            let q = self.channels[ci].queues[pos] as usize;
            self.channels[ci].next = (pos + 1) % len;
            let p = self.queues[q].pop_front().expect("owner queue is non-empty");
            let step = self.route(p.pair)[p.hop as usize];
            debug_assert_eq!(step.channel, self.channels[ci].id);
            self.sent.push(Transmission {
                slot,
                channel: step.channel,
                from: q as u32 / self.t + 1,
                from_tx: q as u32 % self.t + 1,
                to: step.to,
                to_tx: step.to_tx,
            });
            self.moving.push(p);
        }

        let moving = std::mem::take(&mut self.moving);
        for mut p in moving.iter().copied() {
            p.hop += 1;
            if p.hop as usize == self.route(p.pair).len() {
                self.delivered += 1;
                if p.born >= self.warmup {
                    self.window_delivered += 1;
                    self.window_hops += u64::from(p.hop);
                    self.delivered_by_source[(p.pair / self.n) as usize] += 1;
                }
            } else {
                self.enqueue(p);
            }
        }
        self.moving = moving;

        if measuring {
            let third = (((slot - self.warmup) * 3) / (self.horizon - self.warmup)).min(2) as usize;
            let mut largest = 0;
            for (i, q) in self.queues.iter().enumerate() {
                let len = q.len();
                largest = largest.max(len);
                self.queue_max[i] = self.queue_max[i].max(len);
                self.queue_sum[i] += len as u64;
            }
            self.thirds_max[third] = self.thirds_max[third].max(largest);
        }
        self.slot += 1;
        &self.sent
    }

    pub fn finish(mut self, cfg: &SimConfig) -> SimResult {
        while !self.finished() {
            self.step();
        }
        let window = self.horizon - self.warmup;
        let w = window as f64;
        let n = self.n as usize;
        let queues = (0..self.queues.len())
            .map(|i| QueueStats {
                node: i as u32 / self.t + 1,
                tx: i as u32 % self.t + 1,
                max: self.queue_max[i] as u64,
                mean: self.queue_sum[i] as f64 / w,
            })
            .collect();
        SimResult::assemble(
            cfg,
            super::Counts {
                generated: self.generated,
                delivered: self.delivered,
                dropped: self.dropped,
                in_flight: self.in_flight(),
                window_generated: self.window_generated,
                window_delivered: self.window_delivered,
                window_hops: self.window_hops,
            },
            self.delivered_by_source
                .iter()
                .map(|&c| c as f64 / w)
                .collect::<Vec<_>>(),
            queues,
            Stability::judge(self.thirds_max),
            n,
        )
    }
}
