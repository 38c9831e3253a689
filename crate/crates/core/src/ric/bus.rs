//! Fan-out of KPI windows to subscribed consumers.

use std::collections::VecDeque;

use crate::sim::KpiSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubscriptionId(usize);

/// A sample as delivered, stamped with its publication sequence number.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivered {
    pub seq: u64,
    pub sample: KpiSample,
}

#[derive(Debug, Clone, Default)]
pub struct KpiBus {
    next_seq: u64,
    queues: Vec<VecDeque<Delivered>>,
}

impl KpiBus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subscribe(&mut self) -> SubscriptionId {
        self.queues.push(VecDeque::new());
        SubscriptionId(self.queues.len() - 1)
    }

    pub fn subscribers(&self) -> usize {
        self.queues.len()
    }

    /// Delivers every sample to every subscriber, in order.
    pub fn publish(&mut self, samples: &[KpiSample]) {
        for s in samples {
            let seq = self.next_seq;
            self.next_seq += 1;
            for q in &mut self.queues {
                q.push_back(Delivered {
                    seq,
                    sample: s.clone(),
                });
            }
        }
    }

    /// Takes everything queued for `sub` since its last receive.
    pub fn receive(&mut self, sub: SubscriptionId) -> Vec<Delivered> {
        self.queues
            .get_mut(sub.0)
            .map(|q| q.drain(..).collect())
            .unwrap_or_default()
    }

    /// Samples published so far, across all windows.
    pub fn published(&self) -> u64 {
        self.next_seq
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(cell: u32, end: u64) -> KpiSample {
        KpiSample {
            window_end_tick: end,
            cell_id: cell,
            mean_load: 0.0,
            call_blocks: 0,
            rlf_count: 0,
            ho_count: 0,
            pingpong_count: 0,
        }
    }

    #[test]
    fn no_subscribers_is_a_noop() {
        let mut bus = KpiBus::new();
        bus.publish(&[sample(0, 10)]);
        assert_eq!(bus.subscribers(), 0);
    }

    #[test]
    fn fan_out_to_two() {
        let mut bus = KpiBus::new();
        let a = bus.subscribe();
        let b = bus.subscribe();
        let window: Vec<_> = (0..19).map(|c| sample(c, 10)).collect();
        bus.publish(&window);
        assert_eq!(bus.receive(a).len(), 19);
        assert_eq!(bus.receive(b).len(), 19);
        assert!(bus.receive(a).is_empty());
    }

    #[test]
    fn hundred_windows_sequence_audit() {
        let mut bus = KpiBus::new();
        let subs = [bus.subscribe(), bus.subscribe(), bus.subscribe()];
        let mut received = vec![Vec::new(); subs.len()];
        let mut published = Vec::new();
        for w in 0..100u64 {
            let window: Vec<_> = (0..7).map(|c| sample(c, (w + 1) * 10)).collect();
            published.extend(window.iter().cloned());
            bus.publish(&window);
            // Subscribers drain at different cadences.
            for (i, s) in subs.iter().enumerate() {
                if w % (i as u64 + 1) == 0 {
                    received[i].extend(bus.receive(*s));
                }
            }
        }
        for (i, s) in subs.iter().enumerate() {
            received[i].extend(bus.receive(*s));
            let seqs: Vec<u64> = received[i].iter().map(|d| d.seq).collect();
            assert_eq!(seqs, (0..700).collect::<Vec<_>>());
            let samples: Vec<KpiSample> = received[i].iter().map(|d| d.sample.clone()).collect();
            assert_eq!(samples, published);
        }
    }
}
