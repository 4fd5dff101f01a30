use std::collections::VecDeque;

use rand::Rng;

/// `((n, x), a, r, (n + 1, x_next))`; `terminal` marks `n = N_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub n: usize,
    pub x: usize,
    pub a: usize,
    pub r: f64,
    pub x_next: usize,
    pub terminal: bool,
}

/// Bounded FIFO of transitions; the oldest entry is evicted first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    items: VecDeque<Transition>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self { items: VecDeque::with_capacity(capacity.min(1 << 16)), capacity }
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn clear(&mut self) {
        self.items.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// `k` entries drawn uniformly with replacement.
    pub fn sample(&self, k: usize, rng: &mut impl Rng) -> Vec<Transition> {
        if self.items.is_empty() {
            return Vec::new();
        }
        (0..k).map(|_| self.items[rng.random_range(0..self.items.len())]).collect()
    }
}

/// Fixed-capacity uniform sample of a stream (classic reservoir sampling).
#[derive(Debug, Clone)]
pub struct ReservoirBuffer<T> {
    items: Vec<T>,
    capacity: usize,
    offered: u64,
}

impl<T> ReservoirBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "reservoir capacity must be positive");
        Self { items: Vec::new(), capacity, offered: 0 }
    }

    /// Keeps `item` outright while there is room, afterwards overwrites a
    /// uniform slot with probability `capacity / offered`.
    pub fn offer(&mut self, item: T, rng: &mut impl Rng) {
        self.offered += 1;
        if self.items.len() < self.capacity {
            self.items.push(item);
            return;
        }
        let j = rng.random_range(0..self.offered);
        if (j as usize) < self.capacity {
            self.items[j as usize] = item;
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn offered(&self) -> u64 {
        self.offered
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    /// `k` entries drawn uniformly with replacement.
    pub fn sample<'a>(&'a self, k: usize, rng: &mut impl Rng) -> Vec<&'a T> {
        if self.items.is_empty() {
            return Vec::new();
        }
        (0..k).map(|_| &self.items[rng.random_range(0..self.items.len())]).collect()
    }
}

/// Adds `item` to `buffer` with reservoir semantics.
pub fn reservoir_offer<T>(buffer: &mut ReservoirBuffer<T>, item: T, rng: &mut impl Rng) {
    buffer.offer(item, rng);
}
