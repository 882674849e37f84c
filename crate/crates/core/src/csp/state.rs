use crate::encoder::{ConfigCsp, VarId};

/// Current domains of every CSP variable as bitsets over each variable's
/// initial value list, with a trail for exact restoration on backtrack.
#[derive(Debug, Clone)]
pub struct SearchState {
    values: Vec<Vec<u32>>,
    offsets: Vec<usize>,
    words: Vec<u64>,
    sizes: Vec<u32>,
    trail: Vec<TrailEntry>,
    levels: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct TrailEntry {
    var: usize,
    word: usize,
    old: u64,
}

/// A domain became empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wipeout;

impl SearchState {
    pub fn new(csp: &ConfigCsp) -> Self {
        let mut offsets = Vec::with_capacity(csp.vars.len());
        let mut words = Vec::new();
        let mut sizes = Vec::with_capacity(csp.vars.len());
        let values: Vec<Vec<u32>> = csp.vars.iter().map(|v| v.domain.clone()).collect();
        for domain in &values {
            offsets.push(words.len());
            let n = domain.len();
            for w in 0..n.div_ceil(64) {
                let bits = (n - w * 64).min(64);
                words.push(if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 });
            }
            sizes.push(n as u32);
        }
        SearchState {
            values,
            offsets,
            words,
            sizes,
            trail: Vec::new(),
            levels: Vec::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.values.len()
    }

    fn position(&self, var: VarId, value: u32) -> Option<usize> {
        self.values[var.0].binary_search(&value).ok()
    }

    fn bit(&self, var: VarId, pos: usize) -> bool {
        self.words[self.offsets[var.0] + pos / 64] >> (pos % 64) & 1 == 1
    }

    pub fn contains(&self, var: VarId, value: u32) -> bool {
        self.position(var, value).is_some_and(|p| self.bit(var, p))
    }

    pub fn size(&self, var: VarId) -> u32 {
        self.sizes[var.0]
    }

    pub fn fixed(&self, var: VarId) -> Option<u32> {
        if self.sizes[var.0] == 1 {
            self.values(var).next()
        } else {
            None
        }
    }

    pub fn values(&self, var: VarId) -> impl Iterator<Item = u32> + '_ {
        self.values[var.0]
            .iter()
            .enumerate()
            .filter(move |(p, _)| self.bit(var, *p))
            .map(|(_, &v)| v)
    }

    /// Removes `value`; returns whether the domain changed.
    pub fn remove(&mut self, var: VarId, value: u32) -> Result<bool, Wipeout> {
        let Some(pos) = self.position(var, value) else {
            return Ok(false);
        };
        if !self.bit(var, pos) {
            return Ok(false);
        }
        let word = self.offsets[var.0] + pos / 64;
        if !self.levels.is_empty() {
            self.trail.push(TrailEntry {
                var: var.0,
                word,
                old: self.words[word],
            });
        }
        self.words[word] &= !(1u64 << (pos % 64));
        self.sizes[var.0] -= 1;
        if self.sizes[var.0] == 0 {
            Err(Wipeout)
        } else {
            Ok(true)
        }
    }

    /// Reduces the domain to `{value}`; returns whether it changed.
    pub fn assign(&mut self, var: VarId, value: u32) -> Result<bool, Wipeout> {
        if !self.contains(var, value) {
            return Err(Wipeout);
        }
        if self.sizes[var.0] == 1 {
            return Ok(false);
        }
        let others: Vec<u32> = self.values(var).filter(|&v| v != value).collect();
        for v in others {
            self.remove(var, v)?;
        }
        Ok(true)
    }

    pub fn push_level(&mut self) {
        self.levels.push(self.trail.len());
    }

    /// Undoes every change since the matching `push_level`.
    pub fn pop_level(&mut self) {
        let mark = self.levels.pop().expect("pop_level without push_level");
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            let removed = (e.old & !self.words[e.word]).count_ones();
            self.words[e.word] = e.old;
            self.sizes[e.var] += removed;
        }
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    /// Current domains of every variable.
    pub fn snapshot(&self) -> Vec<Vec<u32>> {
        (0..self.values.len())
            .map(|v| self.values(VarId(v)).collect())
            .collect()
    }
}
