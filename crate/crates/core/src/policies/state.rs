/// Per-arm pull counts and reward sums of one game.
#[derive(Debug, Clone, PartialEq)]
pub struct RunState {
    pulls: Vec<u64>,
    sums: Vec<f64>,
    total: u64,
}

impl RunState {
    pub fn new(num_arms: usize) -> Self {
        Self {
            pulls: vec![0; num_arms],
            sums: vec![0.0; num_arms],
            total: 0,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// Total pulls so far.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Empirical mean of `arm`, `None` before its first pull.
    #[inline]
    pub fn mean(&self, arm: usize) -> Option<f64> {
        match self.pulls[arm] {
            0 => None,
            n => Some(self.sums[arm] / n as f64),
        }
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.pulls[arm] += 1;
        self.sums[arm] += reward;
        self.total += 1;
    }

    /// First arm never pulled.
    pub fn first_unpulled(&self) -> Option<usize> {
        self.pulls.iter().position(|&n| n == 0)
    }
}
