//! Forward propagation of a distribution under a walk that may switch
//! step law at the origin.

use crate::error::{Error, Result};
use crate::measure::LatticeMeasure;

use super::WalkSpec;

/// Entries this small at the edges of the window are dropped into `lost`.
pub(crate) const TRIM: f64 = 1e-30;
pub(crate) const STATE_CAP: usize = 1 << 24;

#[derive(Clone, Debug)]
pub(crate) struct Chain {
    low: LatticeMeasure,
    high: Option<LatticeMeasure>,
}

impl Chain {
    pub fn new(walk: &WalkSpec) -> Self {
        match walk {
            WalkSpec::Homogeneous(step) => Self {
                low: step.materialize(),
                high: None,
            },
            WalkSpec::Oscillating { neg_side, pos_side } => Self {
                low: neg_side.materialize(),
                high: Some(pos_side.materialize()),
            },
            WalkSpec::Concentrated { mu_plus, nu_minus } => Self {
                low: mu_plus.materialize(),
                high: Some(nu_minus.materialize()),
            },
        }
    }

    pub fn law_at(&self, z: i64) -> &LatticeMeasure {
        match &self.high {
            Some(h) if z >= 1 => h,
            _ => &self.low,
        }
    }

    fn jump_range(&self, lo: i64, hi: i64) -> (i64, i64) {
        let mut laws = Vec::with_capacity(2);
        if lo <= 0 || self.high.is_none() {
            laws.push(&self.low);
        }
        if let Some(h) = &self.high {
            if hi >= 1 {
                laws.push(h);
            }
        }
        let mut min = i64::MAX;
        let mut max = i64::MIN;
        for l in laws {
            if !l.is_zero() {
                min = min.min(l.support_min());
                max = max.max(l.support_max());
            }
        }
        if min > max {
            (0, 0)
        } else {
            (min, max)
        }
    }
}

/// Sub-probability vector on a contiguous window.
#[derive(Clone, Debug)]
pub(crate) struct Dist {
    pub lo: i64,
    pub p: Vec<f64>,
    /// Mass sent beyond a materialized window or trimmed at the edges.
    pub lost: f64,
    /// Mass removed by sub-probability step laws.
    pub killed: f64,
}

impl Dist {
    pub fn delta(x: i64) -> Self {
        Self {
            lo: x,
            p: vec![1.0],
            lost: 0.0,
            killed: 0.0,
        }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.p.len() as i64 - 1
    }

    pub fn get(&self, z: i64) -> f64 {
        let i = z - self.lo;
        if i < 0 || i >= self.p.len() as i64 {
            0.0
        } else {
            self.p[i as usize]
        }
    }

    /// Removes and returns the mass at `z`.
    pub fn take(&mut self, z: i64) -> f64 {
        let i = z - self.lo;
        if i < 0 || i >= self.p.len() as i64 {
            0.0
        } else {
            std::mem::take(&mut self.p[i as usize])
        }
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn step(&self, chain: &Chain) -> Result<Self> {
        if self.p.is_empty() {
            return Ok(self.clone());
        }
        let (jmin, jmax) = chain.jump_range(self.lo, self.hi());
        let lo = self.lo + jmin;
        let len = self.p.len() + (jmax - jmin) as usize;
        if len > STATE_CAP {
            return Err(Error::Resource { len, cap: STATE_CAP });
        }
        let mut out = vec![0.0; len];
        let mut lost = self.lost;
        let mut killed = self.killed;
        let mut i = 0;
        while i < self.p.len() {
            let z = self.lo + i as i64;
            let law = chain.law_at(z);
            // run of positions sharing the same law
            let run_end = match chain.high {
                Some(_) if z <= 0 => ((0 - self.lo + 1) as usize).min(self.p.len()),
                _ => self.p.len(),
            };
            let w = law.weights();
            let base = (z + law.support_min() - lo) as usize;
            let leak_tail = law.tail_mass();
            let leak_kill = (1.0 - law.total_mass()).max(0.0);
            for (off, &pz) in self.p[i..run_end].iter().enumerate() {
                if pz == 0.0 {
                    continue;
                }
                let dst = &mut out[base + off..base + off + w.len()];
                for (o, &wk) in dst.iter_mut().zip(w) {
                    *o += pz * wk;
                }
                lost += pz * leak_tail;
                killed += pz * leak_kill;
            }
            i = run_end;
        }
        let mut d = Self {
            lo,
            p: out,
            lost,
            killed,
        };
        d.trim();
        Ok(d)
    }

    fn trim(&mut self) {
        let mut first = 0;
        while first < self.p.len() && self.p[first] < TRIM {
            self.lost += self.p[first];
            first += 1;
        }
        if first == self.p.len() {
            self.p.clear();
            return;
        }
        let mut last = self.p.len() - 1;
        while last > first && self.p[last] < TRIM {
            self.lost += self.p[last];
            last -= 1;
        }
        self.p.truncate(last + 1);
        self.p.drain(..first);
        self.lo += first as i64;
    }
}

/// `P_x(S_n = y)` for `n < horizon`, in one pass.
pub(crate) fn occupation_series(walk: &WalkSpec, x: i64, y: i64, horizon: usize) -> Result<Vec<f64>> {
    let chain = Chain::new(walk);
    let mut d = Dist::delta(x);
    let mut out = Vec::with_capacity(horizon);
    for n in 0..horizon {
        out.push(d.get(y));
        if n + 1 < horizon {
            d = d.step(&chain)?;
        }
    }
    Ok(out)
}
