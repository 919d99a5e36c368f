use num_traits::Zero;

use super::Rat;

/// Incrementally grown rational row space, kept in echelon form.
#[derive(Clone, Debug, Default)]
pub struct Span {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Span {
    pub fn new() -> Self {
        Span::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = &v[*pivot] / &row[*pivot];
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|c| !c.is_zero()) {
            Some(pivot) => {
                self.rows.push((pivot, r));
                true
            }
            None => false,
        }
    }
}
