//! Short-term classifier: k nearest neighbors over a sliding window of frames.

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::store::{Label, LabeledStore, Retention};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    store: LabeledStore,
    k: usize,
}

/// Squared Euclidean distance, giving up once it reaches `bound`.
///
/// Four independent accumulators let the loop vectorize; partial sums only
/// grow, so an early exit never drops a true neighbor.
#[inline]
fn sq_dist_bounded(a: &[f64], b: &[f64], bound: f64) -> f64 {
    const CHECK_EVERY: usize = 64;
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(CHECK_EVERY);
    let mut cb = b.chunks_exact(CHECK_EVERY);
    for (xa, xb) in ca.by_ref().zip(cb.by_ref()) {
        for (qa, qb) in xa.chunks_exact(4).zip(xb.chunks_exact(4)) {
            for l in 0..4 {
                let d = qa[l] - qb[l];
                acc[l] += d * d;
            }
        }
        let partial = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        if partial >= bound {
            return partial;
        }
    }
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (i, (x, y)) in ra.iter().zip(rb).enumerate() {
        let d = x - y;
        acc[i % 4] += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

impl KnnModel {
    pub fn new(k: usize, window: usize, dim: usize) -> Self {
        assert!(k >= 1, "k must be at least 1");
        Self { store: LabeledStore::new(Retention::Window(window), dim), k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn store(&self) -> &LabeledStore {
        &self.store
    }

    pub(crate) fn from_parts(store: LabeledStore, k: usize) -> Self {
        Self { store, k }
    }

    /// Store indices of the `min(k, len)` nearest entries, closest first.
    /// Equal distances favor the older entry (earlier frame, then earlier insert).
    pub fn neighbors(&self, x: &FeatureVector) -> Result<Vec<usize>> {
        let n = self.store.len();
        if n == 0 {
            return Err(Error::EmptyStore);
        }
        let k = self.k.min(n);
        let q = x.as_slice();
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for i in 0..n {
            let bound = if best.len() == k { best[k - 1].0 } else { f64::INFINITY };
            let d = sq_dist_bounded(q, self.store.features(i), bound);
            if d < bound {
                // insert after every entry with distance <= d to keep older-first ties
                let pos = best.partition_point(|&(bd, _)| bd <= d);
                best.insert(pos, (d, i));
                best.truncate(k);
            }
        }
        Ok(best.into_iter().map(|(_, i)| i).collect())
    }

    /// Fraction of positive labels among the nearest `min(k, len)` entries.
    pub fn score(&self, x: &FeatureVector) -> Result<f64> {
        let nn = self.neighbors(x)?;
        let positives = nn.iter().filter(|&&i| self.store.label(i).is_positive()).count();
        Ok(positives as f64 / nn.len() as f64)
    }

    /// Inserts `samples` stamped `t`, then drops entries stamped `<= t - window`.
    pub fn update<'a>(&mut self, t: usize, samples: impl IntoIterator<Item = (&'a FeatureVector, Label)>) {
        for (f, label) in samples {
            self.store.push(t, f, label);
        }
        self.store.evict(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec())
    }

    #[test]
    fn empty_store_is_an_error() {
        let m = KnnModel::new(5, 3, 1);
        assert!(matches!(m.score(&fv(&[0.0])), Err(Error::EmptyStore)));
    }

    #[test]
    fn counts_positive_neighbors() {
        let mut m = KnnModel::new(5, 10, 1);
        let pts: Vec<(FeatureVector, Label)> = (0..10)
            .map(|i| (fv(&[i as f64]), if i < 3 { Label::Positive } else { Label::Negative }))
            .collect();
        m.update(1, pts.iter().map(|(f, l)| (f, *l)));
        assert_eq!(m.score(&fv(&[0.0])).unwrap(), 0.6);
        assert_eq!(m.score(&fv(&[100.0])).unwrap(), 0.0);
    }

    #[test]
    fn all_positive_and_all_negative() {
        let mut m = KnnModel::new(5, 10, 1);
        let pos = fv(&[1.0]);
        m.update(1, [(&pos, Label::Positive), (&pos, Label::Positive)]);
        assert_eq!(m.score(&fv(&[0.0])).unwrap(), 1.0);
        let mut m = KnnModel::new(5, 10, 1);
        m.update(1, [(&pos, Label::Negative)]);
        assert_eq!(m.score(&fv(&[0.0])).unwrap(), 0.0);
    }

    #[test]
    fn ties_prefer_older_entries() {
        let mut m = KnnModel::new(1, 10, 1);
        let a = fv(&[1.0]);
        let b = fv(&[-1.0]);
        m.update(1, [(&a, Label::Negative)]);
        m.update(2, [(&b, Label::Positive)]);
        assert_eq!(m.neighbors(&fv(&[0.0])).unwrap(), vec![0]);
        assert_eq!(m.score(&fv(&[0.0])).unwrap(), 0.0);
    }

    #[test]
    fn sliding_window_and_duplicates() {
        let mut m = KnnModel::new(3, 5, 1);
        for t in 1..=6 {
            let f = fv(&[t as f64]);
            m.update(t, [(&f, Label::Positive)]);
        }
        let f = fv(&[7.0]);
        m.update(7, [(&f, Label::Positive), (&f, Label::Positive)]);
        assert_eq!(m.store().stamps(), &[3, 4, 5, 6, 7, 7]);
        m.update(8, std::iter::empty());
        assert_eq!(m.store().stamps(), &[4, 5, 6, 7, 7]);
    }

    proptest! {
        #[test]
        fn score_is_multiple_of_one_over_k(
            pts in prop::collection::vec((prop::collection::vec(-5.0..5.0f64, 70), any::<bool>()), 1..40),
            q in prop::collection::vec(-5.0..5.0f64, 70),
            k in 1usize..8,
        ) {
            let mut m = KnnModel::new(k, 3, 70);
            let owned: Vec<(FeatureVector, Label)> = pts
                .into_iter()
                .map(|(v, p)| (FeatureVector::new(v), if p { Label::Positive } else { Label::Negative }))
                .collect();
            m.update(1, owned.iter().map(|(f, l)| (f, *l)));
            let s = m.score(&FeatureVector::new(q.clone())).unwrap();
            let kk = k.min(owned.len()) as f64;
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!(((s * kk) - (s * kk).round()).abs() < 1e-12);

            // brute force neighbor oracle
            let mut all: Vec<(f64, usize)> = owned
                .iter()
                .enumerate()
                .map(|(i, (f, _))| (f.as_slice().iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let want: Vec<usize> = all.iter().take(k.min(owned.len())).map(|p| p.1).collect();
            let got = m.neighbors(&FeatureVector::new(q)).unwrap();
            // distances may differ in the last ulp between summation orders;
            // compare the neighbor distance multiset instead of raw indices
            let dist = |i: usize| all.iter().find(|p| p.1 == i).unwrap().0;
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((dist(*g) - dist(*w)).abs() < 1e-9);
            }
        }
    }
}
