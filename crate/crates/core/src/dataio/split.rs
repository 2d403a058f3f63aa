//! Stratified k-fold splitting.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Split window indices into `k` stratified folds and return
/// `(train, test)` index pairs, one per fold.
///
/// Folds are disjoint, cover every index, and keep per-activity proportions
/// within one window of the global proportions. Deterministic for a given
/// seed.
pub fn kfold_split(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::parameter("dataio", format!("k-fold needs k >= 2, got {k}")));
    }
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, w) in ds.windows.iter().enumerate() {
        by_class.entry(w.activity_label.as_str()).or_default().push(i);
    }
    for (class, members) in &by_class {
        if members.len() < k {
            return Err(Error::Stratification {
                class: class.to_string(),
                count: members.len(),
                k,
            });
        }
    }

    let mut rng = rng::stream(seed, "kfold");
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for members in by_class.values() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        for (pos, idx) in shuffled.into_iter().enumerate() {
            folds[pos % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }

    Ok((0..k)
        .map(|f| {
            let test = folds[f].clone();
            let mut train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != f)
                .flat_map(|(_, v)| v.iter().copied())
                .collect();
            train.sort_unstable();
            (train, test)
        })
        .collect())
}
