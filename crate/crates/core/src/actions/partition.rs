use num_complex::Complex64;

use super::{ActionError, Observable};
use crate::sum::ComplexSum;

/// A partition of `0..size` into cells, stored as a cell label per point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    cells: usize,
}

impl Partition {
    /// Any labelling; labels are renumbered in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self {
            labels,
            cells: map.len(),
        }
    }

    /// Cells must be disjoint and cover `0..size`.
    pub fn from_cells(size: usize, cells: &[Vec<usize>]) -> Result<Self, ActionError> {
        let mut labels = vec![usize::MAX; size];
        for (i, c) in cells.iter().enumerate() {
            for &x in c {
                if x >= size || labels[x] != usize::MAX {
                    return Err(ActionError::InvalidPartition(format!(
                        "point {x} is out of range or repeated"
                    )));
                }
                labels[x] = i;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(ActionError::InvalidPartition(format!("point {x} is not covered")));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn singletons(size: usize) -> Self {
        Self {
            labels: (0..size).collect(),
            cells: size,
        }
    }

    pub fn trivial(size: usize) -> Self {
        Self {
            labels: vec![0; size],
            cells: usize::from(size > 0),
        }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// `E(F | P)`: the average of `F` over the cell of each point.
pub fn conditional_expectation(f: &Observable, p: &Partition) -> Result<Observable, ActionError> {
    let v = f
        .as_vector()
        .ok_or(ActionError::Unsupported("conditional expectation of a Fourier sum"))?;
    if v.len() != p.size() {
        return Err(ActionError::InvalidPartition(format!(
            "partition has {} points, observable {}",
            p.size(),
            v.len()
        )));
    }
    let mut sums = vec![ComplexSum::new(); p.cells];
    let mut counts = vec![0usize; p.cells];
    for (x, &l) in p.labels.iter().enumerate() {
        sums[l].add(v[x]);
        counts[l] += 1;
    }
    let means: Vec<Complex64> = sums.iter().zip(&counts).map(|(s, &c)| s.value() / c as f64).collect();
    Ok(Observable::Vector(p.labels.iter().map(|&l| means[l]).collect()))
}
