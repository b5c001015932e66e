use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Up,
    Down,
}

/// Dense components of a tensor at one point, row-major over its slots.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    pub dim: usize,
    pub valence: Vec<Slot>,
    pub data: Vec<f64>,
}

impl TensorValue {
    pub fn zeros(dim: usize, valence: &[Slot]) -> TensorValue {
        TensorValue {
            dim,
            valence: valence.to_vec(),
            data: vec![0.0; dim.pow(valence.len() as u32)],
        }
    }

    pub fn from_fn(dim: usize, valence: &[Slot], f: impl Fn(&[usize]) -> f64) -> TensorValue {
        let mut t = TensorValue::zeros(dim, valence);
        let rank = valence.len();
        let mut idx = vec![0; rank];
        for k in 0..t.data.len() {
            let mut r = k;
            for s in (0..rank).rev() {
                idx[s] = r % dim;
                r /= dim;
            }
            t.data[k] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let k = self.offset(idx);
        self.data[k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &TensorValue) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let t = TensorValue::from_fn(3, &[Slot::Down, Slot::Up], |i| (10 * i[0] + i[1]) as f64);
        assert_eq!(t.get(&[2, 1]), 21.0);
        assert_eq!(t.data[7], 21.0);
        assert_eq!(t.max_abs(), 22.0);
    }
}
