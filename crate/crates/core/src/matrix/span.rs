use crate::fields::Field;

/// Incrementally built subspace of T^dim with coordinates relative to the accepted vectors.
#[derive(Debug, Clone)]
pub struct Span<T> {
    dim: usize,
    basis: Vec<Vec<T>>,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
    // rows[k] = Σ_j combos[k][j] · basis[j]
    combos: Vec<Vec<T>>,
}

impl<T: Field> Span<T> {
    pub fn new(dim: usize) -> Self {
        Span { dim, basis: Vec::new(), rows: Vec::new(), pivots: Vec::new(), combos: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Accepted vectors, in insertion order.
    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    fn reduce(&self, v: &[T]) -> (Vec<T>, Vec<T>) {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut r = v.to_vec();
        let mut coords = vec![T::zero(); self.basis.len()];
        for (k, row) in self.rows.iter().enumerate() {
            let t = r[self.pivots[k]].clone();
            if t.is_zero() {
                continue;
            }
            for (a, b) in r.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a = a.minus(&t.times(b));
                }
            }
            for (a, b) in coords.iter_mut().zip(&self.combos[k]) {
                if !b.is_zero() {
                    *a = a.plus(&t.times(b));
                }
            }
        }
        (r, coords)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.reduce(v).0.iter().all(|a| a.is_zero())
    }

    /// Coordinates of v in the accepted basis, if v lies in the span.
    pub fn coordinates(&self, v: &[T]) -> Option<Vec<T>> {
        let (r, coords) = self.reduce(v);
        if r.iter().all(|a| a.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    /// Add v if independent; returns whether it was accepted.
    pub fn insert(&mut self, v: &[T]) -> bool {
        let (r, coords) = self.reduce(v);
        let Some(p) = r.iter().position(|a| !a.is_zero()) else {
            return false;
        };
        let inv = r[p].inverse().expect("nonzero pivot");
        let row: Vec<T> = r.iter().map(|a| a.times(&inv)).collect();
        let n = self.basis.len();
        let mut combo: Vec<T> = coords.iter().map(|c| c.negate().times(&inv)).collect();
        combo.push(inv);
        for c in self.combos.iter_mut() {
            c.push(T::zero());
        }
        self.basis.push(v.to_vec());
        self.rows.push(row);
        self.pivots.push(p);
        self.combos.push(combo);
        debug_assert_eq!(self.combos[n].len(), n + 1);
        true
    }

    /// Reduced echelon basis of the span (deterministic, leftmost pivots).
    pub fn echelon_basis(&self) -> Vec<Vec<T>> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&k| self.pivots[k]);
        let mut rows: Vec<Vec<T>> = order.iter().map(|&k| self.rows[k].clone()).collect();
        let pivs: Vec<usize> = order.iter().map(|&k| self.pivots[k]).collect();
        for i in (0..rows.len()).rev() {
            for j in 0..i {
                let t = rows[j][pivs[i]].clone();
                if t.is_zero() {
                    continue;
                }
                let ri = rows[i].clone();
                for (a, b) in rows[j].iter_mut().zip(&ri) {
                    if !b.is_zero() {
                        *a = a.minus(&t.times(b));
                    }
                }
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn v(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| BigRational::from_int(x)).collect()
    }

    #[test]
    fn coordinates_follow_inserted_vectors() {
        let mut s = Span::new(3);
        assert!(s.insert(&v(&[1, 1, 0])));
        assert!(s.insert(&v(&[0, 2, 1])));
        assert!(!s.insert(&v(&[2, 4, 1])));
        assert_eq!(s.coordinates(&v(&[3, 7, 2])), Some(v(&[3, 2])));
        assert_eq!(s.coordinates(&v(&[0, 0, 1])), None);
        let e = s.echelon_basis();
        assert_eq!(e, vec![
            vec![BigRational::from_int(1), BigRational::from_int(0), BigRational::new((-1).into(), 2.into())],
            vec![BigRational::from_int(0), BigRational::from_int(1), BigRational::new(1.into(), 2.into())],
        ]);
    }
}
