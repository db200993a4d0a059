use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use super::permutation::{Permutation, MAX_DEGREE};
use crate::error::{Error, Result};

/// Element table of `S_n` generated breadth-first from the adjacent
/// transpositions.
///
/// Element 0 is the identity; every other element `g` is recorded as
/// `s_k ∘ parent(g)`, which lets any homomorphism be evaluated on the whole
/// group with one generator multiplication per element.
#[derive(Debug)]
pub struct SymmetricGroup {
    degree: usize,
    elements: Vec<Permutation>,
    parents: Vec<Option<(usize, usize)>>,
    index: HashMap<Permutation, usize>,
}

impl SymmetricGroup {
    /// Shared table for degree `n` (built once per process).
    pub fn get(n: usize) -> Result<Arc<SymmetricGroup>> {
        static TABLES: OnceLock<Vec<OnceLock<Arc<SymmetricGroup>>>> = OnceLock::new();
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(n));
        }
        let tables = TABLES.get_or_init(|| (0..=MAX_DEGREE).map(|_| OnceLock::new()).collect());
        Ok(tables[n].get_or_init(|| Arc::new(SymmetricGroup::build(n))).clone())
    }

    fn build(n: usize) -> SymmetricGroup {
        let gens: Vec<Permutation> = (1..n).map(|k| Permutation::adjacent(n, k)).collect();
        let id = Permutation::identity(n);
        let mut elements = vec![id.clone()];
        let mut parents = vec![None];
        let mut index = HashMap::new();
        index.insert(id, 0);
        let mut head = 0;
        while head < elements.len() {
            for (k, s) in gens.iter().enumerate() {
                let g = s.compose(&elements[head]).expect("same degree");
                if !index.contains_key(&g) {
                    index.insert(g.clone(), elements.len());
                    elements.push(g);
                    parents.push(Some((head, k)));
                }
            }
            head += 1;
        }
        SymmetricGroup {
            degree: n,
            elements,
            parents,
            index,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// `(parent index, 0-based generator index)`; `None` for the identity.
    pub fn parent(&self, g: usize) -> Option<(usize, usize)> {
        self.parents[g]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Word in 0-based generator indices, leftmost factor first:
    /// `g = s_{w[0]} ∘ s_{w[1]} ∘ ...`.
    pub fn word(&self, p: &Permutation) -> Result<Vec<usize>> {
        let mut g = self.index_of(p).ok_or(Error::DegreeMismatch {
            left: self.degree,
            right: p.degree(),
        })?;
        let mut word = Vec::new();
        while let Some((parent, k)) = self.parents[g] {
            word.push(k);
            g = parent;
        }
        Ok(word)
    }

    /// Evaluates a homomorphism given by its generator images on every
    /// element. `mul(s, x)` must return the image of `s_k ∘ h` from the
    /// generator image `s` and the image `x` of `h`.
    pub fn propagate<G, T, F>(&self, identity: T, generators: &[G], mut mul: F) -> Vec<T>
    where
        F: FnMut(&G, &T) -> T,
    {
        let mut out: Vec<T> = Vec::with_capacity(self.order());
        out.push(identity);
        for g in 1..self.order() {
            let (parent, k) = self.parents[g].expect("non-identity element has a parent");
            let value = mul(&generators[k], &out[parent]);
            out.push(value);
        }
        out
    }
}
