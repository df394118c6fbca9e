//! The blockade subspace and integer matrix representations on it.
//!
//! A basis state is an occupation bitset with bit `k-1` set when site `k` is
//! excited. No two excited sites lie within the blockade range (cyclically on
//! a ring).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use rustc_hash::FxHashMap;

use crate::algebra::{Letter, ModelSpec, Topology, Word};
use crate::error::Error;
use crate::series::ObservableSpec;

/// Largest lattice a `u64` bitset can hold.
pub const MAX_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(pub u64);

impl BasisState {
    pub fn is_excited(self, site: i64) -> bool {
        self.0 >> (site - 1) & 1 == 1
    }

    pub fn excitations(self) -> u32 {
        self.0.count_ones()
    }

    /// Occupation string, site 1 first, e.g. `1010`.
    pub fn render(self, sites: usize) -> String {
        (1..=sites as i64).map(|k| if self.is_excited(k) { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone)]
pub struct BlockadeBasis {
    model: ModelSpec,
    sites: usize,
    states: Vec<BasisState>,
    index: FxHashMap<u64, usize>,
    /// Per-site mask of the blockade neighbourhood.
    neighbor_masks: Vec<u64>,
}

fn neighbor_masks(model: &ModelSpec) -> Vec<u64> {
    model
        .site_range()
        .expect("finite lattice")
        .map(|k| model.neighborhood(k).iter().fold(0u64, |m, &j| m | 1 << (j - 1)))
        .collect()
}

/// Open chain at unit range in recursion order: the states of `L-1` sites
/// with site `L` empty, then those of `L-2` sites with only site `L` excited.
fn recursion_states(sites: usize) -> Vec<u64> {
    let mut prev: Vec<u64> = vec![0];
    let mut cur: Vec<u64> = vec![0, 1];
    for l in 2..=sites {
        let mut next = cur.clone();
        next.extend(prev.iter().map(|s| s | 1 << (l - 1)));
        prev = cur;
        cur = next;
    }
    if sites == 0 {
        prev
    } else {
        cur
    }
}

fn enumerate_states(sites: usize, masks: &[u64]) -> Vec<u64> {
    fn go(site: usize, sites: usize, masks: &[u64], acc: u64, out: &mut Vec<u64>) {
        if site == sites {
            out.push(acc);
            return;
        }
        go(site + 1, sites, masks, acc, out);
        if acc & masks[site] == 0 {
            go(site + 1, sites, masks, acc | 1 << site, out);
        }
    }
    let mut out = Vec::new();
    go(0, sites, masks, 0, &mut out);
    out.sort_unstable();
    out
}

impl BlockadeBasis {
    /// Open chains at unit range use the recursion order; every other lattice
    /// lists admissible bitsets in increasing integer order. The vacuum is
    /// always first.
    pub fn new(model: &ModelSpec) -> Result<Self, Error> {
        let sites = match model.topology() {
            Topology::InfiniteLine => {
                return Err(Error::InvalidModel("the infinite line has no finite basis".into()))
            }
            Topology::Ring(l) if model.blockade_range() >= l => {
                return Err(Error::InvalidModel(format!(
                    "blockade range {} on a ring of {l} sites leaves only trivial states",
                    model.blockade_range()
                )))
            }
            Topology::Ring(l) | Topology::Line(l) => l,
        };
        if sites > MAX_SITES {
            return Err(Error::InvalidModel(format!("at most {MAX_SITES} sites are supported, got {sites}")));
        }
        let masks = neighbor_masks(model);
        let raw = if matches!(model.topology(), Topology::Line(_)) && model.blockade_range() == 1 {
            recursion_states(sites)
        } else {
            enumerate_states(sites, &masks)
        };
        let index = raw.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(BlockadeBasis {
            model: *model,
            sites,
            states: raw.into_iter().map(BasisState).collect(),
            index,
            neighbor_masks: masks,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn position(&self, state: BasisState) -> Option<usize> {
        self.index.get(&state.0).copied()
    }

    fn check(&self, model: &ModelSpec) -> Result<(), Error> {
        if *model != self.model {
            return Err(Error::BasisMismatch(format!("basis built for {}, matrix requested for {model}", self.model)));
        }
        Ok(())
    }
}

/// Dimension of the unit-range open chain by the two-term recursion,
/// `d(0) = 1`, `d(1) = 2`.
pub fn fibonacci_dimension(sites: usize) -> u128 {
    let (mut a, mut b) = (1u128, 2u128);
    for _ in 0..sites {
        (a, b) = (b, a + b);
    }
    a
}

/// Square integer matrix in coordinate form, entries sorted by `(row, col)`
/// with no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    dim: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMatrix {
    /// Sums duplicate coordinates and drops zeros.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            *acc.entry((r, c)).or_insert(0) += v;
        }
        let entries = acc.into_iter().filter(|&(_, v)| v != 0).map(|((r, c), v)| (r, c, v)).collect();
        SparseIntMatrix { dim, entries }
    }

    pub fn diagonal(values: &[i64]) -> Self {
        SparseIntMatrix::from_triplets(values.len(), values.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries
            .binary_search_by(|&(r, c, _)| (r, c).cmp(&(row, col)))
            .map_or(0, |i| self.entries[i].2)
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        SparseIntMatrix::from_triplets(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v)))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|&(r, c, _)| r == c)
    }

    pub fn diagonal_values(&self) -> Vec<i64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn add(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.dim, other.dim);
        SparseIntMatrix::from_triplets(self.dim, self.entries.iter().chain(&other.entries).copied())
    }

    pub fn matmul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.dim, other.dim);
        let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.dim];
        for &(r, c, v) in &other.entries {
            rows[r].push((c, v));
        }
        let triplets = self
            .entries
            .iter()
            .flat_map(|&(r, k, a)| rows[k].iter().map(move |&(c, b)| (r, c, a * b)));
        SparseIntMatrix::from_triplets(self.dim, triplets)
    }

    /// Exact `M · v` over big integers.
    pub fn matvec_bigint(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![BigInt::zero(); self.dim];
        for &(r, c, a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += &v[c] * a;
            }
        }
        out
    }

    /// `M · v` in floating point, summing in entry order.
    pub fn matvec_f64(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(r, c, a) in &self.entries {
            out[r] += a as f64 * v[c];
        }
        out
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::<f64>::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v as f64;
        }
        m
    }

    /// `row col value` per line, 1-based, sorted.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for &(r, c, v) in &self.entries {
            let _ = writeln!(out, "{} {} {v}", r + 1, c + 1);
        }
        out
    }

    /// Inverse of [`SparseIntMatrix::to_coordinate_text`].
    pub fn from_coordinate_text(dim: usize, text: &str) -> Result<Self, Error> {
        let mut triplets = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| Error::Parse { line: lineno + 1, message: message.to_string() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err("expected `row col value`"));
            }
            let r: usize = fields[0].parse().map_err(|_| err("bad row"))?;
            let c: usize = fields[1].parse().map_err(|_| err("bad column"))?;
            let v: i64 = fields[2].parse().map_err(|_| err("bad value"))?;
            if r == 0 || c == 0 || r > dim || c > dim {
                return Err(err("coordinate outside the matrix"));
            }
            triplets.push((r - 1, c - 1, v));
        }
        Ok(SparseIntMatrix::from_triplets(dim, triplets))
    }
}

/// The Hamiltonian by the bit-flip rule: site `k` flips iff its blockade
/// neighbourhood is empty.
pub fn hamiltonian_matrix(model: &ModelSpec, basis: &BlockadeBasis) -> Result<SparseIntMatrix, Error> {
    basis.check(model)?;
    let mut triplets = Vec::new();
    for (i, s) in basis.states.iter().enumerate() {
        for (k, &mask) in basis.neighbor_masks.iter().enumerate() {
            if s.0 & mask == 0 {
                let j = basis.index[&(s.0 ^ 1 << k)];
                triplets.push((i, j, 1));
            }
        }
    }
    Ok(SparseIntMatrix::from_triplets(basis.dim(), triplets))
}

/// Block recursions for the unit-range open chain,
/// `H(L) = [[H(L-1), K], [Kᵀ, H(L-2)]]` with `K = [I; 0]` and
/// `N(L) = diag(N(L-1), N(L-2) + I)`. Returns `(H, N)`.
pub fn recursion_matrices(sites: usize) -> (SparseIntMatrix, SparseIntMatrix) {
    let h0 = SparseIntMatrix::from_triplets(1, []);
    let n0 = SparseIntMatrix::from_triplets(1, []);
    let h1 = SparseIntMatrix::from_triplets(2, [(0, 1, 1), (1, 0, 1)]);
    let n1 = SparseIntMatrix::diagonal(&[0, 1]);
    if sites == 0 {
        return (h0, n0);
    }
    let (mut hp, mut np, mut hc, mut nc) = (h0, n0, h1, n1);
    for _ in 2..=sites {
        let (d1, d2) = (hc.dim, hp.dim);
        let dim = d1 + d2;
        let h = SparseIntMatrix::from_triplets(
            dim,
            hc.entries
                .iter()
                .copied()
                .chain(hp.entries.iter().map(|&(r, c, v)| (r + d1, c + d1, v)))
                .chain((0..d2).flat_map(|i| [(i, d1 + i, 1), (d1 + i, i, 1)])),
        );
        let n = SparseIntMatrix::from_triplets(
            dim,
            nc.entries
                .iter()
                .copied()
                .chain(np.entries.iter().map(|&(r, c, v)| (r + d1, c + d1, v)))
                .chain((0..d2).map(|i| (d1 + i, d1 + i, 1))),
        );
        (hp, np) = (hc, nc);
        (hc, nc) = (h, n);
    }
    (hc, nc)
}

/// Integer matrix of an observable together with the divisor that turns it
/// into the quantity reported (e.g. `L` for the density per site).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableMatrix {
    pub matrix: SparseIntMatrix,
    pub divisor: usize,
}

/// Matrix of a word restricted to the blockade subspace. Transitions that
/// leave the subspace are dropped.
pub fn word_matrix(model: &ModelSpec, basis: &BlockadeBasis, word: &Word) -> Result<SparseIntMatrix, Error> {
    basis.check(model)?;
    let word = model.normalize_word(word)?;
    let letters: Vec<(i64, Letter)> = word.iter().collect();
    let mut triplets = Vec::new();
    'states: for (col, s) in basis.states.iter().enumerate() {
        let mut out = s.0;
        for &(site, letter) in &letters {
            let bit = 1u64 << (site - 1);
            match letter.act(out & bit != 0) {
                Some(true) => out |= bit,
                Some(false) => out &= !bit,
                None => continue 'states,
            }
        }
        if let Some(&row) = basis.index.get(&out) {
            triplets.push((row, col, 1));
        }
    }
    Ok(SparseIntMatrix::from_triplets(basis.dim(), triplets))
}

/// Density: total excitation number over `L`. Correlations: the sum of
/// `n_k n_{k+d}` over every pair on the lattice (`L` on a ring, `L-d` on a
/// chain) over the pair count. Local numbers and words: divisor 1.
pub fn observable_matrix(
    model: &ModelSpec,
    basis: &BlockadeBasis,
    obs: &ObservableSpec,
) -> Result<ObservableMatrix, Error> {
    basis.check(model)?;
    let l = basis.sites;
    let diag = |f: &dyn Fn(u64) -> i64| SparseIntMatrix::diagonal(&basis.states.iter().map(|s| f(s.0)).collect::<Vec<_>>());
    Ok(match obs {
        ObservableSpec::DensityPerSite => ObservableMatrix { matrix: diag(&|s| s.count_ones() as i64), divisor: l },
        ObservableSpec::LocalNumber(k) => {
            let site = model
                .normalize_site(*k)
                .ok_or_else(|| Error::InvalidObservable(format!("site {k} is not on {model}")))?;
            ObservableMatrix { matrix: diag(&|s| (s >> (site - 1) & 1) as i64), divisor: 1 }
        }
        ObservableSpec::Correlation(d) => {
            let d = *d;
            let pairs: Vec<(usize, usize)> = match model.topology() {
                Topology::Ring(_) => (0..l).map(|k| (k, (k + d) % l)).collect(),
                _ => (0..l.saturating_sub(d)).map(|k| (k, k + d)).collect(),
            };
            if pairs.is_empty() || d == 0 || (matches!(model.topology(), Topology::Ring(_)) && d % l == 0) {
                return Err(Error::InvalidObservable(format!("no site pairs at distance {d} on {model}")));
            }
            let count = |s: u64| pairs.iter().filter(|&&(a, b)| s >> a & 1 == 1 && s >> b & 1 == 1).count() as i64;
            ObservableMatrix { matrix: diag(&count), divisor: pairs.len() }
        }
        ObservableSpec::GeneralWord(w) => ObservableMatrix { matrix: word_matrix(model, basis, w)?, divisor: 1 },
    })
}

/// `(-1)^n` on the basis.
pub fn parity_matrix(basis: &BlockadeBasis) -> SparseIntMatrix {
    SparseIntMatrix::diagonal(&basis.states.iter().map(|s| parity(*s)).collect::<Vec<_>>())
}

pub(crate) fn parity(s: BasisState) -> i64 {
    if s.excitations() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Position of the image of each basis state under the ring shift
/// `k → k+1`. `None` for open chains.
pub fn translation_permutation(basis: &BlockadeBasis) -> Option<Vec<usize>> {
    let Topology::Ring(l) = basis.model.topology() else {
        return None;
    };
    let full = if l == 64 { u64::MAX } else { (1u64 << l) - 1 };
    Some(
        basis
            .states
            .iter()
            .map(|s| {
                let shifted = ((s.0 << 1) | (s.0 >> (l - 1))) & full;
                basis.index[&shifted]
            })
            .collect(),
    )
}
