//! Prefix–suffix sign matrices, low-rank realizations and spectral
//! certificates.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automata::{member, Automaton, CutpointSpec, Moqfa, Pfa, Word};
use crate::error::{Error, Result};
use crate::opcore::{singular_values, RealMatrix};
use crate::scalar::Scalar;
use crate::tolerance::{TAU_EQ, TAU_RANK};

/// Largest `d` accepted by [`complete_shattering`].
pub const MAX_SHATTERING_DIM: usize = 20;
const EPSILON_FLOOR: f64 = 1e-12;
const EPSILON_NO_GAP: f64 = 1e-6;

/// A `±1` matrix with row and column labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    signs: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct SignMatrixDoc {
    rows: Vec<String>,
    cols: Vec<String>,
    signs: Vec<Vec<i8>>,
}

impl SignMatrix {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, signs: Vec<Vec<i8>>) -> Result<Self> {
        if signs.len() != row_labels.len() {
            return Err(Error::dims(row_labels.len(), signs.len()));
        }
        let mut flat = Vec::with_capacity(row_labels.len() * col_labels.len());
        for row in signs {
            if row.len() != col_labels.len() {
                return Err(Error::dims(col_labels.len(), row.len()));
            }
            if let Some(bad) = row.iter().find(|s| **s != 1 && **s != -1) {
                return Err(Error::Format(format!("sign entry {bad} is not ±1")));
            }
            flat.extend(row);
        }
        Ok(Self {
            row_labels,
            col_labels,
            signs: flat,
        })
    }

    /// Unlabelled matrix; labels are the 0-based indices.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i8) -> Self {
        let mut signs = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                signs.push(if f(i, j) > 0 { 1 } else { -1 });
            }
        }
        Self {
            row_labels: (0..rows).map(|i| i.to_string()).collect(),
            col_labels: (0..cols).map(|j| j.to_string()).collect(),
            signs,
        }
    }

    pub fn with_labels(mut self, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        if row_labels.len() != self.rows() || col_labels.len() != self.cols() {
            return Err(Error::dims(
                format!("{}x{} labels", self.rows(), self.cols()),
                format!("{}x{}", row_labels.len(), col_labels.len()),
            ));
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.signs[i * self.cols() + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        let c = self.cols();
        &self.signs[i * c..(i + 1) * c]
    }

    /// Entrywise comparison ignoring labels.
    pub fn same_signs(&self, other: &SignMatrix) -> bool {
        self.rows() == other.rows() && self.cols() == other.cols() && self.signs == other.signs
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j) as f64)
    }

    pub fn transpose(&self) -> SignMatrix {
        SignMatrix {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            signs: (0..self.cols())
                .flat_map(|j| (0..self.rows()).map(move |i| (i, j)))
                .map(|(i, j)| self.get(i, j))
                .collect(),
        }
    }

    /// The submatrix on the given row and column indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<SignMatrix> {
        if rows.iter().any(|&i| i >= self.rows()) || cols.iter().any(|&j| j >= self.cols()) {
            return Err(Error::InvalidParameter("submatrix index out of range".into()));
        }
        Ok(SignMatrix {
            row_labels: rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: cols.iter().map(|&j| self.col_labels[j].clone()).collect(),
            signs: rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
                .map(|(i, j)| self.get(i, j))
                .collect(),
        })
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self.doc()).expect("sign matrix serializes")
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let doc: SignMatrixDoc = serde_json::from_value(value.clone())?;
        Self::new(doc.rows, doc.cols, doc.signs)
    }

    fn doc(&self) -> SignMatrixDoc {
        SignMatrixDoc {
            rows: self.row_labels.clone(),
            cols: self.col_labels.clone(),
            signs: (0..self.rows()).map(|i| self.row(i).to_vec()).collect(),
        }
    }

    /// Header row of column labels, then one line per row: label and `+1`/`-1`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once(String::new()).chain(self.col_labels.iter().cloned());
        w.write_record(header).map_err(|e| Error::Format(e.to_string()))?;
        for i in 0..self.rows() {
            let rec = std::iter::once(self.row_labels[i].clone())
                .chain(self.row(i).iter().map(|s| if *s > 0 { "+1".into() } else { "-1".into() }));
            w.write_record(rec).map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

/// `η` for column `j` of `C_d`: the bits of `2^d − 1 − j`, index 0 as the
/// most significant bit, bit 1 read as `+1`.
pub fn shattering_column(d: usize, j: u64) -> Vec<i8> {
    let code = ((1u64 << d) - 1) - j;
    (0..d)
        .map(|i| if (code >> (d - 1 - i)) & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// `+`/`-` string of a sign vector.
pub fn sign_pattern(eta: &[i8]) -> String {
    eta.iter().map(|s| if *s > 0 { '+' } else { '-' }).collect()
}

/// The `d × 2^d` matrix whose columns run through every sign vector.
pub fn complete_shattering(d: usize) -> Result<SignMatrix> {
    if d == 0 || d > MAX_SHATTERING_DIM {
        return Err(Error::InvalidParameter(format!(
            "complete shattering dimension must be in 1..={MAX_SHATTERING_DIM}, got {d}"
        )));
    }
    let cols = 1usize << d;
    let columns: Vec<Vec<i8>> = (0..cols as u64).map(|j| shattering_column(d, j)).collect();
    Ok(SignMatrix {
        row_labels: (1..=d).map(|i| i.to_string()).collect(),
        col_labels: columns.iter().map(|c| sign_pattern(c)).collect(),
        signs: (0..d).flat_map(|i| columns.iter().map(move |c| c[i])).collect(),
    })
}

/// Sylvester–Hadamard matrix of order `L` (a power of two).
pub fn sylvester_hadamard(l: usize) -> Result<SignMatrix> {
    if l == 0 || !l.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("Hadamard order {l} is not a power of two")));
    }
    Ok(SignMatrix::from_fn(l, l, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }))
}

/// Uniformly random `±1` matrix.
pub fn random_sign_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> SignMatrix {
    SignMatrix::from_fn(rows, cols, |_, _| if rng.random::<bool>() { 1 } else { -1 })
}

/// `f(xy)` for every prefix `x` and suffix `y` (symbol indices).
pub fn evaluation_grid<A: Automaton + ?Sized>(automaton: &A, prefixes: &[Vec<usize>], suffixes: &[Vec<usize>]) -> RealMatrix {
    let cols = suffixes.len();
    let values: Vec<f64> = (0..prefixes.len() * cols)
        .into_par_iter()
        .map(|k| {
            let mut w = prefixes[k / cols].clone();
            w.extend_from_slice(&suffixes[k % cols]);
            automaton.acceptance_indices(&w)
        })
        .collect();
    RealMatrix::new(prefixes.len(), cols, values).expect("grid shape")
}

fn resolve_all<A: Automaton + ?Sized>(automaton: &A, words: &[Word]) -> Result<Vec<Vec<usize>>> {
    words.iter().map(|w| automaton.alphabet().resolve(w)).collect()
}

fn labels(words: &[Word]) -> Vec<String> {
    words.iter().map(Word::to_string).collect()
}

/// Entry `(x, y)` is the strict-cutpoint sign of `f(xy)`. Entries within the
/// equality tolerance are logged and take `−1`.
pub fn sign_matrix<A: Automaton + ?Sized>(automaton: &A, lambda: f64, prefixes: &[Word], suffixes: &[Word]) -> Result<SignMatrix> {
    let grid = evaluation_grid(
        automaton,
        &resolve_all(automaton, prefixes)?,
        &resolve_all(automaton, suffixes)?,
    );
    let spec = CutpointSpec::new(lambda);
    let mut ambiguous = 0usize;
    let signs = SignMatrix::from_fn(grid.rows(), grid.cols(), |i, j| {
        let m = member(grid[(i, j)], &spec);
        ambiguous += m.ambiguous as usize;
        m.sign
    });
    if ambiguous > 0 {
        log::warn!("{ambiguous} sign-matrix entries lie within {TAU_EQ:e} of the cutpoint");
    }
    signs.with_labels(labels(prefixes), labels(suffixes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizationSource {
    Pfa,
    Quantum,
    Direct,
}

/// A real matrix whose entrywise signs are meant to match a sign matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationMatrix {
    pub matrix: RealMatrix,
    pub claimed_rank_bound: usize,
    pub source: RealizationSource,
    /// The shift `ε` placed between the cutpoint and the smallest positive gap.
    pub epsilon: f64,
}

impl RealizationMatrix {
    pub fn direct(matrix: RealMatrix) -> Self {
        let bound = matrix.rows().min(matrix.cols());
        Self {
            matrix,
            claimed_rank_bound: bound,
            source: RealizationSource::Direct,
            epsilon: 0.0,
        }
    }

    /// `S_{xy}·R_{xy} > tol` for every entry.
    pub fn sign_consistent(&self, signs: &SignMatrix, tol: f64) -> bool {
        self.matrix.shape() == (signs.rows(), signs.cols())
            && (0..signs.rows()).all(|i| (0..signs.cols()).all(|j| signs.get(i, j) as f64 * self.matrix[(i, j)] > tol))
    }

    pub fn rank(&self) -> RankReport {
        rank_report(&self.matrix, TAU_RANK)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source,
            "claimed_rank_bound": self.claimed_rank_bound,
            "epsilon": self.epsilon,
            "matrix": self.matrix.to_rows(),
        })
    }
}

/// Half the smallest positive gap `f − μ` on the grid, floored; a fixed small
/// value when no entry lies above the cutpoint.
fn realization_epsilon(values: &[f64], mu: f64) -> f64 {
    let min_gap = values
        .iter()
        .map(|v| v - mu)
        .filter(|g| *g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if min_gap.is_finite() {
        (min_gap / 2.0).max(EPSILON_FLOOR)
    } else {
        EPSILON_NO_GAP
    }
}

/// `R_{xy} = a_x·b_y − (μ + ε)` with `a_x = πP_x` and `b_y = P_y P_# 1_F`,
/// a rank-`m` factorization shifted by a constant.
pub fn pfa_realization<T: Scalar>(pfa: &Pfa<T>, mu: f64, prefixes: &[Word], suffixes: &[Word]) -> Result<RealizationMatrix> {
    let pfa = pfa.to_float();
    let a: Vec<Vec<f64>> = resolve_all(&pfa, prefixes)?
        .iter()
        .map(|x| pfa.distribution_after(x))
        .collect();
    let b: Vec<Vec<f64>> = resolve_all(&pfa, suffixes)?
        .par_iter()
        .map(|y| pfa.suffix_acceptance(y))
        .collect();
    let values = RealMatrix::from_fn(a.len(), b.len(), |i, j| a[i].iter().zip(&b[j]).map(|(u, v)| u * v).sum());
    let epsilon = realization_epsilon(values.as_slice(), mu);
    Ok(RealizationMatrix {
        matrix: values.map(|v| v - (mu + epsilon)),
        claimed_rank_bound: pfa.states(),
        source: RealizationSource::Pfa,
        epsilon,
    })
}

/// `R_{xy} = f_Q(xy) − (λ + ε)`; the values factor through `ℝ^{n²}`.
pub fn quantum_realization(q: &Moqfa, lambda: f64, prefixes: &[Word], suffixes: &[Word]) -> Result<RealizationMatrix> {
    let values = evaluation_grid(q, &resolve_all(q, prefixes)?, &resolve_all(q, suffixes)?);
    let epsilon = realization_epsilon(values.as_slice(), lambda);
    Ok(RealizationMatrix {
        matrix: values.map(|v| v - (lambda + epsilon)),
        claimed_rank_bound: q.dim() * q.dim(),
        source: RealizationSource::Quantum,
        epsilon,
    })
}

/// Numerical rank together with the spectrum it was read from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub rel_tol: f64,
    pub singular_values: Vec<f64>,
    /// `log₂` of the rank, the bit cost of a rank-based protocol.
    pub log2_rank: f64,
}

pub fn rank_report(m: &RealMatrix, rel_tol: f64) -> RankReport {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 {
        0
    } else {
        sv.iter().filter(|s| **s > rel_tol * top).count()
    };
    RankReport {
        rank,
        rel_tol,
        singular_values: sv,
        log2_rank: if rank == 0 { 0.0 } else { (rank as f64).log2() },
    }
}

/// Number of singular values above `rel_tol·σ_max`.
pub fn numerical_rank(m: &RealMatrix, rel_tol: f64) -> usize {
    rank_report(m, rel_tol).rank
}

pub fn spectral_norm(s: &SignMatrix) -> f64 {
    singular_values(&s.to_real()).first().copied().unwrap_or(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForsterReport {
    pub size: usize,
    pub spectral_norm: f64,
    /// `L / ‖S‖₂`, a lower bound on the sign-rank.
    pub bound: f64,
    /// `√L`, the largest value the bound can take.
    pub cap: f64,
}

/// Spectral lower bound for square sign matrices.
pub fn forster_bound(s: &SignMatrix) -> Result<ForsterReport> {
    if !s.is_square() || s.rows() == 0 {
        return Err(Error::InvalidParameter(format!(
            "the spectral bound is defined for square L×L sign matrices, got {}×{}; \
             extract a square submatrix first",
            s.rows(),
            s.cols()
        )));
    }
    let l = s.rows() as f64;
    let norm = spectral_norm(s);
    Ok(ForsterReport {
        size: s.rows(),
        spectral_norm: norm,
        bound: l / norm,
        cap: l.sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthantCertificate {
    pub d: usize,
    /// Every column lies strictly inside the orthant named by its sign vector.
    pub all_orthants: bool,
    pub first_violation: Option<usize>,
    pub rank: usize,
    pub holds: bool,
}

/// Checks that the columns of `r` (a `d × 2^d` realization of `C_d`) meet
/// every open orthant and that `r` has numerical rank `d`.
pub fn orthant_certificate(r: &RealMatrix) -> Result<OrthantCertificate> {
    let d = r.rows();
    if d == 0 || d > MAX_SHATTERING_DIM || r.cols() != 1usize << d {
        return Err(Error::dims(
            format!("d×2^d with d = {d}"),
            format!("{}×{}", r.rows(), r.cols()),
        ));
    }
    let first_violation = (0..r.cols()).find(|&j| {
        let eta = shattering_column(d, j as u64);
        (0..d).any(|i| eta[i] as f64 * r[(i, j)] <= 0.0)
    });
    let rank = numerical_rank(r, TAU_RANK);
    let all_orthants = first_violation.is_none();
    Ok(OrthantCertificate {
        d,
        all_orthants,
        first_violation,
        rank,
        holds: all_orthants && rank == d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Alphabet, Gfa};
    use crate::stochasticize::gfa_to_pfa;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_shattering_matrices() {
        let c1 = complete_shattering(1).unwrap();
        assert_eq!(c1.row(0), &[1, -1]);
        let c2 = complete_shattering(2).unwrap();
        assert_eq!(c2.col_labels(), &["++", "+-", "-+", "--"]);
        assert!(complete_shattering(0).is_err());
        assert!(complete_shattering(21).is_err());
    }

    #[test]
    fn shattering_rows_are_orthogonal() {
        let c = complete_shattering(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let ip: i32 = c.row(i).iter().zip(c.row(j)).map(|(a, b)| (*a as i32) * (*b as i32)).sum();
                assert_eq!(ip, if i == j { 8 } else { 0 });
            }
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(numerical_rank(&RealMatrix::identity(5), TAU_RANK), 5);
        let outer = RealMatrix::from_fn(4, 6, |i, j| (i as f64 + 1.0) * (j as f64 - 2.5));
        assert_eq!(numerical_rank(&outer, TAU_RANK), 1);
        for d in 1..=6 {
            assert_eq!(numerical_rank(&complete_shattering(d).unwrap().to_real(), TAU_RANK), d);
        }
        assert_eq!(numerical_rank(&RealMatrix::zeros(3, 3), TAU_RANK), 0);
    }

    #[test]
    fn spectral_norms() {
        for d in 1..=8 {
            let n = spectral_norm(&complete_shattering(d).unwrap());
            assert!((n - 2f64.powf(d as f64 / 2.0)).abs() < 1e-9 * n);
        }
        let ones = SignMatrix::from_fn(5, 5, |_, _| 1);
        assert!((spectral_norm(&ones) - 5.0).abs() < 1e-12);
        assert!((forster_bound(&ones).unwrap().bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_meets_the_cap() {
        for l in [2, 4, 8, 16] {
            let r = forster_bound(&sylvester_hadamard(l).unwrap()).unwrap();
            assert!((r.bound - r.cap).abs() < 1e-9);
        }
        assert!(sylvester_hadamard(6).is_err());
    }

    #[test]
    fn forster_rejects_rectangular() {
        assert!(forster_bound(&complete_shattering(2).unwrap()).is_err());
    }

    #[test]
    fn random_16_within_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let b = forster_bound(&random_sign_matrix(16, 16, &mut rng)).unwrap().bound;
            assert!((1.0 - 1e-12..=4.0 + 1e-12).contains(&b));
        }
    }

    #[test]
    fn orthant_checks() {
        let c = complete_shattering(4).unwrap().to_real();
        let cert = orthant_certificate(&c).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.rank, 4);
        let mut broken = c.clone();
        for i in 0..4 {
            broken[(i, 5)] = 0.0;
        }
        let cert = orthant_certificate(&broken).unwrap();
        assert!(!cert.holds);
        assert_eq!(cert.first_violation, Some(5));
        assert!(orthant_certificate(&RealMatrix::zeros(3, 7)).is_err());
    }

    #[test]
    fn json_and_csv() {
        let c = complete_shattering(2).unwrap();
        let back = SignMatrix::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let csv = c.to_csv().unwrap();
        assert_eq!(csv.lines().next().unwrap(), ",++,+-,-+,--");
        assert_eq!(csv.lines().nth(1).unwrap(), "1,+1,+1,-1,-1");
        let bad = json!({"rows": ["a"], "cols": ["b"], "signs": [[0]]});
        assert!(SignMatrix::from_json(&bad).is_err());
    }

    #[test]
    fn doubling_pfa_realization() {
        let g = Gfa::new(
            Alphabet::new(["a"]).unwrap(),
            vec![1.0],
            vec![RealMatrix::from_rows(vec![vec![2.0]]).unwrap()],
            vec![1.0],
        )
        .unwrap();
        let (p, _) = gfa_to_pfa(&g, &3.0).unwrap();
        let words: Vec<Word> = (0..4).map(|n| Word::new(vec!["a"; n])).collect();
        let signs = sign_matrix(&g, 3.0, &words, &words).unwrap();
        let r = pfa_realization(&p, 0.5, &words, &words).unwrap();
        assert!(r.sign_consistent(&signs, 0.0));
        assert!(r.rank().rank <= 8);
        assert_eq!(r.claimed_rank_bound, 8);
    }

    #[test]
    fn constant_automaton_all_plus() {
        let g = Gfa::new(Alphabet::new(["a"]).unwrap(), vec![1.0], vec![RealMatrix::identity(1)], vec![1.0]).unwrap();
        let words: Vec<Word> = (0..3).map(|n| Word::new(vec!["a"; n])).collect();
        let s = sign_matrix(&g, 0.5, &words, &words).unwrap();
        assert!((0..3).all(|i| s.row(i).iter().all(|x| *x == 1)));
    }
}
