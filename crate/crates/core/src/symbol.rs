//! The operator symbol: a matrix of polynomials in k, its characteristic
//! polynomial, the divergence-form operator of the local relation, and the
//! diagonalizing matrix built from left eigenvectors.

use crate::error::{Result, UtmError};
use crate::numeric::I;
use crate::polynomial::PolynomialScalar;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Which of the shipped evolution systems a symbol came from, if any; lets
/// the reference oracles and the CLI dispatch on structure they know.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemKind {
    KleinGordon { alpha: f64 },
    FitzhughNagumo { beta: f64 },
    WaveFamily { a: f64 },
    Custom,
}

/// N x N matrix with polynomial-in-k entries.
#[derive(Debug, Clone)]
pub struct PolynomialMatrix {
    size: usize,
    entries: Vec<Vec<PolynomialScalar>>,
    order: usize,
    kind: SystemKind,
    names: Vec<String>,
}

impl PolynomialMatrix {
    pub fn new(entries: Vec<Vec<PolynomialScalar>>) -> Result<Self> {
        let size = entries.len();
        if size == 0 || entries.iter().any(|row| row.len() != size) {
            return Err(UtmError::InvalidData(
                "symbol matrix must be square and nonempty".into(),
            ));
        }
        let order = entries
            .iter()
            .flatten()
            .map(|p| if p.is_zero() { 0 } else { p.degree() })
            .max()
            .unwrap_or(0);
        if order < 1 {
            return Err(UtmError::InvalidData(
                "symbol matrix must have order at least 1".into(),
            ));
        }
        let names = (1..=size).map(|i| format!("q{i}")).collect();
        Ok(Self {
            size,
            entries,
            order,
            kind: SystemKind::Custom,
            names,
        })
    }

    /// Klein-Gordon as a first-order system in (q, p) = (u, u_t).
    pub fn klein_gordon(alpha: f64) -> Self {
        let z = PolynomialScalar::zero();
        let mut m = Self::new(vec![
            vec![z.clone(), PolynomialScalar::from_real(&[-1.0])],
            vec![PolynomialScalar::from_real(&[alpha, 0.0, 1.0]), z],
        ])
        .expect("valid symbol");
        m.kind = SystemKind::KleinGordon { alpha };
        m.names = vec!["q".into(), "p".into()];
        m
    }

    /// Linearized Fitzhugh-Nagumo in (v, w).
    pub fn fitzhugh_nagumo(beta: f64) -> Self {
        let z = PolynomialScalar::zero();
        let mut m = Self::new(vec![
            vec![
                PolynomialScalar::from_real(&[1.0, 0.0, 1.0]),
                PolynomialScalar::from_real(&[1.0]),
            ],
            vec![PolynomialScalar::from_real(&[-beta]), z],
        ])
        .expect("valid symbol");
        m.kind = SystemKind::FitzhughNagumo { beta };
        m.names = vec!["v".into(), "w".into()];
        m
    }

    /// Wave-like equation u_tt - a u_xt - u_xx = 0 as a system in (u, v) = (u, u_t).
    pub fn wave_family(a: f64) -> Self {
        use num_complex::Complex64 as C;
        let z = PolynomialScalar::zero();
        let mut m = Self::new(vec![
            vec![z.clone(), PolynomialScalar::from_real(&[-1.0])],
            vec![
                PolynomialScalar::from_real(&[0.0, 0.0, 1.0]),
                PolynomialScalar::new(vec![C::new(0.0, 0.0), C::new(0.0, -a)]),
            ],
        ])
        .expect("valid symbol");
        m.kind = SystemKind::WaveFamily { a };
        m.names = vec!["u".into(), "v".into()];
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// Component names, e.g. (q, p) for Klein-Gordon.
    pub fn component_names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, row: usize, col: usize) -> &PolynomialScalar {
        &self.entries[row][col]
    }

    /// Maximal k-degree occurring in the given column.
    pub fn column_degree(&self, col: usize) -> usize {
        (0..self.size)
            .map(|r| {
                let p = &self.entries[r][col];
                if p.is_zero() {
                    0
                } else {
                    p.degree()
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Evaluates the symbol at a point.
    pub fn eval(&self, k: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.size, self.size, |r, c| self.entries[r][c].eval(k))
    }
}

/// Evaluates the symbol matrix at k.
pub fn eval_symbol(m: &PolynomialMatrix, k: Complex64) -> DMatrix<Complex64> {
    m.eval(k)
}

/// Coefficients (ascending in omega, monic) of det(omega I - Lambda(k)),
/// by the Faddeev-LeVerrier recurrence. The roots are the dispersion branches.
pub fn char_poly(m: &PolynomialMatrix, k: Complex64) -> Vec<Complex64> {
    char_poly_of(&m.eval(k))
}

/// Characteristic polynomial coefficients of a numeric matrix, ascending, monic.
pub fn char_poly_of(a: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = DMatrix::<Complex64>::identity(n, n);
    for step in 1..=n {
        let am = a * &mk;
        let c = -am.trace() / Complex64::new(step as f64, 0.0);
        coeffs[n - step] = c;
        mk = am + DMatrix::<Complex64>::identity(n, n) * c;
    }
    coeffs
}

/// The divergence-form operator X(x,t,k) = i (Lambda(k) - Lambda(l))/(k - l)
/// with l = -i d/dx, stored through its divided-difference coefficient grids.
#[derive(Debug, Clone)]
pub struct XOperator {
    size: usize,
    /// d_j grids: i (Lambda(k)-Lambda(l))/(k-l) = sum_j d_j(k) l^j
    dd_coeffs: Vec<Vec<Vec<PolynomialScalar>>>,
}

impl XOperator {
    pub fn degree_in_derivatives(&self) -> usize {
        self.dd_coeffs.len()
    }

    /// Divided difference sum_j d_j(k) l^j as a matrix; identical to
    /// i (Lambda(k) - Lambda(l))/(k - l) entrywise.
    pub fn dd_at(&self, k: Complex64, l: Complex64) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(self.size, self.size, Complex64::new(0.0, 0.0));
        let mut lp = Complex64::new(1.0, 0.0);
        for grid in &self.dd_coeffs {
            for r in 0..self.size {
                for c in 0..self.size {
                    out[(r, c)] += grid[r][c].eval(k) * lp;
                }
            }
            lp *= l;
        }
        out
    }

    /// Coefficient grid c_j(k) of the j-th x-derivative in X = sum_j c_j(k) d^j/dx^j,
    /// i.e. d_j(k) (-i)^j.
    pub fn partial_coeff(&self, j: usize, k: Complex64) -> DMatrix<Complex64> {
        let phase = (-I).powu(j as u32);
        DMatrix::from_fn(self.size, self.size, |r, c| {
            self.dd_coeffs[j][r][c].eval(k) * phase
        })
    }
}

/// Builds the X operator from the symbol, symbolically from the polynomial
/// coefficients (no numerical limits).
pub fn x_operator(m: &PolynomialMatrix) -> XOperator {
    let n = m.order();
    let size = m.size();
    let mut dd_coeffs = Vec::with_capacity(n);
    for j in 0..n {
        let mut grid = Vec::with_capacity(size);
        for r in 0..size {
            let mut row = Vec::with_capacity(size);
            for c in 0..size {
                // entry polynomial a_0 + a_1 k + ... ; d_j = i * sum_{deg > j} a_deg k^{deg-1-j}
                let coeffs = m.entry(r, c).coefficients();
                let mut out = vec![Complex64::new(0.0, 0.0); n.max(1)];
                for (deg, &a) in coeffs.iter().enumerate() {
                    if deg > j {
                        out[deg - 1 - j] += a * I;
                    }
                }
                row.push(PolynomialScalar::new(out));
            }
            grid.push(row);
        }
        dd_coeffs.push(grid);
    }
    XOperator { size, dd_coeffs }
}

/// Left-eigenvector rows for the given eigenvalues: row_j Lambda = omega_j row_j,
/// each row normalized so its largest-magnitude entry is 1.
pub fn left_eigen_rows(
    lambda: &DMatrix<Complex64>,
    omegas: &[Complex64],
) -> Result<DMatrix<Complex64>> {
    let n = lambda.nrows();
    for i in 0..omegas.len() {
        for j in (i + 1)..omegas.len() {
            if (omegas[i] - omegas[j]).norm()
                < 1e-8 * (1.0 + omegas[i].norm() + omegas[j].norm())
            {
                return Err(UtmError::DegenerateEigenvalue {
                    k: Complex64::new(f64::NAN, f64::NAN),
                    omega_a: omegas[i],
                    omega_b: omegas[j],
                });
            }
        }
    }
    let mut rows = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (j, &omega) in omegas.iter().enumerate() {
        let b = lambda.transpose() - DMatrix::<Complex64>::identity(n, n) * omega;
        let v = null_vector(&b)?;
        // normalize so the largest entry is exactly 1
        let (mut best, mut best_norm) = (0usize, 0.0f64);
        for (i, &x) in v.iter().enumerate() {
            if x.norm() > best_norm {
                best_norm = x.norm();
                best = i;
            }
        }
        let scale = v[best];
        for i in 0..n {
            rows[(j, i)] = v[i] / scale;
        }
    }
    Ok(rows)
}

/// Null vector of a (numerically) rank-deficient square matrix via full-pivot
/// Gaussian elimination.
fn null_vector(b: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.nrows();
    let mut a = b.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0usize;
    for step in 0..n {
        // full pivot over the remaining block
        let (mut pr, mut pc, mut pv) = (step, step, 0.0f64);
        for r in step..n {
            for c in step..n {
                if a[(r, c)].norm() > pv {
                    pv = a[(r, c)].norm();
                    pr = r;
                    pc = c;
                }
            }
        }
        if pv < 1e-10 * (1.0 + b.iter().map(|x| x.norm()).fold(0.0, f64::max)) {
            break;
        }
        a.swap_rows(step, pr);
        a.swap_columns(step, pc);
        col_perm.swap(step, pc);
        for r in (step + 1)..n {
            let f = a[(r, step)] / a[(step, step)];
            for c in step..n {
                let v = a[(step, c)];
                a[(r, c)] -= f * v;
            }
        }
        rank += 1;
    }
    if rank == n {
        return Err(UtmError::SingularElimination {
            k: Complex64::new(f64::NAN, f64::NAN),
        });
    }
    // free variable = first unpivoted permuted column
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[rank] = Complex64::new(1.0, 0.0);
    for r in (0..rank).rev() {
        let mut s = Complex64::new(0.0, 0.0);
        for c in (r + 1)..n {
            s += a[(r, c)] * x[c];
        }
        x[r] = -s / a[(r, r)];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (pos, &orig) in col_perm.iter().enumerate() {
        out[orig] = x[pos];
    }
    Ok(out)
}

/// Evaluation rule for the diagonalizer A(k) with rows ordered by branch labels.
#[derive(Debug, Clone)]
pub struct Diagonalizer {
    matrix: PolynomialMatrix,
}

impl Diagonalizer {
    /// A(k) for the given branch values (in label order).
    pub fn a_at(&self, k: Complex64, omegas: &[Complex64]) -> Result<DMatrix<Complex64>> {
        left_eigen_rows(&self.matrix.eval(k), omegas)
    }
}

/// Builds the diagonalizer bound to a symbol; branch values are supplied per
/// evaluation so labeled and unlabeled orderings both work.
pub fn diagonalizer(m: &PolynomialMatrix) -> Diagonalizer {
    Diagonalizer { matrix: m.clone() }
}
