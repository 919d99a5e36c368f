//! Lattices, their Gram forms, and the structural operations on both.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enumeration;
use crate::error::{Error, Result};
use crate::numeric::{hnf, int, lcm_of_denominators, ldl, to_integer, Mat, Rat};

/// Full-rank lattice `M ℤⁿ`; the columns of `M` generate.
///
/// The 0-dimensional lattice is allowed as the identity for [`direct_sum`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: Mat,
}

impl Lattice {
    pub fn new(basis: Mat) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::dim(format!(
                "lattice basis must be square, got {}x{}",
                basis.rows(),
                basis.cols()
            )));
        }
        if basis.determinant()?.is_zero() {
            return Err(Error::RankDeficient {
                rank: basis.rank(),
                expected: basis.rows(),
            });
        }
        Ok(Lattice { basis })
    }

    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Lattice::new(Mat::from_ints(rows))
    }

    pub fn standard(n: usize) -> Self {
        Lattice {
            basis: Mat::identity(n),
        }
    }

    pub fn empty() -> Self {
        Lattice::standard(0)
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.rows()
    }

    /// Signed determinant of the basis matrix.
    pub fn determinant(&self) -> Rat {
        self.basis.determinant().expect("basis is square")
    }

    pub fn gram(&self) -> GramForm {
        let q = self
            .basis
            .transpose()
            .mul(&self.basis)
            .expect("square basis");
        GramForm { q }
    }

    /// Dual lattice: basis `M⁻ᵀ`.
    pub fn dual(&self) -> Lattice {
        let basis = self
            .basis
            .inverse()
            .expect("basis is invertible")
            .transpose();
        Lattice { basis }
    }

    pub fn scale(&self, factor: &Rat) -> Result<Lattice> {
        if factor.is_zero() {
            return Err(Error::invalid("scale factor must be non-zero"));
        }
        Ok(Lattice {
            basis: self.basis.scaled(factor),
        })
    }

    /// Coordinates of an ambient vector in this basis, if it is a member.
    pub fn coordinates(&self, v: &[Rat]) -> Result<Vec<BigInt>> {
        if v.len() != self.dimension() {
            return Err(Error::dim("vector length differs from lattice dimension"));
        }
        self.basis
            .solve(v)?
            .iter()
            .map(|c| to_integer(c).ok_or(Error::NotInLattice))
            .collect()
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        match self.coordinates(v) {
            Ok(_) => Ok(true),
            Err(Error::NotInLattice) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Ambient vector `basis * coords`.
    pub fn ambient(&self, coords: &[i64]) -> Vec<Rat> {
        let x: Vec<Rat> = coords.iter().map(|&c| int(c)).collect();
        self.basis.mul_vec(&x).expect("coordinate length matches")
    }

    /// Equality as point sets, by mutual membership of basis columns.
    pub fn same_lattice(&self, other: &Lattice) -> Result<bool> {
        if self.dimension() != other.dimension() {
            return Ok(false);
        }
        for col in other.basis.columns() {
            if !self.contains(&col)? {
                return Ok(false);
            }
        }
        for col in self.basis.columns() {
            if !other.contains(&col)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Canonical basis (Hermite normal form); integer bases only.
    pub fn hnf_basis(&self) -> Result<Mat> {
        hnf(&self.basis)
    }

    /// First `count` distinct Laplace eigenvalues of the flat torus `ℝⁿ/L`,
    /// ascending, with multiplicities.
    pub fn laplace_spectrum_prefix(&self, count: usize) -> Result<Vec<LaplaceEigenvalue>> {
        if count == 0 {
            return Err(Error::invalid("count must be positive"));
        }
        if self.dimension() == 0 {
            return Ok(vec![LaplaceEigenvalue {
                squared_length: Rat::zero(),
                multiplicity: 1,
            }]);
        }
        let dual_gram = self.dual().gram();
        let mut bound = (0..dual_gram.dimension())
            .map(|i| dual_gram.matrix().get(i, i).clone())
            .max()
            .expect("positive dimension");
        loop {
            let spectrum = enumeration::rep_spectrum(&dual_gram, &bound)?;
            let attained: Vec<LaplaceEigenvalue> = spectrum
                .counts
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(t, &c)| LaplaceEigenvalue {
                    squared_length: t.clone(),
                    multiplicity: c,
                })
                .collect();
            if attained.len() >= count {
                return Ok(attained.into_iter().take(count).collect());
            }
            bound *= int(2);
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# lattice")?;
        write!(f, "{}", self.basis)
    }
}

/// Laplace eigenvalue `4π² · squared_length` of a flat torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaplaceEigenvalue {
    /// Squared length of the dual lattice vectors producing this eigenvalue.
    pub squared_length: Rat,
    pub multiplicity: u64,
}

impl LaplaceEigenvalue {
    /// The eigenvalue as a rational multiple of π².
    pub fn pi_squared_coefficient(&self) -> Rat {
        &self.squared_length * int(4)
    }
}

impl fmt::Display for LaplaceEigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·4π²\t{}", self.squared_length, self.multiplicity)
    }
}

/// Block-diagonal sum; dimensions add and determinants multiply.
pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    Lattice {
        basis: Mat::block_diag(&a.basis, &b.basis),
    }
}

/// Scaled direct sums `f_1·Γ_{i_1} ⊕ ... ⊕ f_c·Γ_{i_c}` over every choice of
/// indices, with factors `1..=copies`.
pub fn choir_family(lattices: &[Lattice], copies: usize) -> Result<Vec<Lattice>> {
    let factors: Vec<Rat> = (1..=copies as i64).map(int).collect();
    choir_family_with_factors(lattices, &factors)
}

/// [`choir_family`] with explicit factors. Factors must be non-zero and
/// pairwise distinct up to sign.
pub fn choir_family_with_factors(lattices: &[Lattice], factors: &[Rat]) -> Result<Vec<Lattice>> {
    if lattices.is_empty() || factors.is_empty() {
        return Err(Error::invalid("need at least one lattice and one factor"));
    }
    let dim = lattices[0].dimension();
    if lattices.iter().any(|l| l.dimension() != dim) {
        return Err(Error::dim("choir family members must share a dimension"));
    }
    for (i, a) in factors.iter().enumerate() {
        if a.is_zero() {
            return Err(Error::invalid("scale factors must be non-zero"));
        }
        if factors[..i].iter().any(|b| b == a || *b == -a) {
            return Err(Error::invalid("scale factors must be distinct up to sign"));
        }
    }
    let k = lattices.len();
    let total = k
        .checked_pow(factors.len() as u32)
        .ok_or_else(|| Error::CapExceeded("choir family too large".into()))?;
    let mut out = Vec::with_capacity(total);
    for index in 0..total {
        // digits of `index` in base k, most significant first, pick members
        let mut digits = vec![0usize; factors.len()];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = rest % k;
            rest /= k;
        }
        let mut acc = Lattice::empty();
        for (factor, &which) in factors.iter().zip(&digits) {
            acc = direct_sum(&acc, &lattices[which].scale(factor)?);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Positive definite quadratic form `x ↦ xᵀ q x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    q: Mat,
}

/// Class invariants used by the isospectrality test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormClassTags {
    pub det: String,
    pub is_even: bool,
    pub level: Option<u64>,
}

impl GramForm {
    /// Checks symmetry and positive definiteness.
    pub fn new(q: Mat) -> Result<Self> {
        ldl(&q)?;
        Ok(GramForm { q })
    }

    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        GramForm::new(Mat::from_ints(rows))
    }

    pub fn matrix(&self) -> &Mat {
        &self.q
    }

    pub fn dimension(&self) -> usize {
        self.q.rows()
    }

    pub fn determinant(&self) -> Rat {
        self.q.determinant().expect("square form")
    }

    pub fn is_integral(&self) -> bool {
        self.q.is_integral()
    }

    /// Integer entries and even diagonal.
    pub fn is_even(&self) -> bool {
        self.q.is_integral() && (0..self.dimension()).all(|i| self.q.get(i, i).numer().is_even())
    }

    /// `2q`. Only defined for integral forms.
    pub fn double(&self) -> Result<GramForm> {
        self.require_integral()?;
        Ok(GramForm {
            q: self.q.scaled(&int(2)),
        })
    }

    pub fn scaled(&self, factor: &Rat) -> Result<GramForm> {
        GramForm::new(self.q.scaled(factor))
    }

    /// Smallest `N ≥ 1` with `N·q⁻¹` integral with even diagonal.
    pub fn level(&self) -> Result<u64> {
        if !self.is_even() {
            return Err(Error::NotEven);
        }
        let inv = self.q.inverse()?;
        let base = lcm_of_denominators(inv.entries());
        let base_rat = Rat::from_integer(base.clone());
        let diagonal_even =
            (0..self.dimension()).all(|i| (inv.get(i, i) * &base_rat).to_integer().is_even());
        let level = if diagonal_even { base } else { base * 2 };
        level
            .to_u64()
            .ok_or_else(|| Error::CapExceeded(format!("level {level} does not fit in 64 bits")))
    }

    pub fn tags(&self) -> FormClassTags {
        let is_even = self.is_even();
        FormClassTags {
            det: self.determinant().to_string(),
            is_even,
            level: if is_even { self.level().ok() } else { None },
        }
    }

    /// `bᵀ q b`; `b` must be square with matching size.
    pub fn transform(&self, b: &Mat) -> Result<GramForm> {
        if b.rows() != self.dimension() {
            return Err(Error::dim("transform has the wrong number of rows"));
        }
        let q = b.transpose().mul(&self.q)?.mul(b)?;
        GramForm::new(q)
    }

    pub fn direct_sum(&self, other: &GramForm) -> GramForm {
        GramForm {
            q: Mat::block_diag(&self.q, &other.q),
        }
    }

    pub fn evaluate(&self, x: &[i64]) -> Rat {
        self.inner(x, x)
    }

    pub fn inner(&self, x: &[i64], y: &[i64]) -> Rat {
        let mut s = Rat::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    s += self.q.get(i, j) * int(xi * yj);
                }
            }
        }
        s
    }

    fn require_integral(&self) -> Result<()> {
        for i in 0..self.dimension() {
            for j in 0..self.dimension() {
                if !self.q.get(i, j).is_integer() {
                    return Err(Error::NonIntegral { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Largest diagonal entry, as an integer if the form is integral.
    pub(crate) fn max_diagonal(&self) -> Rat {
        (0..self.dimension())
            .map(|i| self.q.get(i, i).clone())
            .max()
            .unwrap_or_else(Rat::one)
    }
}

impl fmt::Display for GramForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# gram")?;
        write!(f, "{}", self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::enumeration::rep_spectrum;
    use crate::numeric::{rat, Span};
    use proptest::prelude::*;

    fn random_basis(n: usize, seed: &[i64]) -> Option<Lattice> {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
        Lattice::from_ints(&rows).ok()
    }

    #[test]
    fn gram_of_corpus_bases_matches_forms() {
        for i in 0..3 {
            assert_eq!(corpus::lattice(i).gram(), corpus::form(i));
        }
        assert_eq!(Lattice::standard(3).gram().matrix(), &Mat::identity(3));
    }

    #[test]
    fn rejects_singular_and_nonsquare() {
        assert!(Lattice::from_ints(&[[1, 2], [2, 4]]).is_err());
        assert!(Lattice::new(Mat::zeros(2, 3)).is_err());
    }

    #[test]
    fn gram_scales_quadratically() {
        let l = corpus::lattice(0);
        let s = l.scale(&int(3)).unwrap();
        assert_eq!(s.gram().matrix(), &l.gram().matrix().scaled(&int(9)));
        assert!(l.scale(&int(0)).is_err());
        assert_eq!(l.scale(&int(1)).unwrap(), l);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(Lattice::standard(2).dual(), Lattice::standard(2));
        let l = Lattice::from_ints(&[[1, 0], [0, 2]]).unwrap();
        let expected = Mat::diagonal(&[int(1), rat(1, 2)]);
        assert_eq!(l.dual().basis(), &expected);
    }

    #[test]
    fn evenness_and_levels() {
        let q1 = corpus::form(0);
        assert!(!q1.is_even());
        assert!(q1.double().unwrap().is_even());
        assert!(!GramForm::new(Mat::identity(2)).unwrap().is_even());
        for q in corpus::forms() {
            assert_eq!(q.double().unwrap().level().unwrap(), 100);
        }
        for n in 1..=4 {
            let two = GramForm::new(Mat::identity(n).scaled(&int(2))).unwrap();
            assert_eq!(two.level().unwrap(), 4);
        }
        assert!(matches!(q1.level(), Err(Error::NotEven)));
        // E8 root lattice: even unimodular, inverse even as well
        let e8 = GramForm::from_ints(&[
            [2, -1, 0, 0, 0, 0, 0, 0],
            [-1, 2, -1, 0, 0, 0, 0, 0],
            [0, -1, 2, -1, 0, 0, 0, -1],
            [0, 0, -1, 2, -1, 0, 0, 0],
            [0, 0, 0, -1, 2, -1, 0, 0],
            [0, 0, 0, 0, -1, 2, -1, 0],
            [0, 0, 0, 0, 0, -1, 2, 0],
            [0, 0, -1, 0, 0, 0, 0, 2],
        ])
        .unwrap();
        assert_eq!(e8.determinant(), int(1));
        assert_eq!(e8.level().unwrap(), 1);
    }

    #[test]
    fn level_is_minimal() {
        let forms = [
            corpus::form(0).double().unwrap(),
            GramForm::from_ints(&[[2, 1], [1, 2]]).unwrap(),
            GramForm::from_ints(&[[4, 1], [1, 6]]).unwrap(),
            GramForm::from_ints(&[[2, 0, 1], [0, 4, 1], [1, 1, 6]]).unwrap(),
        ];
        for q in forms {
            let n = q.level().unwrap();
            let inv = q.matrix().inverse().unwrap();
            let works = |m: u64| {
                let s = inv.scaled(&Rat::from_integer(m.into()));
                s.is_integral() && (0..q.dimension()).all(|i| s.get(i, i).numer().is_even())
            };
            assert!(works(n));
            assert!((1..n).all(|m| !works(m)), "level {n} not minimal");
        }
    }

    #[test]
    fn doubling_rejects_fractions() {
        let q = GramForm::new(Mat::diagonal(&[rat(1, 2), int(1)])).unwrap();
        assert!(q.double().is_err());
    }

    #[test]
    fn direct_sum_with_empty_is_identity() {
        let l = corpus::lattice(1);
        assert_eq!(direct_sum(&l, &Lattice::empty()), l);
        assert_eq!(direct_sum(&Lattice::empty(), &l), l);
        let s = direct_sum(&l, &corpus::lattice(2));
        assert_eq!(s.dimension(), 12);
        assert_eq!(s.determinant(), int(125 * 125));
        assert_eq!(s.gram(), corpus::form(1).direct_sum(&corpus::form(2)));
    }

    #[test]
    fn direct_sums_of_isospectral_lattices_are_isospectral() {
        let [l1, l2, _] = corpus::lattices();
        let a = direct_sum(&l1, &l1).gram();
        let b = direct_sum(&l1, &l2).gram();
        assert_eq!(
            rep_spectrum(&a, &int(30)).unwrap(),
            rep_spectrum(&b, &int(30)).unwrap()
        );
    }

    #[test]
    fn laplace_prefix_of_a_circle() {
        let c = int(3);
        let circle = Lattice::new(Mat::diagonal(&[c.clone()])).unwrap();
        let ev = circle.laplace_spectrum_prefix(3).unwrap();
        let coeffs: Vec<(Rat, u64)> = ev
            .iter()
            .map(|e| (e.pi_squared_coefficient(), e.multiplicity))
            .collect();
        let c2 = &c * &c;
        assert_eq!(
            coeffs,
            vec![(int(0), 1), (int(4) / &c2, 2), (int(16) / &c2, 2)]
        );
    }

    #[test]
    fn laplace_prefix_of_square_torus() {
        let ev = Lattice::standard(2).laplace_spectrum_prefix(2).unwrap();
        assert_eq!(ev[0].squared_length, int(0));
        assert_eq!(ev[0].multiplicity, 1);
        assert_eq!(ev[1].pi_squared_coefficient(), int(4));
        assert_eq!(ev[1].multiplicity, 4);
        assert_eq!(ev[1].to_string(), "1·4π²\t4");
    }

    #[test]
    fn laplace_prefix_invariant_under_signed_permutation() {
        let l = corpus::lattice(0);
        let p = Mat::from_ints(&[
            [0, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, -1, 0],
            [1, 0, 0, 0, 0, 0],
            [0, 0, 0, 1, 0, 0],
            [0, 0, -1, 0, 0, 0],
            [0, 0, 0, 0, 0, 1],
        ]);
        let image = Lattice::new(p.mul(l.basis()).unwrap()).unwrap();
        assert_eq!(
            l.laplace_spectrum_prefix(6).unwrap(),
            image.laplace_spectrum_prefix(6).unwrap()
        );
    }

    #[test]
    fn choir_family_sizes() {
        let [l1, l2, l3] = corpus::lattices();
        let pair = choir_family(&[l1.clone(), l2.clone()], 2).unwrap();
        assert_eq!(pair.len(), 4);
        assert_eq!(pair[1], direct_sum(&l1, &l2.scale(&int(2)).unwrap()));
        let same = choir_family(&[l1.clone(), l2.clone()], 1).unwrap();
        assert_eq!(same, vec![l1.clone(), l2.clone()]);
        let triple = choir_family(&[l1.clone(), l2, l3], 2).unwrap();
        assert_eq!(triple.len(), 9);
        assert!(triple.iter().all(|l| l.dimension() == 12));
        assert!(choir_family(&[l1.clone(), Lattice::standard(2)], 2).is_err());
        assert!(choir_family_with_factors(&[l1.clone()], &[int(1), int(-1)]).is_err());
        assert!(choir_family_with_factors(&[l1], &[int(0)]).is_err());
    }

    #[test]
    fn determinant_multiple_of_identity_lies_in_lattice() {
        for l in corpus::lattices() {
            let d = l.determinant();
            for j in 0..6 {
                let mut v = vec![int(0); 6];
                v[j] = d.clone();
                assert!(l.contains(&v).unwrap());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn gram_is_positive_definite(n in 1usize..=5, seed in proptest::collection::vec(-9i64..=9, 25)) {
            if let Some(l) = random_basis(n, &seed) {
                prop_assert!(ldl(l.gram().matrix()).is_ok());
                prop_assert_eq!(l.gram().determinant(), l.determinant() * l.determinant());
            }
        }

        #[test]
        fn double_dual_is_the_lattice(n in 1usize..=4, seed in proptest::collection::vec(-9i64..=9, 16)) {
            if let Some(l) = random_basis(n, &seed) {
                prop_assert!(l.dual().dual().same_lattice(&l).unwrap());
            }
        }

        #[test]
        fn dual_pairs_integrally(seed in proptest::collection::vec(-9i64..=9, 9)) {
            if let Some(l) = random_basis(3, &seed) {
                let pairing = l.dual().basis().transpose().mul(l.basis()).unwrap();
                prop_assert!(pairing.is_integral());
            }
        }

        #[test]
        fn determinant_times_identity_is_contained(n in 1usize..=4, seed in proptest::collection::vec(-9i64..=9, 16)) {
            if let Some(l) = random_basis(n, &seed) {
                let d = l.determinant();
                let mut span = Span::new();
                for j in 0..n {
                    let mut v = vec![int(0); n];
                    v[j] = d.clone();
                    prop_assert!(l.contains(&v).unwrap());
                    span.insert(&v);
                }
                prop_assert_eq!(span.rank(), n);
            }
        }
    }
}
