//! Orthogonal decomposition into indecomposable components.
//!
//! A vector is indecomposable when it is not `x + y` with `x, y ≠ 0` and
//! `⟨x, y⟩ ≥ 0`. Indecomposable vectors generate the lattice, and two of them
//! with a non-zero product always sit in the same orthogonal summand, so the
//! connected components of the "non-zero product" graph on them give the
//! finest orthogonal splitting. The result is re-checked independently
//! (orthogonality, generation by Hermite normal form, determinant product).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumeration::{enumerate_up_to, IntVec, Reduced};
use crate::error::{Error, Result};
use crate::lattice::{GramForm, Lattice};
use crate::numeric::{hnf, hnf_columns, lcm_of_denominators, Mat, Rat};

/// Integer copy of a form scaled to clear denominators.
struct ScaledForm {
    q: Vec<Vec<i64>>,
}

impl ScaledForm {
    fn new(form: &GramForm) -> Result<Self> {
        let den = Rat::from_integer(lcm_of_denominators(form.matrix().entries()));
        let n = form.dimension();
        let q = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (form.matrix().get(i, j) * &den)
                            .to_integer()
                            .to_i64()
                            .ok_or_else(|| Error::Unsupported("form entries exceed 64 bits".into()))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(ScaledForm { q })
    }

    fn image(&self, x: &[i64]) -> Vec<i128> {
        self.q
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum()
            })
            .collect()
    }
}

fn dot(x: &[i64], qy: &[i128]) -> i128 {
    x.iter().zip(qy).map(|(&a, &b)| a as i128 * b).sum()
}

/// Whether the lattice vector `v` (ambient coordinates) splits as `x + y`
/// with both parts non-zero and `⟨x, y⟩ ≥ 0`.
pub fn is_decomposable_vector(l: &Lattice, v: &[Rat]) -> Result<bool> {
    let coords: IntVec = l
        .coordinates(v)?
        .iter()
        .map(|c| {
            c.to_i64()
                .ok_or_else(|| Error::Unsupported("coordinates exceed 64 bits".into()))
        })
        .collect::<Result<_>>()?;
    if coords.iter().all(|&c| c == 0) {
        return Err(Error::invalid("the zero vector has no decomposition"));
    }
    let q = l.gram();
    let norm = q.evaluate(&coords);
    let scaled = ScaledForm::new(&q)?;
    let qv = scaled.image(&coords);
    let vv = dot(&coords, &qv);
    // ⟨x, v − x⟩ ≥ 0 for x or −x  ⟺  |⟨x, v⟩| ≥ Q(x)
    Ok(enumerate_up_to(&q, &norm)?.iter().any(|x| {
        let xx = dot(&x.coords, &scaled.image(&x.coords));
        xx < vv && dot(&x.coords, &qv).abs() >= xx
    }))
}

/// One orthogonal summand.
#[derive(Clone, Debug)]
pub struct Component {
    /// Basis in coordinates of the input lattice (integer columns, HNF).
    pub coordinates: Mat,
    /// The same basis in ambient space.
    pub basis: Mat,
    /// Indecomposable vectors of the component (coordinates).
    pub generators: Vec<IntVec>,
    pub gram: GramForm,
}

impl Component {
    pub fn dimension(&self) -> usize {
        self.coordinates.cols()
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionCertificate {
    /// Norm cutoff: the largest diagonal entry of an LLL-reduced Gram matrix.
    pub cutoff: Rat,
    pub enumerated: usize,
    pub indecomposable: usize,
    /// Gram matrix of all component bases side by side; block diagonal.
    pub orthogonality: Mat,
    /// HNF of the concatenated component bases, in coordinates (identity).
    pub generation: Mat,
    pub determinant_product: Rat,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub components: Vec<Component>,
    pub certificate: DecompositionCertificate,
}

/// Machine-readable form of a [`Decomposition`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub dimensions: Vec<usize>,
    pub cutoff: String,
    pub enumerated: usize,
    pub indecomposable: usize,
    pub determinant_product: String,
    /// Ambient basis of each component.
    pub components: Vec<Vec<Vec<String>>>,
    pub orthogonality: Vec<Vec<String>>,
    pub generation: Vec<Vec<String>>,
}

impl Decomposition {
    pub fn record(&self) -> DecompositionRecord {
        let c = &self.certificate;
        DecompositionRecord {
            dimensions: self.dimensions(),
            cutoff: c.cutoff.to_string(),
            enumerated: c.enumerated,
            indecomposable: c.indecomposable,
            determinant_product: c.determinant_product.to_string(),
            components: self
                .components
                .iter()
                .map(|k| k.basis.string_rows())
                .collect(),
            orthogonality: c.orthogonality.string_rows(),
            generation: c.generation.string_rows(),
        }
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.components.iter().map(Component::dimension).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dimensions().iter().map(|d| d.to_string()).collect();
        writeln!(f, "components: {}", self.components.len())?;
        writeln!(f, "dimensions: {}", dims.join(" "))?;
        writeln!(f, "cutoff: {}", self.certificate.cutoff)?;
        writeln!(f, "enumerated: {}", self.certificate.enumerated)?;
        writeln!(f, "indecomposable: {}", self.certificate.indecomposable)?;
        writeln!(
            f,
            "determinant_product: {}",
            self.certificate.determinant_product
        )?;
        for (i, c) in self.components.iter().enumerate() {
            writeln!(f, "\n# component {}", i + 1)?;
            write!(f, "{}", c.basis)?;
        }
        writeln!(f, "\n# orthogonality")?;
        write!(f, "{}", self.certificate.orthogonality)?;
        writeln!(f, "\n# generation")?;
        write!(f, "{}", self.certificate.generation)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Components of the form `q` in coordinates; ambient bases are `basis ·`
/// coordinates.
pub fn decompose_form(q: &GramForm) -> Result<Decomposition> {
    decompose_with_basis(q, &Mat::identity(q.dimension()))
}

pub fn decompose(l: &Lattice) -> Result<Decomposition> {
    decompose_with_basis(&l.gram(), l.basis())
}

pub fn is_irreducible(l: &Lattice) -> Result<bool> {
    Ok(decompose(l)?.is_irreducible())
}

fn decompose_with_basis(q: &GramForm, basis: &Mat) -> Result<Decomposition> {
    let n = q.dimension();
    if n == 0 {
        return Err(Error::invalid("cannot decompose the zero lattice"));
    }
    if basis.rank() != n {
        return Err(Error::RankDeficient {
            rank: basis.rank(),
            expected: n,
        });
    }
    let cutoff = Reduced::new(q)?.form.max_diagonal();
    let all = enumerate_up_to(q, &cutoff)?;
    let scaled = ScaledForm::new(q)?;
    let images: Vec<Vec<i128>> = all.iter().map(|v| scaled.image(&v.coords)).collect();
    let norms: Vec<i128> = all
        .iter()
        .zip(&images)
        .map(|(v, qv)| dot(&v.coords, qv))
        .collect();

    // `all` is sorted by norm, so candidates for x precede v
    let indecomposable: Vec<usize> = (0..all.len())
        .into_par_iter()
        .filter(|&k| {
            let shorter = norms.partition_point(|&m| m < norms[k]);
            !(0..shorter).any(|i| dot(&all[i].coords, &images[k]).abs() >= norms[i])
        })
        .collect();

    let m = indecomposable.len();
    let mut parent: Vec<usize> = (0..m).collect();
    for a in 0..m {
        for b in (a + 1)..m {
            let (i, j) = (indecomposable[a], indecomposable[b]);
            if dot(&all[i].coords, &images[j]) != 0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; m];
    for a in 0..m {
        let root = find(&mut parent, a);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(indecomposable[a]);
    }

    let mut components = Vec::with_capacity(groups.len());
    for group in &groups {
        let generators: Vec<IntVec> = group.iter().map(|&k| all[k].coords.clone()).collect();
        let cols: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.iter().map(|&c| BigInt::from(c)).collect())
            .collect();
        let reduced = hnf_columns(n, cols);
        let coordinates = Mat::from_int_columns(n, &reduced)?;
        let ambient = basis.mul(&coordinates)?;
        let gram = q.transform(&coordinates)?;
        components.push(Component {
            coordinates,
            basis: ambient,
            generators,
            gram,
        });
    }
    let certificate = certify(q, basis, &components, cutoff, all.len(), m)?;
    Ok(Decomposition {
        components,
        certificate,
    })
}

fn certify(
    q: &GramForm,
    basis: &Mat,
    components: &[Component],
    cutoff: Rat,
    enumerated: usize,
    indecomposable: usize,
) -> Result<DecompositionCertificate> {
    let n = q.dimension();
    let dims: usize = components.iter().map(Component::dimension).sum();
    if dims != n {
        return Err(Error::verification(
            "decomposition",
            format!("component dimensions sum to {dims}, expected {n}"),
        ));
    }
    let columns: Vec<Vec<Rat>> = components
        .iter()
        .flat_map(|c| c.coordinates.columns())
        .collect();
    let joint = Mat::from_columns(n, &columns)?;
    let orthogonality = joint.transpose().mul(q.matrix())?.mul(&joint)?;
    let mut offset = 0;
    for c in components {
        let d = c.dimension();
        for i in offset..offset + d {
            for j in 0..n {
                let inside = (offset..offset + d).contains(&j);
                if !inside && !orthogonality.get(i, j).is_zero() {
                    return Err(Error::verification(
                        "decomposition",
                        format!("components are not orthogonal at ({i}, {j})"),
                    ));
                }
            }
        }
        offset += d;
    }
    let generation = hnf(&joint)?;
    if generation != Mat::identity(n) {
        return Err(Error::verification(
            "decomposition",
            "components do not generate the lattice",
        ));
    }
    if basis.is_integral() && hnf(&basis.mul(&joint)?)? != hnf(basis)? {
        return Err(Error::verification(
            "decomposition",
            "ambient generators differ from the lattice",
        ));
    }
    let mut determinant_product = Rat::one();
    for c in components {
        determinant_product *= c.gram.determinant();
    }
    let expected = q.determinant();
    if determinant_product != expected {
        return Err(Error::verification(
            "decomposition",
            format!(
                "component determinants multiply to {determinant_product}, expected {expected}"
            ),
        ));
    }
    Ok(DecompositionCertificate {
        cutoff,
        enumerated,
        indecomposable,
        orthogonality,
        generation,
        determinant_product,
    })
}
