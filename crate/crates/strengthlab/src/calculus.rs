//! Iterated difference operators and the multilinearization of a homogeneous
//! polynomial: the symmetric d-linear form obtained by differencing P once in
//! each of d independent directions, together with the diagonal identity
//! P(x) = (1/d!) * form(x, ..., x).

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{Polynomial, ValueTable, VectorPoint};

/// Symmetric d-slot multilinear form on V^d. Tensor entries are stored once
/// per sorted index tuple, so symmetry holds by construction; evaluation sums
/// over the distinct permutations of each stored tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearForm {
    field: Field,
    d: usize,
    n: usize,
    coeffs: BTreeMap<Vec<u32>, u64>,
}

impl MultilinearForm {
    /// Build a form directly from (sorted index tuple, coefficient) pairs.
    pub fn from_coeffs(
        field: Field,
        d: usize,
        n: usize,
        entries: &[(Vec<u32>, u64)],
    ) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (key, c) in entries {
            if key.len() != d {
                return Err(Error::ArityMismatch {
                    expected: d,
                    got: key.len(),
                });
            }
            if key.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidInput("index tuple must be sorted".into()));
            }
            if key.iter().any(|&v| v as usize >= n) {
                return Err(Error::IndexOutOfRange {
                    index: *key.iter().max().unwrap() as usize,
                    n,
                });
            }
            if *c != 0 {
                coeffs.insert(key.clone(), *c);
            }
        }
        Ok(MultilinearForm {
            field,
            d,
            n,
            coeffs,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn slots(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&[u32], u64)> {
        self.coeffs.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Pointwise m-fold difference of a value table along the directions `ts`.
/// The order of `ts` does not change the result.
pub fn iterated_delta(table: &ValueTable, ts: &[VectorPoint]) -> Result<ValueTable> {
    let field = table.field().clone();
    let n = table.n();
    let mut values: Vec<u32> = table.values().to_vec();
    for t in ts {
        if t.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: t.dim(),
            });
        }
        let t_idx = t.encode(&field);
        let shifted: Vec<u32> = (0..values.len() as u64)
            .map(|i| values[add_point_indices(&field, n, i, t_idx) as usize])
            .collect();
        for (v, s) in values.iter_mut().zip(shifted) {
            *v = field.sub(s as u64, *v as u64) as u32;
        }
    }
    ValueTable::from_values(field, n, values)
}

/// Digitwise base-p addition of encoded points; point encodings are base-p
/// positional across all n*s digits, so this is coordinate-wise field
/// addition.
pub(crate) fn add_point_indices(field: &Field, n: usize, a: u64, b: u64) -> u64 {
    let p = field.p();
    let digits = n as u32 * field.s();
    let mut out = 0u64;
    let mut place = 1u64;
    let (mut ra, mut rb) = (a, b);
    for _ in 0..digits {
        let s = ra % p + rb % p;
        out += (if s >= p { s - p } else { s }) * place;
        place *= p;
        ra /= p;
        rb /= p;
    }
    out
}

/// The multilinearization of a homogeneous P of degree d >= 1: the monomial
/// c * x^a contributes the tensor entry c * prod_j a_j! at the sorted index
/// tuple listing each variable j with multiplicity a_j. On the diagonal the
/// d!/prod(a_j!) distinct permutations of that tuple recover d! * P.
pub fn multilinearize(p: &Polynomial) -> Result<MultilinearForm> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::NotHomogeneous { expected: 1 }),
    };
    if !p.is_homogeneous(d) {
        return Err(Error::NotHomogeneous { expected: d });
    }
    let field = p.field().clone();
    field.factorial(d)?; // enforces char > d
    let mut coeffs = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut key = Vec::with_capacity(d as usize);
        let mut weight = 1u64;
        for (j, &e) in m.exps().iter().enumerate() {
            for _ in 0..e {
                key.push(j as u32);
            }
            weight = field.mul(weight, field.factorial(e)?);
        }
        coeffs.insert(key, field.mul(c, weight));
    }
    Ok(MultilinearForm {
        field,
        d: d as usize,
        n: p.n(),
        coeffs,
    })
}

/// Evaluate the form at d points, one per slot.
pub fn evaluate_form(form: &MultilinearForm, xs: &[VectorPoint]) -> Result<u64> {
    if xs.len() != form.d {
        return Err(Error::ArityMismatch {
            expected: form.d,
            got: xs.len(),
        });
    }
    for x in xs {
        if x.dim() != form.n {
            return Err(Error::DimensionMismatch {
                expected: form.n,
                got: x.dim(),
            });
        }
    }
    let f = &form.field;
    let mut acc = 0u64;
    for (key, &c) in &form.coeffs {
        let mut perm_sum = 0u64;
        for_each_distinct_permutation(key, |perm| {
            let mut prod = c;
            for (slot, &var) in perm.iter().enumerate() {
                prod = f.mul(prod, xs[slot].coords()[var as usize]);
                if prod == 0 {
                    break;
                }
            }
            perm_sum = f.add(perm_sum, prod);
        });
        acc = f.add(acc, perm_sum);
    }
    Ok(acc)
}

/// Reconstruct the degree-d homogeneous polynomial (1/d!) * form(x, ..., x).
pub fn diagonal_reconstruct(form: &MultilinearForm) -> Result<Polynomial> {
    let field = form.field.clone();
    field.factorial(form.d as u32)?;
    let mut out = Polynomial::zero(field.clone(), form.n);
    for (key, &c) in &form.coeffs {
        let mut exps = vec![0u32; form.n];
        for &var in key {
            exps[var as usize] += 1;
        }
        let mut weight = 1u64;
        for &e in &exps {
            weight = field.mul(weight, field.factorial(e)?);
        }
        let coeff = field.mul(c, field.inv(weight)?);
        let term = Polynomial::monomial(field.clone(), form.n, exps, coeff);
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Visit every distinct permutation of a sorted multiset, in lexicographic
/// order.
fn for_each_distinct_permutation(sorted: &[u32], mut visit: impl FnMut(&[u32])) {
    let mut perm = sorted.to_vec();
    loop {
        visit(&perm);
        // next_permutation
        if perm.len() < 2 {
            return;
        }
        let mut i = perm.len() - 1;
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        let mut j = perm.len() - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

/// { "d": 3, "n": 3, "p": 5, "coeffs": [ { "idx": [0,1,2], "coeff": 1 } ] }
/// with sorted idx tuples; "s" appears only over a proper extension.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FormJson {
    pub d: usize,
    pub n: usize,
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    pub coeffs: Vec<FormCoeffJson>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FormCoeffJson {
    pub idx: Vec<u32>,
    pub coeff: Value,
}

impl MultilinearForm {
    pub fn to_json_repr(&self) -> FormJson {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, &c)| {
                let coeff = match &self.field {
                    Field::Prime(_) => json!(c),
                    Field::Extension(f) => json!(f.decode(c).coeffs),
                };
                FormCoeffJson {
                    idx: k.clone(),
                    coeff,
                }
            })
            .collect();
        FormJson {
            d: self.d,
            n: self.n,
            p: self.field.p(),
            s: if self.field.s() > 1 {
                Some(self.field.s())
            } else {
                None
            },
            coeffs,
        }
    }
}

pub fn form_to_json(form: &MultilinearForm) -> Value {
    serde_json::to_value(form.to_json_repr()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{all_points, parse};
    use proptest::prelude::*;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn parse5(text: &str, n: usize) -> Polynomial {
        parse(text, &f5(), n).unwrap()
    }

    #[test]
    fn multilinearize_cube() {
        // x^3 over F_5: form is 6abc = abc since 6 = 1 mod 5.
        let form = multilinearize(&parse5("x1^3", 1)).unwrap();
        let coeffs: Vec<_> = form.coeffs().collect();
        assert_eq!(coeffs, vec![(&[0u32, 0, 0][..], 1u64)]);
        let v = evaluate_form(
            &form,
            &[
                VectorPoint::new(vec![1]),
                VectorPoint::new(vec![1]),
                VectorPoint::new(vec![1]),
            ],
        )
        .unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn multilinearize_triple_product() {
        let form = multilinearize(&parse5("x1*x2*x3", 3)).unwrap();
        let coeffs: Vec<_> = form.coeffs().collect();
        assert_eq!(coeffs, vec![(&[0u32, 1, 2][..], 1u64)]);
        // Exactly one of the 6 slot assignments survives at (e1, e2, e3).
        let v = evaluate_form(
            &form,
            &[
                VectorPoint::basis(3, 0),
                VectorPoint::basis(3, 1),
                VectorPoint::basis(3, 2),
            ],
        )
        .unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn multilinearize_square() {
        let form = multilinearize(&parse5("x1^2", 1)).unwrap();
        let coeffs: Vec<_> = form.coeffs().collect();
        assert_eq!(coeffs, vec![(&[0u32, 0][..], 2u64)]);
    }

    #[test]
    fn multilinearize_rejects_bad_input() {
        assert!(matches!(
            multilinearize(&parse5("x1^2 + x1", 1)),
            Err(Error::NotHomogeneous { .. })
        ));
        let f3 = Field::prime(3).unwrap();
        let p = parse("x1^3", &f3, 1).unwrap();
        assert!(matches!(
            multilinearize(&p),
            Err(Error::CharTooSmall { .. })
        ));
    }

    #[test]
    fn evaluate_form_zero_slot() {
        let form = multilinearize(&parse5("x1^2*x2 + x1*x2^2", 2)).unwrap();
        let v = evaluate_form(
            &form,
            &[
                VectorPoint::new(vec![3, 2]),
                VectorPoint::zero(2),
                VectorPoint::new(vec![1, 4]),
            ],
        )
        .unwrap();
        assert_eq!(v, 0);
    }

    #[test]
    fn evaluate_form_arity_error() {
        let form = multilinearize(&parse5("x1^2", 1)).unwrap();
        assert!(matches!(
            evaluate_form(&form, &[VectorPoint::new(vec![1])]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn diagonal_roundtrip_examples() {
        for text in ["x1^3", "x1*x2*x3", "x1^2*x3 + 2*x2^3"] {
            let p = parse5(text, 3);
            let back = diagonal_reconstruct(&multilinearize(&p).unwrap()).unwrap();
            assert_eq!(back, p, "roundtrip failed for {text}");
        }
        let sq = parse5("x1^2", 1);
        assert_eq!(
            diagonal_reconstruct(&multilinearize(&sq).unwrap()).unwrap(),
            sq
        );
    }

    #[test]
    fn iterated_delta_examples() {
        // Degree < m is annihilated by m differences.
        let p = parse5("x1 + 3", 1);
        let table = p.value_table().unwrap();
        let ts = vec![VectorPoint::new(vec![1]), VectorPoint::new(vec![2])];
        let out = iterated_delta(&table, &ts).unwrap();
        assert!(out.values().iter().all(|&v| v == 0));

        // Delta_1 Delta_1 x^2 = 2.
        let p = parse5("x1^2", 1);
        let table = p.value_table().unwrap();
        let ts = vec![VectorPoint::new(vec![1]), VectorPoint::new(vec![1])];
        let out = iterated_delta(&table, &ts).unwrap();
        assert!(out.values().iter().all(|&v| v == 2));

        // Empty direction list: unchanged.
        let out = iterated_delta(&table, &[]).unwrap();
        assert_eq!(out.values(), table.values());
    }

    #[test]
    fn form_agrees_with_numeric_differencing() {
        // form(x_1..x_d) equals the d-fold difference of the value table in
        // directions x_1..x_d, at every base point (constancy included).
        let p = parse5("x1^2*x2 + 4*x2^3", 2);
        let table = p.value_table().unwrap();
        let form = multilinearize(&p).unwrap();
        let tuples = [
            [vec![1, 0], vec![0, 1], vec![1, 1]],
            [vec![2, 3], vec![4, 1], vec![0, 2]],
            [vec![1, 1], vec![1, 1], vec![1, 1]],
        ];
        for t in tuples {
            let pts: Vec<VectorPoint> = t.iter().map(|c| VectorPoint::new(c.clone())).collect();
            let diff = iterated_delta(&table, &pts).unwrap();
            let expected = evaluate_form(&form, &pts).unwrap() as u32;
            assert!(diff.values().iter().all(|&v| v == expected));
        }
    }

    #[test]
    fn form_json_shape() {
        let form = multilinearize(&parse5("x1*x2*x3", 3)).unwrap();
        let v = form_to_json(&form);
        assert_eq!(
            v,
            serde_json::json!({
                "d": 3, "n": 3, "p": 5,
                "coeffs": [ { "idx": [0,1,2], "coeff": 1 } ]
            })
        );
    }

    proptest! {
        #[test]
        fn diagonal_identity_pointwise(
            coeffs in prop::collection::vec(0u64..5, 4),
        ) {
            // Random homogeneous cubic over F_5 in 2 variables.
            let field = f5();
            let mut p = Polynomial::zero(field.clone(), 2);
            for (i, &c) in coeffs.iter().enumerate() {
                p = p.add(&Polynomial::monomial(
                    field.clone(), 2, vec![3 - i as u32, i as u32], c,
                )).unwrap();
            }
            prop_assume!(!p.is_zero());
            let form = multilinearize(&p).unwrap();
            let inv_d_fact = field.inv(field.factorial(3).unwrap()).unwrap();
            for x in all_points(&field, 2) {
                let diag = evaluate_form(&form, &[x.clone(), x.clone(), x.clone()]).unwrap();
                prop_assert_eq!(
                    field.mul(diag, inv_d_fact),
                    p.evaluate(&x).unwrap()
                );
            }
        }

        #[test]
        fn form_is_symmetric_under_slot_swaps(
            coeffs in prop::collection::vec(0u64..5, 4),
            xs in prop::collection::vec(prop::collection::vec(0u64..5, 2), 3),
            swap in (0usize..3, 0usize..3),
        ) {
            let field = f5();
            let mut p = Polynomial::zero(field.clone(), 2);
            for (i, &c) in coeffs.iter().enumerate() {
                p = p.add(&Polynomial::monomial(
                    field.clone(), 2, vec![3 - i as u32, i as u32], c,
                )).unwrap();
            }
            prop_assume!(!p.is_zero());
            let form = multilinearize(&p).unwrap();
            let pts: Vec<VectorPoint> = xs.into_iter().map(VectorPoint::new).collect();
            let mut swapped = pts.clone();
            swapped.swap(swap.0, swap.1);
            prop_assert_eq!(
                evaluate_form(&form, &pts).unwrap(),
                evaluate_form(&form, &swapped).unwrap()
            );
        }

        #[test]
        fn iterated_delta_is_order_invariant(
            coeffs in prop::collection::vec(0u64..5, 4),
            ts in prop::collection::vec(prop::collection::vec(0u64..5, 2), 2),
        ) {
            let field = f5();
            let mut p = Polynomial::zero(field.clone(), 2);
            for (i, &c) in coeffs.iter().enumerate() {
                p = p.add(&Polynomial::monomial(
                    field.clone(), 2, vec![3 - i as u32, i as u32], c,
                )).unwrap();
            }
            let table = p.value_table().unwrap();
            let fwd: Vec<VectorPoint> = ts.iter().cloned().map(VectorPoint::new).collect();
            let rev: Vec<VectorPoint> = ts.iter().rev().cloned().map(VectorPoint::new).collect();
            prop_assert_eq!(
                iterated_delta(&table, &fwd).unwrap().values().to_vec(),
                iterated_delta(&table, &rev).unwrap().values().to_vec()
            );
        }
    }
}
