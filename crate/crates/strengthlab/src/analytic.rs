//! Exact bias and Gowers-norm computation through character-count vectors.
//!
//! Every character sum is carried as an integer tally of how often the
//! function hits each residue mod p; the complex average against the additive
//! character is taken only at the presentation boundary, with a stated float
//! error bound. This keeps the identities between the direct and the
//! recursive Gowers enumerations testable as exact integer-vector equalities.

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{multilinearize, MultilinearForm};
use crate::error::{Error, Result};
use crate::poly::{Polynomial, ValueTable, VectorPoint};

/// Default enumeration budget: 10^10 tuple evaluations.
pub const DEFAULT_TUPLE_BUDGET: u64 = 10_000_000_000;

// ---------------------------------------------------------------------------
// Count vectors
// ---------------------------------------------------------------------------

/// Exact tally of how often a function hits each residue mod p: the lossless
/// representation behind every character average in this module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterCountVector {
    p: u64,
    counts: Vec<u64>,
    total: u64,
}

impl CharacterCountVector {
    pub fn new(p: u64, counts: Vec<u64>) -> Self {
        debug_assert_eq!(counts.len(), p as usize);
        let total = counts.iter().sum();
        CharacterCountVector { p, counts, total }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// counts_j == counts_{p-j} for all j; holds for every Gowers-norm tally,
    /// which is why the imaginary parts cancel there.
    pub fn is_conjugate_symmetric(&self) -> bool {
        (1..self.p as usize).all(|j| self.counts[j] == self.counts[self.p as usize - j])
    }

    /// Real part of the character average: sum_j counts_j cos(2 pi j / p)
    /// divided by the total. Returns (value, absolute error bound).
    pub fn real_average(&self) -> (f64, f64) {
        let cos = cos_table(self.p);
        let mut acc = 0.0f64;
        for (j, &c) in self.counts.iter().enumerate() {
            acc += c as f64 * cos[j];
        }
        let value = acc / self.total.max(1) as f64;
        (value, self.float_error_bound())
    }

    /// Magnitude of the complex character average |E psi| with error bound.
    pub fn magnitude(&self) -> (f64, f64) {
        let p = self.p as usize;
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for (j, &c) in self.counts.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / p as f64;
            re += c as f64 * theta.cos();
            im += c as f64 * theta.sin();
        }
        let t = self.total.max(1) as f64;
        let value = (re / t).hypot(im / t);
        (value, 3.0 * self.float_error_bound())
    }

    fn float_error_bound(&self) -> f64 {
        // One table-entry error of at most 2^-48 amortized over the weights,
        // plus a rounding per accumulated term.
        2.0f64.powi(-48) + (self.p as f64 + 1.0) * 2.0f64.powi(-52)
    }
}

fn cos_table(p: u64) -> Vec<f64> {
    (0..p)
        .map(|j| (2.0 * std::f64::consts::PI * j as f64 / p as f64).cos())
        .collect()
}

/// counts_j = #{x : F(x) = j} after tracing values down to F_p.
pub fn bias_counts(table: &ValueTable) -> CharacterCountVector {
    let p = table.field().p();
    let mut counts = vec![0u64; p as usize];
    for v in table.traced_values() {
        counts[v as usize] += 1;
    }
    CharacterCountVector::new(p, counts)
}

// ---------------------------------------------------------------------------
// Gowers norms
// ---------------------------------------------------------------------------

/// The m-th Gowers tally of a function: the exact count vector of the m-fold
/// difference over all (v, v_1, ..., v_m), its real average (which equals
/// the 2^m-th power of the norm), and the float error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct NormValue {
    pub m: u32,
    pub counts: CharacterCountVector,
    pub value: f64,
    pub error_bound: f64,
}

impl NormValue {
    fn from_counts(m: u32, counts: CharacterCountVector) -> Self {
        let (value, error_bound) = counts.real_average();
        debug_assert!(value >= -error_bound, "Gowers averages are nonnegative");
        NormValue {
            m,
            counts,
            value,
            error_bound,
        }
    }

    /// The norm itself, value^(1/2^m), clamped below at 0.
    pub fn norm(&self) -> f64 {
        self.value.max(0.0).powf(1.0 / 2f64.powi(self.m as i32))
    }

    pub fn to_json_repr(&self) -> NormValueJson {
        NormValueJson {
            m: self.m,
            counts: self.counts.counts().to_vec(),
            total: self.counts.total(),
            value: self.value,
            error_bound: self.error_bound,
        }
    }
}

/// { "m": 2, "counts": [...], "total": 125, "value": 0.2, "error_bound": ... }
#[derive(Debug, Clone, Serialize)]
pub struct NormValueJson {
    pub m: u32,
    pub counts: Vec<u64>,
    pub total: u64,
    pub value: f64,
    pub error_bound: f64,
}

fn check_tuple_budget(size: u64, m: u32, budget: u64) -> Result<()> {
    let required = (size as u128)
        .checked_pow(m + 1)
        .unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget,
        });
    }
    Ok(())
}

/// Direct enumeration of the defining sum: the exact count vector of
/// Delta_{v_m} ... Delta_{v_1} F(v) over all q^{n(m+1)} tuples.
pub fn gowers_norm(table: &ValueTable, m: u32, budget: u64) -> Result<NormValue> {
    if m < 1 {
        return Err(Error::InvalidInput("Gowers norm needs m >= 1".into()));
    }
    let size = table.len() as u64;
    check_tuple_budget(size, m, budget)?;
    let p = table.field().p();
    let digits = table.n() as u32 * table.field().s();
    let values = table.traced_values();
    let counts = gowers_counts_par(&values, p, digits, m);
    Ok(NormValue::from_counts(
        m,
        CharacterCountVector::new(p, counts),
    ))
}

/// out[v] = F(v + t) - F(v) mod p on a traced table, with the point group
/// walked as an odometer so no division appears in the inner loop.
fn delta_table_mod_p(values: &[u32], p: u64, digits: u32, t: u64) -> Vec<u32> {
    let size = values.len();
    let p32 = p as u32;
    let mut t_digits = vec![0u32; digits as usize];
    let mut places = vec![0u64; digits as usize];
    {
        let mut rest = t;
        let mut place = 1u64;
        for k in 0..digits as usize {
            t_digits[k] = (rest % p) as u32;
            places[k] = place;
            rest /= p;
            place *= p;
        }
    }
    let mut out = vec![0u32; size];
    let mut vd = vec![0u32; digits as usize]; // digits of v
    let mut wd = t_digits.clone(); // digits of w = v + t
    let mut w = t as usize;
    for v in 0..size {
        let a = values[w];
        let b = values[v];
        out[v] = if a >= b { a - b } else { a + p32 - b };
        if v + 1 == size {
            break;
        }
        // increment v (with carries); w's digit k always steps cyclically
        for k in 0..digits as usize {
            if wd[k] + 1 == p32 {
                wd[k] = 0;
                w -= ((p - 1) * places[k]) as usize;
            } else {
                wd[k] += 1;
                w += places[k] as usize;
            }
            vd[k] += 1;
            if vd[k] < p32 {
                break;
            }
            vd[k] = 0;
        }
    }
    out
}

fn u1_counts(values: &[u32], p: u64) -> Vec<u64> {
    // Tally of F(w) - F(v) over all ordered pairs: the autocorrelation of the
    // value histogram. (v, t) -> (v, v + t) is a bijection of pairs.
    let mut hist = vec![0u64; p as usize];
    for &v in values {
        hist[v as usize] += 1;
    }
    let p = p as usize;
    let mut counts = vec![0u64; p];
    for (k, c) in counts.iter_mut().enumerate() {
        for a in 0..p {
            *c += hist[a] * hist[(a + k) % p];
        }
    }
    counts
}

fn gowers_counts_seq(values: &[u32], p: u64, digits: u32, m: u32) -> Vec<u64> {
    if m == 1 {
        return u1_counts(values, p);
    }
    let size = values.len() as u64;
    let mut counts = vec![0u64; p as usize];
    for t in 0..size {
        let g = delta_table_mod_p(values, p, digits, t);
        let inner = gowers_counts_seq(&g, p, digits, m - 1);
        for (c, i) in counts.iter_mut().zip(inner) {
            *c += i;
        }
    }
    counts
}

fn gowers_counts_par(values: &[u32], p: u64, digits: u32, m: u32) -> Vec<u64> {
    if m == 1 {
        return u1_counts(values, p);
    }
    // Partition the outermost direction across workers; the reduction is
    // componentwise integer addition, so the tally is independent of the
    // worker count and schedule.
    (0..values.len() as u64)
        .into_par_iter()
        .map(|t| {
            let g = delta_table_mod_p(values, p, digits, t);
            gowers_counts_seq(&g, p, digits, m - 1)
        })
        .reduce(
            || vec![0u64; p as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// The same sum grouped by the outermost direction: the count vector of
/// ||psi(Delta_t P)||_{U_{m-1}} accumulated over all t, with Delta_t P
/// computed symbolically and re-tabulated. Identical to `gowers_norm` as an
/// integer vector.
pub fn gowers_recursive(p: &Polynomial, m: u32, budget: u64) -> Result<NormValue> {
    if m < 1 {
        return Err(Error::InvalidInput("Gowers norm needs m >= 1".into()));
    }
    let size = (p.field().q() as u128).pow(p.n() as u32);
    if size > u64::MAX as u128 {
        return Err(Error::BudgetExceeded {
            required: size,
            budget,
        });
    }
    check_tuple_budget(size as u64, m, budget)?;
    let field = p.field().clone();
    let char_p = field.p();
    let digits = p.n() as u32 * field.s();
    let n = p.n();
    let counts = (0..size as u64)
        .into_par_iter()
        .map(|t_idx| {
            let t = VectorPoint::decode(&field, n, t_idx);
            let dp = p.delta(&t).expect("direction has the right dimension");
            let table = dp
                .value_table_capped(u64::MAX)
                .expect("size checked against the budget");
            let values = table.traced_values();
            if m == 1 {
                let mut h = vec![0u64; char_p as usize];
                for v in values {
                    h[v as usize] += 1;
                }
                h
            } else {
                gowers_counts_seq(&values, char_p, digits, m - 1)
            }
        })
        .reduce(
            || vec![0u64; char_p as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(NormValue::from_counts(
        m,
        CharacterCountVector::new(char_p, counts),
    ))
}

// ---------------------------------------------------------------------------
// Exact rational biases
// ---------------------------------------------------------------------------

/// Reduced fraction with nonnegative numerator; exact values of multilinear
/// biases and top-degree Gowers powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        if num == 0 {
            return Rational { num: 0, den: 1 };
        }
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn one() -> Self {
        Rational { num: 1, den: 1 }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Exact bias E psi(M) of a multilinear form on V^d over a prime field.
/// Character orthogonality turns the average over the last slot into the
/// indicator that the last-slot linear form vanishes identically, so the
/// bias is the exact fraction of (d-1)-tuples with that property.
pub fn multilinear_bias(form: &MultilinearForm, budget: u64) -> Result<Rational> {
    if form.field().s() != 1 {
        return Err(Error::InvalidInput(
            "multilinear bias requires a prime field".into(),
        ));
    }
    let field = form.field().clone();
    let q = field.q();
    let n = form.n();
    let d = form.slots();
    let tuples = (q as u128).checked_pow((n * (d - 1)) as u32).unwrap_or(u128::MAX);
    if tuples > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: tuples,
            budget,
        });
    }
    let tuples = tuples as u64;
    if form.is_zero() {
        return Ok(Rational::one());
    }
    // Precompute the distinct slot assignments of every stored index tuple.
    let expanded: Vec<(Vec<Vec<u32>>, u64)> = form
        .coeffs()
        .map(|(key, c)| {
            let mut perms = Vec::new();
            distinct_permutations(key, &mut perms);
            (perms, c)
        })
        .collect();
    let count: u64 = (0..tuples)
        .into_par_iter()
        .map(|idx| {
            // Decode the (d-1) prefix points.
            let mut rest = idx;
            let prefix_size = q.pow(n as u32);
            let mut prefix: Vec<VectorPoint> = Vec::with_capacity(d - 1);
            for _ in 0..d - 1 {
                prefix.push(VectorPoint::decode(&field, n, rest % prefix_size));
                rest /= prefix_size;
            }
            // Coefficients of the last-slot linear form.
            let mut coeffs = vec![0u64; n];
            for (perms, c) in &expanded {
                for perm in perms {
                    let mut prod = *c;
                    for (slot, &var) in perm[..d - 1].iter().enumerate() {
                        prod = field.mul(prod, prefix[slot].coords()[var as usize]);
                        if prod == 0 {
                            break;
                        }
                    }
                    if prod != 0 {
                        let last = perm[d - 1] as usize;
                        coeffs[last] = field.add(coeffs[last], prod);
                    }
                }
            }
            u64::from(coeffs.iter().all(|&c| c == 0))
        })
        .sum();
    Ok(Rational::new(count, tuples))
}

fn distinct_permutations(sorted: &[u32], out: &mut Vec<Vec<u32>>) {
    let mut perm = sorted.to_vec();
    loop {
        out.push(perm.clone());
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

/// Exact rational value of ||psi(P)||_{U_d}^{2^d} for P of degree at most d:
/// the d-fold difference of P is the constant multilinearization of the top
/// part, so the norm power is exactly the bias of that form.
pub fn gowers_top_exact(p: &Polynomial, declared_d: Option<u32>, budget: u64) -> Result<Rational> {
    let d = match declared_d.or_else(|| p.degree()) {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::InvalidInput(
                "declare a degree d >= 1 for the zero polynomial".into(),
            ))
        }
    };
    if let Some(actual) = p.degree() {
        if actual > d {
            return Err(Error::WrongDegree {
                expected: d,
                got: actual,
            });
        }
    }
    p.field().factorial(d)?;
    let top = p.homogeneous_part(d);
    if top.is_zero() {
        return Ok(Rational::one());
    }
    let form = multilinearize(&top)?;
    multilinear_bias(&form, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::evaluate_form;
    use crate::field::Field;
    use crate::poly::{all_points, parse};

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn parse5(text: &str, n: usize) -> Polynomial {
        parse(text, &f5(), n).unwrap()
    }

    const B: u64 = DEFAULT_TUPLE_BUDGET;

    #[test]
    fn bias_counts_examples() {
        // F == 0 on V: everything lands on residue 0, bias magnitude 1.
        let z = Polynomial::zero(f5(), 2);
        let counts = bias_counts(&z.value_table().unwrap());
        assert_eq!(counts.counts(), &[25, 0, 0, 0, 0]);
        let (mag, err) = counts.magnitude();
        assert!((mag - 1.0).abs() <= err);

        // F(x) = x on F_5: uniform counts, bias 0.
        let x = parse5("x1", 1);
        let counts = bias_counts(&x.value_table().unwrap());
        assert_eq!(counts.counts(), &[1, 1, 1, 1, 1]);
        let (mag, err) = counts.magnitude();
        assert!(mag.abs() <= err + 1e-12);

        // F(x, y) = xy on F_5^2: bias 1/5.
        let xy = parse5("x1*x2", 2);
        let counts = bias_counts(&xy.value_table().unwrap());
        assert_eq!(counts.counts(), &[9, 4, 4, 4, 4]);
        let (mag, err) = counts.magnitude();
        assert!((mag - 0.2).abs() <= err + 1e-12);
    }

    #[test]
    fn gowers_norm_of_constant_is_one() {
        let c = Polynomial::constant(f5(), 1, 3);
        for m in 1..=3 {
            let nv = gowers_norm(&c.value_table().unwrap(), m, B).unwrap();
            assert_eq!(nv.counts.counts()[0], nv.counts.total());
            assert_eq!(nv.value, 1.0);
        }
    }

    #[test]
    fn gowers_norm_degenerate_degree_is_exactly_one() {
        // Degree <= m-1 is annihilated by m differences.
        let p = parse5("2*x1 + x2 + 3", 2);
        let nv = gowers_norm(&p.value_table().unwrap(), 2, B).unwrap();
        assert_eq!(nv.counts.counts()[0], nv.counts.total());
        assert_eq!(nv.value, 1.0);
    }

    #[test]
    fn gowers_norm_of_square_u2() {
        // Delta-Delta of x^2 is 2 h1 h2: residue 0 hit 45 times of 125,
        // every other residue 20 times, so the U_2 fourth power is 1/5.
        let p = parse5("x1^2", 1);
        let nv = gowers_norm(&p.value_table().unwrap(), 2, B).unwrap();
        assert_eq!(nv.counts.counts(), &[45, 20, 20, 20, 20]);
        assert_eq!(nv.counts.total(), 125);
        assert!((nv.value - 0.2).abs() <= nv.error_bound);
        assert!((nv.norm() - 0.2f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn gowers_budget_exceeded_reports_required() {
        let p = parse5("x1^2", 1);
        match gowers_norm(&p.value_table().unwrap(), 3, 100) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 625);
                assert_eq!(budget, 100);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn recursive_matches_direct_exactly() {
        for text in ["x1^2", "x1^2 + 3*x1"] {
            let p = parse5(text, 1);
            let direct = gowers_norm(&p.value_table().unwrap(), 2, B).unwrap();
            let rec = gowers_recursive(&p, 2, B).unwrap();
            assert_eq!(direct.counts, rec.counts, "count vectors for {text}");
        }
        let p = parse5("x1^2*x2 + x2^3", 2);
        let direct = gowers_norm(&p.value_table().unwrap(), 3, B).unwrap();
        let rec = gowers_recursive(&p, 3, B).unwrap();
        assert_eq!(direct.counts, rec.counts);
    }

    #[test]
    fn recursive_u1_is_squared_bias() {
        let p = parse5("x1^2 + 2*x1", 1);
        let rec = gowers_recursive(&p, 1, B).unwrap();
        let (bias, _) = bias_counts(&p.value_table().unwrap()).magnitude();
        assert!((rec.value - bias * bias).abs() < 1e-9);
    }

    #[test]
    fn phase_invariance_under_low_degree_shifts() {
        let p = parse5("x1^3 + x1*x2^2", 2);
        let q = parse5("3*x1*x2 + x2 + 4", 2); // degree 2 <= m - 1
        let sum = p.add(&q).unwrap();
        let a = gowers_norm(&p.value_table().unwrap(), 3, B).unwrap();
        let b = gowers_norm(&sum.value_table().unwrap(), 3, B).unwrap();
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn gowers_monotone_in_m() {
        let p = parse5("x1^2 + x1", 1);
        let t = p.value_table().unwrap();
        let n1 = gowers_norm(&t, 1, B).unwrap().norm();
        let n2 = gowers_norm(&t, 2, B).unwrap().norm();
        let n3 = gowers_norm(&t, 3, B).unwrap().norm();
        assert!(n1 <= n2 + 1e-9);
        assert!(n2 <= n3 + 1e-9);
    }

    #[test]
    fn gowers_over_extension_field() {
        // Over F_25 the values are traced down to F_5 first; the point group
        // is walked as 2n base-5 digits. A linear function still has U_2
        // exactly 1, and the direct/recursive identity holds verbatim.
        let fq = Field::extension(5, 2).unwrap();
        let x = parse("x1", &fq, 1).unwrap();
        let nv = gowers_norm(&x.value_table().unwrap(), 2, B).unwrap();
        assert_eq!(nv.counts.counts()[0], nv.counts.total());
        assert_eq!(nv.counts.total(), 25u64.pow(3));
        assert_eq!(nv.value, 1.0);

        let sq = parse("x1^2 + 2*x1", &fq, 1).unwrap();
        let direct = gowers_norm(&sq.value_table().unwrap(), 2, B).unwrap();
        let rec = gowers_recursive(&sq, 2, B).unwrap();
        assert_eq!(direct.counts, rec.counts);
        // A nonzero quadratic over F_q has |E psi|^4-style mass below 1.
        assert!(direct.value < 1.0);
    }

    #[test]
    fn gowers_counts_are_conjugate_symmetric() {
        let p = parse5("x1^3 + 2*x1^2*x2", 2);
        let nv = gowers_norm(&p.value_table().unwrap(), 2, B).unwrap();
        assert!(nv.counts.is_conjugate_symmetric());
    }

    #[test]
    fn multilinear_bias_examples() {
        // M = xy (d = 2, n = 1): the last-slot form vanishes iff x = 0, 1/5.
        let form =
            MultilinearForm::from_coeffs(f5(), 2, 1, &[(vec![0, 0], 1)]).unwrap();
        assert_eq!(multilinear_bias(&form, B).unwrap(), Rational::new(1, 5));

        // The square's form 2ab on V = F_5: also 1/5.
        let form = multilinearize(&parse5("x1^2", 1)).unwrap();
        assert_eq!(multilinear_bias(&form, B).unwrap(), Rational::new(1, 5));

        // Rank-1 cubic form c*xyz, nonzero linear factors: Pr[xy = 0] = 9/25.
        for c in 1..5 {
            let form =
                MultilinearForm::from_coeffs(f5(), 3, 1, &[(vec![0, 0, 0], c)]).unwrap();
            assert_eq!(multilinear_bias(&form, B).unwrap(), Rational::new(9, 25));
        }

        // multilinearize(x1*x2) lives on V = F_5^2; its bias is 1/25.
        let form = multilinearize(&parse5("x1*x2", 2)).unwrap();
        assert_eq!(multilinear_bias(&form, B).unwrap(), Rational::new(1, 25));
    }

    #[test]
    fn multilinear_bias_of_zero_form_is_one() {
        let z = Polynomial::zero(f5(), 1);
        assert_eq!(
            gowers_top_exact(&z, Some(3), B).unwrap(),
            Rational::one()
        );
    }

    #[test]
    fn multilinear_bias_matches_full_enumeration() {
        // Independent oracle: enumerate all of V^d and tally psi arguments.
        for text in ["x1^3", "x1^2", "x1^2*x2 + x2^3"] {
            let p = if text.contains("x2") {
                parse5(text, 2)
            } else {
                parse5(text, 1)
            };
            let form = multilinearize(&p).unwrap();
            let field = f5();
            let n = form.n();
            let d = form.slots();
            let point_count = 5u64.pow(n as u32);
            let tuple_count = point_count.pow(d as u32);
            let mut counts = vec![0u64; 5];
            for idx in 0..tuple_count {
                let mut rest = idx;
                let mut pts = Vec::with_capacity(d);
                for _ in 0..d {
                    pts.push(VectorPoint::decode(&field, n, rest % point_count));
                    rest /= point_count;
                }
                counts[evaluate_form(&form, &pts).unwrap() as usize] += 1;
            }
            // Non-vanishing fibers distribute uniformly over residues != 0.
            assert!((2..5).all(|j| counts[j] == counts[1]), "{text}");
            let exact = multilinear_bias(&form, B).unwrap();
            // counts_0 - counts_1 = (bias) * total since sum of the character
            // over a coset is -1/(p-1) of ... : check against the cosine sum.
            let cc = CharacterCountVector::new(5, counts);
            let (avg, err) = cc.real_average();
            assert!((avg - exact.as_f64()).abs() <= err + 1e-12, "{text}");
        }
    }

    #[test]
    fn top_exact_examples() {
        let cube = parse5("x1^3", 1);
        assert_eq!(
            gowers_top_exact(&cube, None, B).unwrap(),
            Rational::new(9, 25)
        );
        let sq = parse5("x1^2", 1);
        assert_eq!(gowers_top_exact(&sq, None, B).unwrap(), Rational::new(1, 5));
    }

    #[test]
    fn top_exact_agrees_with_float_norm() {
        for text in ["x1^3", "x1^2*x2 + x2^3", "x1^3 + x1^2*x2 + 4*x2^3"] {
            let p = parse5(text, 2);
            let d = p.degree().unwrap();
            let exact = gowers_top_exact(&p, None, B).unwrap();
            let float = gowers_norm(&p.value_table().unwrap(), d, B).unwrap();
            assert!(
                (exact.as_f64() - float.value).abs() <= float.error_bound + 1e-9,
                "{text}: exact {exact} vs float {}",
                float.value
            );
        }
    }

    #[test]
    fn value_average_identity_on_all_points() {
        // E_x psi(P(x)) real part from counts equals the cosine-weighted sum
        // computed independently per point.
        let p = parse5("x1^2 + 3*x1", 1);
        let table = p.value_table().unwrap();
        let cc = bias_counts(&table);
        let (avg, err) = cc.real_average();
        let brute: f64 = all_points(&f5(), 1)
            .map(|x| {
                let v = p.evaluate(&x).unwrap();
                (2.0 * std::f64::consts::PI * v as f64 / 5.0).cos()
            })
            .sum::<f64>()
            / 5.0;
        assert!((avg - brute).abs() <= err + 1e-12);
    }

    #[test]
    fn rational_reduction_and_order() {
        assert_eq!(Rational::new(10, 50), Rational::new(1, 5));
        assert_eq!(Rational::new(0, 7), Rational { num: 0, den: 1 });
        assert!(Rational::new(1, 5) < Rational::new(9, 25));
        assert_eq!(
            serde_json::to_string(&Rational::new(9, 25)).unwrap(),
            r#"{"num":9,"den":25}"#
        );
    }
}
