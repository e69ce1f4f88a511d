//! Exact rank (strength) of homogeneous polynomials: the minimal r with
//! P = sum_{i<=r} L_i R_i over factors of positive degree. Decompositions are
//! returned as re-verifiable certificates; a failed search returns an
//! exhaustion record over the degree patterns tried.
//!
//! Factors live in the algebraic closure in principle; the search covers
//! F_p and (when the size cap allows) F_{p^2}, labels every result with the
//! field it searched, and claims only upper-bound semantics for the closure.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ExtensionField, Field};
use crate::poly::{projective_points, MultiIndex, PolyJson, Polynomial, VectorPoint};

/// Default factor-tuple budget for the exhaustive search.
pub const DEFAULT_RANK_BUDGET: u64 = 50_000_000;

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// An explicit decomposition P = sum L_i R_i, with L_i monic in its
/// graded-lex leading term and any scalar absorbed into R_i.
#[derive(Debug, Clone)]
pub struct RankCertificate {
    pub summands: Vec<(Polynomial, Polynomial)>,
    pub field: Field,
}

impl RankCertificate {
    /// Re-verify sum L_i R_i = P by polynomial arithmetic. P is embedded
    /// into the certificate's field first when that field is larger.
    pub fn verify(&self, p: &Polynomial) -> bool {
        let target = match p.embed_into(&self.field) {
            Ok(t) => t,
            Err(_) => return false,
        };
        let mut acc = Polynomial::zero(self.field.clone(), target.n());
        for (l, r) in &self.summands {
            let prod = match l.mul(r) {
                Ok(prod) => prod,
                Err(_) => return false,
            };
            acc = match acc.add(&prod) {
                Ok(acc) => acc,
                Err(_) => return false,
            };
        }
        acc == target
    }
}

/// Witness that no decomposition with at most `rank_gt` summands exists over
/// the searched fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustionRecord {
    pub patterns: Vec<(u32, u32)>,
    pub tuples_searched: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankValue {
    Exact(u32),
    GreaterThan(u32),
}

#[derive(Debug, Clone)]
pub struct RankResult {
    pub value: RankValue,
    pub field: Field,
    pub certificate: Option<RankCertificate>,
    pub exhausted: Option<ExhaustionRecord>,
}

impl RankResult {
    fn exact(rank: u32, certificate: RankCertificate) -> Self {
        RankResult {
            field: certificate.field.clone(),
            value: RankValue::Exact(rank),
            certificate: Some(certificate),
            exhausted: None,
        }
    }

    fn zero(field: Field) -> Self {
        RankResult {
            value: RankValue::Exact(0),
            certificate: Some(RankCertificate {
                summands: vec![],
                field: field.clone(),
            }),
            exhausted: None,
            field,
        }
    }

    pub fn rank(&self) -> Option<u32> {
        match self.value {
            RankValue::Exact(r) => Some(r),
            RankValue::GreaterThan(_) => None,
        }
    }

    pub fn to_json_repr(&self) -> RankResultJson {
        match &self.value {
            RankValue::Exact(rank) => RankResultJson::Exact {
                rank: *rank,
                field: FieldJson {
                    p: self.field.p(),
                    s: self.field.s(),
                },
                certificate: self
                    .certificate
                    .as_ref()
                    .map(|c| {
                        c.summands
                            .iter()
                            .map(|(l, r)| SummandJson {
                                l: l.to_json_repr(),
                                r: r.to_json_repr(),
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
            },
            RankValue::GreaterThan(bound) => {
                let ex = self.exhausted.as_ref().expect("bound carries exhaustion");
                RankResultJson::Bounded {
                    rank_gt: *bound,
                    exhausted: ExhaustionJson {
                        patterns: ex.patterns.iter().map(|&(a, b)| [a, b]).collect(),
                        tuples_searched: ex.tuples_searched,
                    },
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldJson {
    pub p: u64,
    pub s: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummandJson {
    #[serde(rename = "L")]
    pub l: PolyJson,
    #[serde(rename = "R")]
    pub r: PolyJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionJson {
    pub patterns: Vec<[u32; 2]>,
    pub tuples_searched: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum RankResultJson {
    Exact {
        rank: u32,
        field: FieldJson,
        certificate: Vec<SummandJson>,
    },
    Bounded {
        rank_gt: u32,
        exhausted: ExhaustionJson,
    },
}

// ---------------------------------------------------------------------------
// Exact linear algebra
// ---------------------------------------------------------------------------

/// Solve a (rows x cols) system over the field, augmented matrix in row-major
/// order (stride cols + 1). Deterministic pivoting: first nonzero in column
/// order; free variables are set to zero. Returns None when inconsistent.
fn solve_linear(field: &Field, rows: usize, cols: usize, a: &mut [u64]) -> Option<Vec<u64>> {
    let stride = cols + 1;
    let mut pivot_row = 0usize;
    let mut pivot_cols: Vec<usize> = Vec::new();
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| a[r * stride + col] != 0) else {
            continue;
        };
        for k in 0..stride {
            a.swap(pivot_row * stride + k, r * stride + k);
        }
        let inv = field.inv(a[pivot_row * stride + col]).unwrap();
        for k in col..stride {
            a[pivot_row * stride + k] = field.mul(a[pivot_row * stride + k], inv);
        }
        for rr in 0..rows {
            if rr == pivot_row || a[rr * stride + col] == 0 {
                continue;
            }
            let factor = a[rr * stride + col];
            for k in col..stride {
                let sub = field.mul(factor, a[pivot_row * stride + k]);
                a[rr * stride + k] = field.sub(a[rr * stride + k], sub);
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    for r in pivot_row..rows {
        if a[r * stride + cols] != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; cols];
    for (k, &col) in pivot_cols.iter().enumerate() {
        x[col] = a[k * stride + cols];
    }
    Some(x)
}

/// Rank of a dense row-major matrix over the field, deterministic pivoting.
pub fn matrix_rank(field: &Field, rows: usize, cols: usize, a: &mut [u64]) -> usize {
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        for k in 0..cols {
            a.swap(pivot_row * cols + k, r * cols + k);
        }
        let inv = field.inv(a[pivot_row * cols + col]).unwrap();
        for k in col..cols {
            a[pivot_row * cols + k] = field.mul(a[pivot_row * cols + k], inv);
        }
        for rr in (pivot_row + 1)..rows {
            let factor = a[rr * cols + col];
            if factor == 0 {
                continue;
            }
            for k in col..cols {
                let sub = field.mul(factor, a[pivot_row * cols + k]);
                a[rr * cols + k] = field.sub(a[rr * cols + k], sub);
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    pivot_row
}

// ---------------------------------------------------------------------------
// Quadratic closed form
// ---------------------------------------------------------------------------

fn sqrt_in(field: &Field, a: u64) -> Option<u64> {
    match field {
        Field::Prime(pm) => pm.sqrt(a),
        Field::Extension(f) => f.sqrt(a),
    }
}

/// The symmetric matrix M with Q(x) = x^T M x (char != 2).
pub fn symmetric_matrix(q: &Polynomial) -> Result<Vec<u64>> {
    let field = q.field();
    if field.p() == 2 {
        return Err(Error::CharTwo);
    }
    let n = q.n();
    let inv2 = field.inv(field.embed(2))?;
    let mut m = vec![0u64; n * n];
    for (mono, c) in q.terms() {
        let vars: Vec<usize> = mono
            .exps()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect();
        match vars.as_slice() {
            [i] => m[i * n + i] = c,
            [i, j] => {
                let half = field.mul(c, inv2);
                m[i * n + j] = half;
                m[j * n + i] = half;
            }
            _ => unreachable!("quadratic monomials touch at most two variables"),
        }
    }
    Ok(m)
}

/// Rank of a homogeneous quadratic via the closed form ceil(rank(M_Q) / 2):
/// peel hyperbolic product summands and completed squares off the form, then
/// combine the diagonal squares pairwise into products, moving to the
/// quadratic extension when the needed square root is missing; a leftover odd
/// square becomes the summand (y, a*y).
pub fn quadratic_rank(q: &Polynomial) -> Result<RankResult> {
    let field = q.field().clone();
    if field.p() == 2 {
        return Err(Error::CharTwo);
    }
    if q.is_zero() {
        return Ok(RankResult::zero(field));
    }
    let d = q.degree().unwrap();
    if d != 2 {
        return Err(Error::WrongDegree {
            expected: 2,
            got: d,
        });
    }
    if !q.is_homogeneous(2) {
        return Err(Error::NotHomogeneous { expected: 2 });
    }
    let n = q.n();
    let coeff_at = |poly: &Polynomial, i: usize, j: usize| {
        let mut e = vec![0u32; n];
        e[i] += 1;
        e[j] += 1;
        poly.coeff(&MultiIndex::new(e))
    };
    let var = |i: usize, c: u64| {
        let mut e = vec![0u32; n];
        e[i] = 1;
        Polynomial::monomial(field.clone(), n, e, c)
    };

    let mut rest = q.clone();
    let mut hyperbolic: Vec<(Polynomial, Polynomial)> = Vec::new();
    let mut diag: Vec<(u64, Polynomial)> = Vec::new();

    while !rest.is_zero() {
        if let Some((i, a)) = (0..n).find_map(|i| {
            let c = coeff_at(&rest, i, i);
            (c != 0).then_some((i, c))
        }) {
            // Complete the square on x_i: y = x_i + (1/2a) sum_{j != i} c_ij x_j.
            let inv_2a = field.inv(field.mul(field.embed(2), a))?;
            let mut y = var(i, 1);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let c = coeff_at(&rest, i, j);
                if c != 0 {
                    y = y.add(&var(j, field.mul(inv_2a, c)))?;
                }
            }
            rest = rest.sub(&y.mul(&y)?.scale(a))?;
            diag.push((a, y));
        } else {
            // No squares left: the lex-first surviving cross term heads a
            // hyperbolic block, which peels off as one product summand:
            // b x_i x_j + x_i A + x_j B = (x_i + B/b)(b x_j + A) - AB/b.
            let (i, j, b) = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .find_map(|(i, j)| {
                    let c = coeff_at(&rest, i, j);
                    (c != 0).then_some((i, j, c))
                })
                .expect("a nonzero quadratic with no squares has a cross term");
            let inv_b = field.inv(b)?;
            let mut u = var(i, 1);
            let mut w = var(j, b);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let cjk = coeff_at(&rest, j, k);
                if cjk != 0 {
                    u = u.add(&var(k, field.mul(inv_b, cjk)))?;
                }
                let cik = coeff_at(&rest, i, k);
                if cik != 0 {
                    w = w.add(&var(k, cik))?;
                }
            }
            rest = rest.sub(&u.mul(&w)?)?;
            hyperbolic.push((u, w));
        }
    }

    let value = hyperbolic.len() as u32 + (diag.len() as u32).div_ceil(2);

    // Does any diagonal pair need the quadratic extension to split?
    let mut needs_ext = false;
    for pair in diag.chunks_exact(2) {
        let v = field.neg(field.mul(pair[1].0, field.inv(pair[0].0)?));
        if sqrt_in(&field, v).is_none() {
            needs_ext = true;
        }
    }
    let cert_field = if needs_ext {
        Field::extension(field.p(), 2 * field.s())?
    } else {
        field.clone()
    };
    let lift = |p: &Polynomial| lift_poly(p, &field, &cert_field);

    let mut summands: Vec<(Polynomial, Polynomial)> =
        hyperbolic.iter().map(|(l, r)| (lift(l), lift(r))).collect();
    let mut chunks = diag.chunks_exact(2);
    for pair in chunks.by_ref() {
        let a1 = lift_scalar(pair[0].0, &field, &cert_field);
        let a2 = lift_scalar(pair[1].0, &field, &cert_field);
        let y1 = lift(&pair[0].1);
        let y2 = lift(&pair[1].1);
        let v = cert_field.neg(cert_field.mul(a2, cert_field.inv(a1)?));
        let beta = sqrt_in(&cert_field, v).expect("the quadratic extension has the root");
        // a1 y1^2 + a2 y2^2 = a1 (y1 + beta y2)(y1 - beta y2)
        let l = y1.add(&y2.scale(beta))?;
        let r = y1.sub(&y2.scale(beta))?.scale(a1);
        summands.push((l, r));
    }
    if let [(a, y)] = chunks.remainder() {
        let yl = lift(y);
        summands.push((yl.clone(), yl.scale(lift_scalar(*a, &field, &cert_field))));
    }

    let summands = normalize_summands(summands, &cert_field)?;
    let certificate = RankCertificate {
        summands,
        field: cert_field,
    };
    debug_assert!(certificate.verify(q));
    Ok(RankResult::exact(value, certificate))
}

/// Make every L monic in its graded-lex leading term, absorbing the scalar
/// into R.
fn normalize_summands(
    summands: Vec<(Polynomial, Polynomial)>,
    field: &Field,
) -> Result<Vec<(Polynomial, Polynomial)>> {
    summands
        .into_iter()
        .map(|(l, r)| {
            let lead = l.coeff(l.leading_monomial().expect("factors are nonzero"));
            let inv = field.inv(lead)?;
            Ok((l.scale(inv), r.scale(lead)))
        })
        .collect()
}

/// Map an element across a lift F_{p^s} -> F_{p^{2s}} (or the identity).
/// Prime constants keep their encoding; extension elements are re-expressed
/// through the smallest root of the source modulus inside the target.
fn lift_scalar(a: u64, src: &Field, dst: &Field) -> u64 {
    if src == dst {
        return a;
    }
    match (src, dst) {
        (Field::Prime(_), _) => a,
        (Field::Extension(sf), Field::Extension(df)) => {
            let rho = embedding_root(sf, df);
            let mut acc = 0u64;
            let mut pow = 1u64;
            for &c in &sf.decode(a).coeffs {
                acc = df.add(acc, df.mul(c, pow));
                pow = df.mul(pow, rho);
            }
            acc
        }
        _ => unreachable!("lifts never shrink the field"),
    }
}

fn lift_poly(p: &Polynomial, src: &Field, dst: &Field) -> Polynomial {
    if src == dst {
        return p.clone();
    }
    if src.s() == 1 {
        return p.embed_into(dst).unwrap();
    }
    let mut out = Polynomial::zero(dst.clone(), p.n());
    for (m, c) in p.terms() {
        out = out
            .add(&Polynomial::monomial(
                dst.clone(),
                p.n(),
                m.exps().to_vec(),
                lift_scalar(c, src, dst),
            ))
            .unwrap();
    }
    out
}

/// Smallest root (by encoding) of the source modulus inside the target field.
fn embedding_root(src: &ExtensionField, dst: &ExtensionField) -> u64 {
    let modulus = src.modulus_poly();
    for cand in 0..dst.q() {
        let mut acc = 0u64;
        for &c in modulus.iter().rev() {
            acc = dst.add(dst.mul(acc, cand), c);
        }
        if acc == 0 {
            return cand;
        }
    }
    unreachable!("the modulus splits in an extension of degree divisible by s")
}

// ---------------------------------------------------------------------------
// The exhaustive decomposition search
// ---------------------------------------------------------------------------

/// Degree splits (e, d-e) with 1 <= e <= d-e.
pub fn degree_patterns(d: u32) -> Vec<(u32, u32)> {
    (1..=d / 2).map(|e| (e, d - e)).collect()
}

fn monomials_desc(n: usize, e: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, e: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == n - 1 {
            prefix.push(e);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in 0..=e {
            prefix.push(v);
            rec(n, e - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, e, &mut Vec::new(), &mut out);
    out.sort();
    out.reverse();
    out
}

/// Number of monic-leading (first nonzero coefficient = 1) degree-e forms:
/// one representative per projective class, (q^M - 1) / (q - 1).
fn monic_form_count(q: u64, num_monomials: usize) -> u128 {
    let mut total = 0u128;
    let mut power = 1u128;
    for _ in 0..num_monomials {
        total += power;
        power = power.saturating_mul(q as u128);
    }
    total
}

/// Build the idx-th monic-leading form over the given (graded-lex descending)
/// monomial list: the leading position runs from the largest monomial down,
/// trailing coefficients count up with the smallest monomial fastest.
fn monic_form(field: &Field, n: usize, monos: &[MultiIndex], idx: u64) -> Polynomial {
    let q = field.q();
    let m = monos.len();
    let mut rest = idx as u128;
    let mut lead = 0usize;
    loop {
        let tail_count = (q as u128).pow((m - lead - 1) as u32);
        if rest < tail_count {
            break;
        }
        rest -= tail_count;
        lead += 1;
    }
    let mut poly = Polynomial::monomial(field.clone(), n, monos[lead].exps().to_vec(), 1);
    let mut digits = rest as u64;
    for k in ((lead + 1)..m).rev() {
        let c = digits % q;
        digits /= q;
        if c != 0 {
            poly = poly
                .add(&Polynomial::monomial(
                    field.clone(),
                    n,
                    monos[k].exps().to_vec(),
                    c,
                ))
                .unwrap();
        }
    }
    poly
}

fn binom_u128(m: u128, k: usize) -> u128 {
    if m < k as u128 {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(m - i) / (i + 1);
    }
    acc
}

/// One summand group of a pattern multiset: `count` summands whose L-factor
/// has degree `factor_degree` and whose solved cofactor has degree
/// `cofactor_degree`.
struct SearchGroup {
    count: usize,
    factor_monos: Vec<MultiIndex>,
    cofactor_monos: Vec<MultiIndex>,
    total_candidates: u128,
}

/// A field plus the polynomial embedded into it.
struct Stage {
    field: Field,
    poly: Polynomial,
}

/// Try to decompose `stage.poly` into exactly r summands, over all multisets
/// of r degree patterns. Returns the first certificate in deterministic
/// order; `searched` accumulates the factor tuples visited.
fn try_rank_r(
    stage: &Stage,
    d: u32,
    r: u32,
    budget: u64,
    searched: &mut u64,
    patterns_seen: &mut Vec<(u32, u32)>,
) -> Result<Option<RankCertificate>> {
    if r == 0 {
        return Ok(if stage.poly.is_zero() {
            Some(RankCertificate {
                summands: vec![],
                field: stage.field.clone(),
            })
        } else {
            None
        });
    }
    let field = &stage.field;
    let n = stage.poly.n();
    let patterns = degree_patterns(d);
    let target_monos = monomials_desc(n, d);
    let row_of: BTreeMap<MultiIndex, usize> = target_monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let rows = target_monos.len();

    // Multisets of r patterns: nondecreasing index sequences, lexicographic.
    let mut assignment = vec![0usize; r as usize];
    loop {
        let mut group_counts = vec![0usize; patterns.len()];
        for &a in &assignment {
            group_counts[a] += 1;
        }
        let groups: Vec<SearchGroup> = patterns
            .iter()
            .zip(&group_counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&(e, de), &count)| {
                if !patterns_seen.contains(&(e, de)) {
                    patterns_seen.push((e, de));
                }
                let factor_monos = monomials_desc(n, e);
                let total_candidates = monic_form_count(field.q(), factor_monos.len());
                SearchGroup {
                    count,
                    factor_monos,
                    cofactor_monos: monomials_desc(n, de),
                    total_candidates,
                }
            })
            .collect();

        let block: u128 = groups
            .iter()
            .map(|g| binom_u128(g.total_candidates, g.count))
            .product();
        if *searched as u128 + block > budget as u128 {
            return Err(Error::BudgetExceeded {
                required: *searched as u128 + block,
                budget,
            });
        }

        if let Some(cert) = search_groups(stage, &groups, &row_of, rows, searched)? {
            return Ok(Some(cert));
        }

        // Next nondecreasing assignment.
        let mut k = r as usize;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            if assignment[k] + 1 < patterns.len() {
                let v = assignment[k] + 1;
                for slot in assignment.iter_mut().skip(k) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// Cross product of combinations (one combination of distinct monic factors
/// per group), solving the cofactor system for each tuple. The last group's
/// combination advances fastest.
fn search_groups(
    stage: &Stage,
    groups: &[SearchGroup],
    row_of: &BTreeMap<MultiIndex, usize>,
    rows: usize,
    searched: &mut u64,
) -> Result<Option<RankCertificate>> {
    let field = &stage.field;
    let n = stage.poly.n();
    for g in groups {
        if (g.count as u128) > g.total_candidates {
            return Ok(None);
        }
    }
    let mut combos: Vec<Vec<u64>> = groups
        .iter()
        .map(|g| (0..g.count as u64).collect())
        .collect();

    loop {
        *searched += 1;
        let mut factors: Vec<(usize, Polynomial)> = Vec::new();
        for (gi, combo) in combos.iter().enumerate() {
            for &idx in combo {
                factors.push((gi, monic_form(field, n, &groups[gi].factor_monos, idx)));
            }
        }
        if let Some(summands) = solve_cofactors(stage, groups, &factors, row_of, rows)? {
            let summands = normalize_summands(summands, field)?;
            let cert = RankCertificate {
                summands,
                field: field.clone(),
            };
            debug_assert!(cert.verify(&stage.poly));
            return Ok(Some(cert));
        }

        let mut gi = groups.len();
        loop {
            if gi == 0 {
                return Ok(None);
            }
            gi -= 1;
            if next_combination(&mut combos[gi], groups[gi].total_candidates as u64) {
                break;
            }
            combos[gi] = (0..groups[gi].count as u64).collect();
        }
    }
}

/// Advance an ascending index combination below `total`; false on wrap.
fn next_combination(combo: &mut [u64], total: u64) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        let max_here = total - (k - i) as u64;
        if combo[i] < max_here {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Fix the L_i and solve the linear system sum L_i R_i = P for the cofactor
/// coefficients; any solution yields a certificate.
fn solve_cofactors(
    stage: &Stage,
    groups: &[SearchGroup],
    factors: &[(usize, Polynomial)],
    row_of: &BTreeMap<MultiIndex, usize>,
    rows: usize,
) -> Result<Option<Vec<(Polynomial, Polynomial)>>> {
    let field = &stage.field;
    let n = stage.poly.n();
    let cols: usize = factors
        .iter()
        .map(|&(gi, _)| groups[gi].cofactor_monos.len())
        .sum();
    let stride = cols + 1;
    let mut a = vec![0u64; rows * stride];
    let mut col_base = 0usize;
    for &(gi, ref l) in factors {
        let monos = &groups[gi].cofactor_monos;
        for (k, beta) in monos.iter().enumerate() {
            for (mu, c) in l.terms() {
                let gamma: Vec<u32> = mu
                    .exps()
                    .iter()
                    .zip(beta.exps())
                    .map(|(&x, &y)| x + y)
                    .collect();
                let row = row_of[&MultiIndex::new(gamma)];
                let cell = &mut a[row * stride + col_base + k];
                *cell = field.add(*cell, c);
            }
        }
        col_base += monos.len();
    }
    for (m, c) in stage.poly.terms() {
        a[row_of[m] * stride + cols] = c;
    }
    let Some(x) = solve_linear(field, rows, cols, &mut a) else {
        return Ok(None);
    };
    let mut out = Vec::with_capacity(factors.len());
    let mut col_base = 0usize;
    for &(gi, ref l) in factors {
        let monos = &groups[gi].cofactor_monos;
        let mut r = Polynomial::zero(field.clone(), n);
        for (k, beta) in monos.iter().enumerate() {
            let c = x[col_base + k];
            if c != 0 {
                r = r.add(&Polynomial::monomial(
                    field.clone(),
                    n,
                    beta.exps().to_vec(),
                    c,
                ))?;
            }
        }
        col_base += monos.len();
        if r.is_zero() {
            // A zero cofactor would mean a decomposition with fewer summands,
            // which earlier iterations already ruled out.
            return Ok(None);
        }
        out.push((l.clone(), r));
    }
    Ok(Some(out))
}

/// Iterate r = 0, 1, ..., r_max; at each r search the base field first and
/// then (when available under the size cap) F_{p^2}, so the returned value is
/// the minimum over the searched extensions. Inputs already over an extension
/// search that field only.
pub fn exhaustive_rank(p: &Polynomial, r_max: u32, budget: u64) -> Result<RankResult> {
    let d = match p.degree() {
        None => return Ok(RankResult::zero(p.field().clone())),
        Some(d) => d,
    };
    if !p.is_homogeneous(d) {
        return Err(Error::NotHomogeneous { expected: d });
    }
    let stages = search_stages(p);
    let mut searched = 0u64;
    let mut patterns_seen: Vec<(u32, u32)> = Vec::new();
    for r in 1..=r_max {
        for stage in &stages {
            if let Some(cert) = try_rank_r(stage, d, r, budget, &mut searched, &mut patterns_seen)?
            {
                return Ok(RankResult::exact(r, cert));
            }
        }
    }
    patterns_seen.sort();
    Ok(RankResult {
        value: RankValue::GreaterThan(r_max),
        field: p.field().clone(),
        certificate: None,
        exhausted: Some(ExhaustionRecord {
            patterns: patterns_seen,
            tuples_searched: searched,
        }),
    })
}

fn search_stages(p: &Polynomial) -> Vec<Stage> {
    let mut stages = vec![Stage {
        field: p.field().clone(),
        poly: p.clone(),
    }];
    if p.field().s() == 1 {
        // Quietly unavailable above the extension size cap: the base field
        // is then the only stage, and the result stays labeled with it.
        if let Ok(ext) = Field::extension(p.field().p(), 2) {
            stages.push(Stage {
                poly: p.embed_into(&ext).unwrap(),
                field: ext,
            });
        }
    }
    stages
}

/// Rank of the declared top homogeneous part: the quadratic closed form at
/// d = 2, the exhaustive search at d >= 3 (r_max = n always suffices over
/// the base field, so the result is exact).
pub fn rank(p: &Polynomial, declared_d: u32, budget: u64) -> Result<RankResult> {
    if declared_d <= 1 {
        return Err(Error::DegreeTooSmall);
    }
    if p.field().p() <= declared_d as u64 {
        return Err(Error::CharTooSmall {
            p: p.field().p(),
            degree: declared_d,
        });
    }
    if let Some(actual) = p.degree() {
        if actual > declared_d {
            return Err(Error::WrongDegree {
                expected: declared_d,
                got: actual,
            });
        }
    }
    let top = p.homogeneous_part(declared_d);
    if top.is_zero() {
        return Ok(RankResult::zero(p.field().clone()));
    }
    if declared_d == 2 {
        quadratic_rank(&top)
    } else {
        exhaustive_rank(&top, p.n() as u32, budget)
    }
}

/// Exhaustive search over F_{p^s} only (s = 1 is the plain base-field
/// search); the value is monotone nonincreasing in s along divisibility.
pub fn rank_over_extension(p: &Polynomial, s: u32, budget: u64) -> Result<RankResult> {
    if p.field().s() != 1 {
        return Err(Error::InvalidInput(
            "rank_over_extension starts from a prime-field polynomial".into(),
        ));
    }
    let d = match p.degree() {
        None => return Ok(RankResult::zero(p.field().clone())),
        Some(d) => d,
    };
    if !p.is_homogeneous(d) {
        return Err(Error::NotHomogeneous { expected: d });
    }
    let field = Field::extension(p.field().p(), s)?;
    let stage = Stage {
        poly: p.embed_into(&field)?,
        field,
    };
    let mut searched = 0u64;
    let mut patterns_seen = Vec::new();
    let r_max = p.n() as u32;
    for r in 1..=r_max {
        if let Some(cert) = try_rank_r(&stage, d, r, budget, &mut searched, &mut patterns_seen)? {
            return Ok(RankResult::exact(r, cert));
        }
    }
    patterns_seen.sort();
    Ok(RankResult {
        value: RankValue::GreaterThan(r_max),
        field: stage.field,
        certificate: None,
        exhausted: Some(ExhaustionRecord {
            patterns: patterns_seen,
            tuples_searched: searched,
        }),
    })
}

// ---------------------------------------------------------------------------
// Derivative-rank profiles
// ---------------------------------------------------------------------------

/// The map t -> rank(P_t) over projective directions, its maximum, and the
/// directions annihilated by the derivative (recorded as rank 0).
#[derive(Debug, Clone)]
pub struct RankProfile {
    pub max: u32,
    pub directions: Vec<(VectorPoint, u32)>,
    pub zero_directions: Vec<VectorPoint>,
}

impl RankProfile {
    pub fn to_json_repr(&self) -> ProfileJson {
        ProfileJson {
            max: self.max,
            directions: self
                .directions
                .iter()
                .map(|(t, r)| DirectionJson {
                    t: t.coords().to_vec(),
                    rank: *r,
                })
                .collect(),
            zero_directions: self
                .zero_directions
                .iter()
                .map(|t| t.coords().to_vec())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileJson {
    pub max: u32,
    pub directions: Vec<DirectionJson>,
    pub zero_directions: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionJson {
    pub t: Vec<u64>,
    pub rank: u32,
}

/// Rank of every directional derivative P_t over projective directions
/// (one representative per line: P_{lambda t} = lambda P_t has the same
/// rank). Requires homogeneous degree >= 3 so the derivatives have degree
/// >= 2; the zero polynomial profiles to 0 everywhere.
pub fn derivative_rank_profile(p: &Polynomial, budget: u64) -> Result<RankProfile> {
    let n = p.n();
    let dirs = projective_points(p.field(), n);
    if p.is_zero() {
        return Ok(RankProfile {
            max: 0,
            directions: dirs.iter().map(|t| (t.clone(), 0)).collect(),
            zero_directions: dirs,
        });
    }
    let d = p.degree().unwrap();
    if d < 3 {
        return Err(Error::DegreeTooSmall);
    }
    if !p.is_homogeneous(d) {
        return Err(Error::NotHomogeneous { expected: d });
    }
    if p.field().p() <= d as u64 {
        return Err(Error::CharTooSmall {
            p: p.field().p(),
            degree: d,
        });
    }
    let per_direction: Vec<(VectorPoint, u32, bool)> = dirs
        .into_par_iter()
        .map(|t| {
            let pt = p.directional_derivative(&t)?;
            if pt.is_zero() {
                return Ok((t, 0u32, true));
            }
            let result = if d - 1 == 2 {
                quadratic_rank(&pt)?
            } else {
                exhaustive_rank(&pt, n as u32, budget)?
            };
            let r = result
                .rank()
                .expect("r_max = n always yields an exact rank");
            Ok((t, r, false))
        })
        .collect::<Result<Vec<_>>>()?;
    let max = per_direction.iter().map(|&(_, r, _)| r).max().unwrap_or(0);
    Ok(RankProfile {
        max,
        directions: per_direction
            .iter()
            .map(|(t, r, _)| (t.clone(), *r))
            .collect(),
        zero_directions: per_direction
            .into_iter()
            .filter(|&(_, _, z)| z)
            .map(|(t, _, _)| t)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;
    use rand_core::{RngCore, SeedableRng};

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn parse5(text: &str, n: usize) -> Polynomial {
        parse(text, &f5(), n).unwrap()
    }

    const B: u64 = DEFAULT_RANK_BUDGET;

    /// Uniform residue below `p` by rejection sampling on 32-bit words.
    fn draw_mod(rng: &mut rand_chacha::ChaCha12Rng, p: u64) -> u64 {
        let zone = u32::MAX - (u32::MAX % p as u32);
        loop {
            let v = rng.next_u32();
            if v < zone {
                return (v % p as u32) as u64;
            }
        }
    }

    fn random_homogeneous(
        rng: &mut rand_chacha::ChaCha12Rng,
        field: &Field,
        n: usize,
        d: u32,
    ) -> Polynomial {
        loop {
            let mut poly = Polynomial::zero(field.clone(), n);
            for m in monomials_desc(n, d) {
                let c = draw_mod(rng, field.p());
                if c != 0 {
                    poly = poly
                        .add(&Polynomial::monomial(
                            field.clone(),
                            n,
                            m.exps().to_vec(),
                            c,
                        ))
                        .unwrap();
                }
            }
            if !poly.is_zero() {
                return poly;
            }
        }
    }

    #[test]
    fn quadratic_examples() {
        // x1 x2: already a product.
        let r = quadratic_rank(&parse5("x1*x2", 2)).unwrap();
        assert_eq!(r.value, RankValue::Exact(1));
        let cert = r.certificate.unwrap();
        assert_eq!(cert.summands.len(), 1);
        assert_eq!(cert.summands[0].0, parse5("x1", 2));
        assert_eq!(cert.summands[0].1, parse5("x2", 2));

        // x1^2 + x2^2 over F_5: -1 = 4 is a square, certificate
        // (x1 + 2 x2)(x1 + 3 x2).
        let r = quadratic_rank(&parse5("x1^2 + x2^2", 2)).unwrap();
        assert_eq!(r.value, RankValue::Exact(1));
        let cert = r.certificate.unwrap();
        assert_eq!(cert.field.s(), 1);
        assert_eq!(cert.summands[0].0, parse5("x1 + 2*x2", 2));
        assert_eq!(cert.summands[0].1, parse5("x1 + 3*x2", 2));

        // Three squares: matrix rank 3, so strength 2.
        let r = quadratic_rank(&parse5("x1^2 + x2^2 + x3^2", 3)).unwrap();
        assert_eq!(r.value, RankValue::Exact(2));
        assert!(r.certificate.unwrap().verify(&parse5("x1^2 + x2^2 + x3^2", 3)));
    }

    #[test]
    fn quadratic_needs_extension_when_anisotropic() {
        // x1^2 + 2 x2^2 over F_5: -2 = 3 is a non-square, so the single
        // product certificate lives in F_25 while the value is still 1.
        let q = parse5("x1^2 + 2*x2^2", 2);
        let r = quadratic_rank(&q).unwrap();
        assert_eq!(r.value, RankValue::Exact(1));
        let cert = r.certificate.unwrap();
        assert_eq!(cert.field.s(), 2);
        assert!(cert.verify(&q));
    }

    #[test]
    fn quadratic_rank_errors() {
        assert!(matches!(
            quadratic_rank(&parse5("x1^3", 1)),
            Err(Error::WrongDegree { .. })
        ));
        assert!(matches!(
            quadratic_rank(&parse5("x1^2 + x1", 1)),
            Err(Error::NotHomogeneous { .. })
        ));
        let f2 = Field::prime(2).unwrap();
        let q = parse("x1*x2", &f2, 2).unwrap();
        assert!(matches!(quadratic_rank(&q), Err(Error::CharTwo)));
    }

    #[test]
    fn quadratic_value_matches_matrix_rank() {
        // ceil(rank(M_Q)/2) against an independent Gaussian elimination,
        // exhaustively over all quadratics in 2 variables mod 3 and mod 5.
        for p in [3u64, 5] {
            let field = Field::prime(p).unwrap();
            let monos = monomials_desc(2, 2);
            let total = p.pow(monos.len() as u32);
            for code in 0..total {
                let mut rest = code;
                let mut poly = Polynomial::zero(field.clone(), 2);
                for m in &monos {
                    let c = rest % p;
                    rest /= p;
                    if c != 0 {
                        poly = poly
                            .add(&Polynomial::monomial(
                                field.clone(),
                                2,
                                m.exps().to_vec(),
                                c,
                            ))
                            .unwrap();
                    }
                }
                let by_formula = quadratic_rank(&poly).unwrap();
                let mut m = symmetric_matrix(&poly).unwrap();
                let mrank = matrix_rank(&field, 2, 2, &mut m) as u32;
                assert_eq!(
                    by_formula.value,
                    RankValue::Exact(mrank.div_ceil(2)),
                    "p={p} code={code}"
                );
            }
        }
    }

    #[test]
    fn exhaustive_triple_product() {
        let p = parse5("x1*x2*x3", 3);
        let r = exhaustive_rank(&p, 3, B).unwrap();
        assert_eq!(r.value, RankValue::Exact(1));
        let cert = r.certificate.unwrap();
        assert_eq!(cert.summands[0].0, parse5("x1", 3));
        assert_eq!(cert.summands[0].1, parse5("x2*x3", 3));
    }

    #[test]
    fn exhaustive_cuspidal_cubic() {
        // x1^2 x2 + x3^3 is irreducible (it defines a cuspidal cubic), so no
        // single product works over any field; two summands do.
        let p = parse5("x1^2*x2 + x3^3", 3);
        let r = exhaustive_rank(&p, 2, B).unwrap();
        assert_eq!(r.value, RankValue::Exact(2));
        assert!(r.certificate.unwrap().verify(&p));

        // Truncated at r_max = 1: an exhaustion record.
        let r = exhaustive_rank(&p, 1, B).unwrap();
        assert_eq!(r.value, RankValue::GreaterThan(1));
        let ex = r.exhausted.unwrap();
        assert_eq!(ex.patterns, vec![(1, 2)]);
        // 31 projective lines over F_5 and 651 over F_25.
        assert_eq!(ex.tuples_searched, 31 + 651);
    }

    #[test]
    fn no_rank_one_by_direct_product_scan() {
        // Independent oracle for the cuspidal example: multiply every monic
        // projective line against every quadratic and compare.
        let p = parse5("x1^2*x2 + x3^3", 3);
        let field = f5();
        let lines = monomials_desc(3, 1);
        let quads = monomials_desc(3, 2);
        let line_count = monic_form_count(5, lines.len()) as u64;
        for li in 0..line_count {
            let l = monic_form(&field, 3, &lines, li);
            for code in 0..5u64.pow(quads.len() as u32) {
                let mut rest = code;
                let mut r = Polynomial::zero(field.clone(), 3);
                for m in &quads {
                    let c = rest % 5;
                    rest /= 5;
                    if c != 0 {
                        r = r
                            .add(&Polynomial::monomial(field.clone(), 3, m.exps().to_vec(), c))
                            .unwrap();
                    }
                }
                assert_ne!(l.mul(&r).unwrap(), p, "found L={l} R={r}");
            }
        }
    }

    #[test]
    fn rank_dispatch_examples() {
        // Top part x1 x2 x3 of a degree-3 polynomial.
        let p = parse5("x1*x2*x3 + x1", 3);
        assert_eq!(rank(&p, 3, B).unwrap().value, RankValue::Exact(1));

        // The zero polynomial declared at degree 3.
        let z = Polynomial::zero(f5(), 3);
        assert_eq!(rank(&z, 3, B).unwrap().value, RankValue::Exact(0));

        // Degree <= 1 is rejected.
        assert!(matches!(
            rank(&parse5("x1", 1), 1, B),
            Err(Error::DegreeTooSmall)
        ));
        // Declared degree below the actual degree is rejected.
        assert!(matches!(
            rank(&parse5("x1^4", 1), 3, B),
            Err(Error::WrongDegree { .. })
        ));
        // char must exceed the degree.
        let f3 = Field::prime(3).unwrap();
        let q = parse("x1^3", &f3, 1).unwrap();
        assert!(matches!(rank(&q, 3, B), Err(Error::CharTooSmall { .. })));
    }

    #[test]
    fn profile_examples() {
        let p = parse5("x1*x2*x3", 3);
        let prof = derivative_rank_profile(&p, B).unwrap();
        assert_eq!(prof.max, 2);
        assert_eq!(prof.directions.len(), 31);
        assert!(prof.zero_directions.is_empty());
        // P_{e1} = x2 x3 has rank 1; P_{(1,1,1)} has matrix rank 3, rank 2.
        let e1 = VectorPoint::basis(3, 0);
        let r_e1 = prof
            .directions
            .iter()
            .find(|(t, _)| *t == e1)
            .map(|&(_, r)| r);
        assert_eq!(r_e1, Some(1));

        let p = parse5("x1^3", 1);
        let prof = derivative_rank_profile(&p, B).unwrap();
        assert_eq!(prof.max, 1);

        let z = Polynomial::zero(f5(), 2);
        let prof = derivative_rank_profile(&z, B).unwrap();
        assert_eq!(prof.max, 0);
        assert_eq!(prof.zero_directions.len(), 6);
    }

    #[test]
    fn profile_rank_matches_matrix_rank_oracle() {
        // For P = x1 x2 x3 the derivative along t has the symmetric matrix
        // [[0, t3, t2], [t3, 0, t1], [t2, t1, 0]] (up to the factor 1/2);
        // its rank determines the strength directly.
        let p = parse5("x1*x2*x3", 3);
        let field = f5();
        for t in projective_points(&field, 3) {
            let pt = p.directional_derivative(&t).unwrap();
            let expected = if pt.is_zero() {
                0
            } else {
                let mut m = symmetric_matrix(&pt).unwrap();
                (matrix_rank(&field, 3, 3, &mut m) as u32).div_ceil(2)
            };
            let got = if pt.is_zero() {
                0
            } else {
                quadratic_rank(&pt).unwrap().rank().unwrap()
            };
            assert_eq!(got, expected, "t = {:?}", t.coords());
        }
    }

    #[test]
    fn extension_search_examples() {
        // s = 1 is the plain base-field search.
        let p = parse5("x1*x2*x3", 3);
        let base = rank_over_extension(&p, 1, B).unwrap();
        assert_eq!(base.value, RankValue::Exact(1));
        let ext = rank_over_extension(&p, 2, B).unwrap();
        assert_eq!(ext.value, RankValue::Exact(1));

        // x1^2 + x2^2 over F_3: -1 is not a square, so the base search needs
        // two summands while F_9 splits it as one product.
        let f3 = Field::prime(3).unwrap();
        let q = parse("x1^2 + x2^2", &f3, 2).unwrap();
        let base = rank_over_extension(&q, 1, B).unwrap();
        assert_eq!(base.value, RankValue::Exact(2));
        assert_eq!(base.field.s(), 1);
        let ext = rank_over_extension(&q, 2, B).unwrap();
        assert_eq!(ext.value, RankValue::Exact(1));
        assert!(ext.certificate.unwrap().verify(&q));
        // And the two-stage default agrees with the quadratic closed form.
        assert_eq!(
            exhaustive_rank(&q, 2, B).unwrap().value,
            quadratic_rank(&q).unwrap().value
        );
    }

    #[test]
    fn oracle_equivalence_sample() {
        // quadratic_rank against the exhaustive search on seeded random
        // quadratics (the full grids run in the acceptance suite).
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..25 {
            let q = random_homogeneous(&mut rng, &f5(), 3, 2);
            let fast = quadratic_rank(&q).unwrap();
            let slow = exhaustive_rank(&q, 3, B).unwrap();
            assert_eq!(fast.value, slow.value, "q = {q}");
        }
    }

    #[test]
    fn rank_invariances() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let field = f5();
        for _ in 0..10 {
            let p = random_homogeneous(&mut rng, &field, 2, 3);
            let r = rank(&p, 3, B).unwrap().rank().unwrap();

            // Scaling invariance.
            for lambda in 2..5 {
                let scaled = p.scale(lambda);
                assert_eq!(rank(&scaled, 3, B).unwrap().rank().unwrap(), r);
            }

            // GL-invariance under a random invertible change of variables.
            let a = loop {
                let cand: Vec<Vec<u64>> = (0..2)
                    .map(|_| (0..2).map(|_| draw_mod(&mut rng, 5)).collect())
                    .collect();
                let det = field.sub(
                    field.mul(cand[0][0], cand[1][1]),
                    field.mul(cand[0][1], cand[1][0]),
                );
                if det != 0 {
                    break cand;
                }
            };
            let subs: Vec<Polynomial> = (0..2)
                .map(|i| {
                    let mut l = Polynomial::zero(field.clone(), 2);
                    for (j, &c) in a[i].iter().enumerate() {
                        if c != 0 {
                            let mut e = vec![0u32; 2];
                            e[j] = 1;
                            l = l
                                .add(&Polynomial::monomial(field.clone(), 2, e, c))
                                .unwrap();
                        }
                    }
                    l
                })
                .collect();
            let composed = p.substitute(&subs).unwrap();
            assert_eq!(rank(&composed, 3, B).unwrap().rank().unwrap(), r, "p = {p}");
        }
    }

    #[test]
    fn extension_rank_is_monotone() {
        // Growing the coefficient field along divisibility never increases
        // the rank: every F_p decomposition is an F_{p^2} decomposition.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        let f3 = Field::prime(3).unwrap();
        for _ in 0..15 {
            let q = random_homogeneous(&mut rng, &f3, 2, 2);
            let base = rank_over_extension(&q, 1, B).unwrap().rank().unwrap();
            let ext = rank_over_extension(&q, 2, B).unwrap().rank().unwrap();
            assert!(ext <= base, "q = {q}: {ext} > {base}");
        }
        for _ in 0..10 {
            let p = random_homogeneous(&mut rng, &f5(), 2, 3);
            let base = rank_over_extension(&p, 1, B).unwrap().rank().unwrap();
            let ext = rank_over_extension(&p, 2, B).unwrap().rank().unwrap();
            assert!(ext <= base, "p = {p}: {ext} > {base}");
        }
    }

    #[test]
    fn rank_subadditive() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        for _ in 0..10 {
            let p = random_homogeneous(&mut rng, &f5(), 2, 3);
            let q = random_homogeneous(&mut rng, &f5(), 2, 3);
            let sum = p.add(&q).unwrap();
            if sum.is_zero() {
                continue;
            }
            let rp = rank(&p, 3, B).unwrap().rank().unwrap();
            let rq = rank(&q, 3, B).unwrap().rank().unwrap();
            let rs = rank(&sum, 3, B).unwrap().rank().unwrap();
            assert!(rs <= rp + rq, "p = {p}, q = {q}");
        }
    }

    #[test]
    fn certificates_always_verify() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        for _ in 0..15 {
            let p = random_homogeneous(&mut rng, &f5(), 3, 3);
            let r = rank(&p, 3, B).unwrap();
            assert!(r.certificate.unwrap().verify(&p), "p = {p}");
        }
    }

    #[test]
    fn budget_exceeded_reports_size() {
        let p = parse5("x1^2*x2 + x3^3", 3);
        match exhaustive_rank(&p, 2, 10) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert!(required > 10);
                assert_eq!(budget, 10);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn rank_json_shapes() {
        let r = exhaustive_rank(&parse5("x1*x2*x3", 3), 3, B).unwrap();
        let json = serde_json::to_string(&r.to_json_repr()).unwrap();
        assert!(json.starts_with(r#"{"rank":1,"field":{"p":5,"s":1},"certificate":"#));

        let r = exhaustive_rank(&parse5("x1^2*x2 + x3^3", 3), 1, B).unwrap();
        let json = serde_json::to_string(&r.to_json_repr()).unwrap();
        assert_eq!(
            json,
            r#"{"rank_gt":1,"exhausted":{"patterns":[[1,2]],"tuples_searched":682}}"#
        );
    }
}
