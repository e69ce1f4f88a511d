//! Multivariate polynomials P: V -> k in sparse coefficient form, the
//! difference operator delta_t and the directional derivative, plus the text
//! grammar and the JSON schema.
//!
//! Variables are x1..xn in text (1-indexed) and 0-indexed internally. Terms
//! are kept in graded-lexicographic order; the printer emits highest degree
//! first.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;

/// Default cap on value-table sizes: 5^12 points.
pub const DEFAULT_TABLE_CAP: u64 = 244_140_625;

// ---------------------------------------------------------------------------
// Multi-indices
// ---------------------------------------------------------------------------

/// Exponent vector of a monomial. Ordered graded-lexicographically: first by
/// total degree, then lexicographically on the exponents (so x1^2 > x1*x2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

// ---------------------------------------------------------------------------
// Points of V
// ---------------------------------------------------------------------------

/// A point of V = F_q^n, coordinates as field-element encodings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorPoint {
    coords: Vec<u64>,
}

impl VectorPoint {
    pub fn new(coords: Vec<u64>) -> Self {
        VectorPoint { coords }
    }

    pub fn zero(n: usize) -> Self {
        VectorPoint {
            coords: vec![0; n],
        }
    }

    /// Standard basis vector e_i (0-indexed).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = 1;
        VectorPoint { coords }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Base-q positional encoding, coords[0] least significant.
    pub fn encode(&self, field: &Field) -> u64 {
        let q = field.q();
        let mut idx = 0u64;
        for &c in self.coords.iter().rev() {
            idx = idx * q + c;
        }
        idx
    }

    pub fn decode(field: &Field, n: usize, index: u64) -> Self {
        let q = field.q();
        let mut rest = index;
        let mut coords = Vec::with_capacity(n);
        for _ in 0..n {
            coords.push(rest % q);
            rest /= q;
        }
        VectorPoint { coords }
    }

    pub fn add(&self, other: &VectorPoint, field: &Field) -> VectorPoint {
        VectorPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// Iterate all q^n points in encoding order.
pub fn all_points(field: &Field, n: usize) -> impl Iterator<Item = VectorPoint> + '_ {
    let size = (field.q() as u128).pow(n as u32);
    debug_assert!(size <= u64::MAX as u128);
    (0..size as u64).map(move |i| VectorPoint::decode(field, n, i))
}

/// One representative per projective line of V - 0: first nonzero coordinate
/// normalized to 1, enumerated deterministically.
pub fn projective_points(field: &Field, n: usize) -> Vec<VectorPoint> {
    let q = field.q();
    let mut out = Vec::new();
    for lead in (0..n).rev() {
        // lead is the index of the first nonzero coordinate
        let tail = n - lead - 1;
        let count = (q as u128).pow(tail as u32) as u64;
        for m in 0..count {
            let mut coords = vec![0u64; n];
            coords[lead] = 1;
            let mut rest = m;
            for c in coords.iter_mut().skip(lead + 1) {
                *c = rest % q;
                rest /= q;
            }
            out.push(VectorPoint::new(coords));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Sparse multivariate polynomial over F_p or F_{p^s}. No zero coefficients
/// are stored; the zero polynomial has an empty term map and degree `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    n: usize,
    terms: BTreeMap<MultiIndex, u64>,
}

impl Polynomial {
    pub fn zero(field: Field, n: usize) -> Self {
        Polynomial {
            field,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, n: usize, c: u64) -> Self {
        let mut p = Self::zero(field, n);
        p.add_term(MultiIndex::zero(n), c);
        p
    }

    pub fn monomial(field: Field, n: usize, exps: Vec<u32>, coeff: u64) -> Self {
        assert_eq!(exps.len(), n);
        let mut p = Self::zero(field, n);
        p.add_term(MultiIndex::new(exps), coeff);
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.total_degree() == d)
    }

    /// Leading monomial in graded-lex order.
    pub fn leading_monomial(&self) -> Option<&MultiIndex> {
        self.terms.keys().next_back()
    }

    fn add_term(&mut self, m: MultiIndex, c: u64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_same_shape(&self, other: &Polynomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.field != other.field {
            return Err(Error::InvalidInput(
                "polynomials over different fields".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.field.clone(), self.n);
        for (m, &c) in &self.terms {
            out.terms.insert(m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Polynomial {
        let mut out = Polynomial::zero(self.field.clone(), self.n);
        if c == 0 {
            return out;
        }
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_shape(other)?;
        let mut out = Polynomial::zero(self.field.clone(), self.n);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let exps: Vec<u32> = ma
                    .exps()
                    .iter()
                    .zip(mb.exps())
                    .map(|(&a, &b)| a + b)
                    .collect();
                out.add_term(MultiIndex::new(exps), self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.field.clone(), self.n, 1);
        for _ in 0..e {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    /// Substitute subs[i] for variable i.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        if subs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: subs.len(),
            });
        }
        let n_out = subs.first().map(|s| s.n).unwrap_or(0);
        let mut out = Polynomial::zero(self.field.clone(), n_out);
        for (m, &c) in &self.terms {
            let mut term = Polynomial::constant(self.field.clone(), n_out, c);
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&subs[i].pow(e))?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Swap the field handle; valid when every coefficient encoding embeds,
    /// which holds for F_p -> F_{p^s} (constants keep their encoding).
    pub fn embed_into(&self, target: &Field) -> Result<Polynomial> {
        if target.p() != self.field.p() {
            return Err(Error::InvalidInput(
                "embedding requires the same characteristic".into(),
            ));
        }
        if self.field.s() != 1 && self.field != *target {
            return Err(Error::InvalidInput(
                "only prime-field polynomials embed into extensions".into(),
            ));
        }
        Ok(Polynomial {
            field: target.clone(),
            n: self.n,
            terms: self.terms.clone(),
        })
    }

    pub fn evaluate(&self, x: &VectorPoint) -> Result<u64> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.dim(),
            });
        }
        let f = &self.field;
        let mut acc = 0u64;
        for (m, &c) in &self.terms {
            let mut v = c;
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    v = f.mul(v, f.pow(x.coords()[i], e as u64));
                }
            }
            acc = f.add(acc, v);
        }
        Ok(acc)
    }

    /// Sum of the terms of total degree exactly d.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.field.clone(), self.n);
        for (m, &c) in &self.terms {
            if m.total_degree() == d {
                out.terms.insert(m.clone(), c);
            }
        }
        out
    }

    /// delta_t P = P(x+t) - P(x), expanded symbolically.
    pub fn delta(&self, t: &VectorPoint) -> Result<Polynomial> {
        if t.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: t.dim(),
            });
        }
        let f = self.field.clone();
        let mut shifted = Polynomial::zero(f.clone(), self.n);
        for (m, &c) in &self.terms {
            // Expand c * prod_j (x_j + t_j)^{e_j} by binomials.
            let mut partial: Vec<(Vec<u32>, u64)> = vec![(vec![0; self.n], c)];
            for (j, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let tj = t.coords()[j];
                let binom = pascal_row(e, &f);
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (exps, coeff) in &partial {
                    if tj == 0 {
                        let mut exps2 = exps.clone();
                        exps2[j] = e;
                        next.push((exps2, *coeff));
                        continue;
                    }
                    let mut tpow = 1u64; // t_j^{e-k}, built from k = e downward
                    let mut by_k = vec![0u64; e as usize + 1];
                    for k in (0..=e).rev() {
                        by_k[k as usize] = f.mul(binom[k as usize], tpow);
                        tpow = f.mul(tpow, tj);
                    }
                    for k in 0..=e {
                        let c2 = f.mul(*coeff, by_k[k as usize]);
                        if c2 == 0 {
                            continue;
                        }
                        let mut exps2 = exps.clone();
                        exps2[j] = k;
                        next.push((exps2, c2));
                    }
                }
                partial = next;
            }
            for (exps, coeff) in partial {
                shifted.add_term(MultiIndex::new(exps), coeff);
            }
        }
        shifted.sub(self)
    }

    /// Directional derivative P_t = sum_i t_i dP/dx_i.
    pub fn directional_derivative(&self, t: &VectorPoint) -> Result<Polynomial> {
        if t.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: t.dim(),
            });
        }
        let f = &self.field.clone();
        let mut out = Polynomial::zero(f.clone(), self.n);
        for (m, &c) in &self.terms {
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 || t.coords()[i] == 0 {
                    continue;
                }
                let factor = f.mul(f.embed(e as u64), t.coords()[i]);
                let coeff = f.mul(c, factor);
                if coeff == 0 {
                    continue;
                }
                let mut exps = m.exps().to_vec();
                exps[i] -= 1;
                out.add_term(MultiIndex::new(exps), coeff);
            }
        }
        Ok(out)
    }

    /// Table of all q^n evaluations (one lookup per point afterwards).
    pub fn value_table(&self) -> Result<ValueTable> {
        self.value_table_capped(DEFAULT_TABLE_CAP)
    }

    pub fn value_table_capped(&self, cap: u64) -> Result<ValueTable> {
        let size = (self.field.q() as u128).pow(self.n as u32);
        if size > cap as u128 {
            return Err(Error::SizeCap {
                what: "value table size q^n",
                required: size,
                cap,
            });
        }
        let size = size as u64;
        let q = self.field.q();
        let mut values = Vec::with_capacity(size as usize);
        let mut coords = vec![0u64; self.n];
        let point = |coords: &[u64]| VectorPoint::new(coords.to_vec());
        for _ in 0..size {
            values.push(self.evaluate(&point(&coords))? as u32);
            // odometer increment, coordinate 0 fastest
            for c in coords.iter_mut() {
                *c += 1;
                if *c < q {
                    break;
                }
                *c = 0;
            }
        }
        Ok(ValueTable {
            field: self.field.clone(),
            n: self.n,
            values,
        })
    }
}

fn pascal_row(e: u32, f: &Field) -> Vec<u64> {
    // Binomial coefficients C(e, k) mod p, exact for any e.
    let mut row = vec![1u64];
    for _ in 0..e {
        let mut next = vec![0u64; row.len() + 1];
        next[0] = 1;
        for k in 1..row.len() {
            next[k] = f.add(row[k - 1], row[k]);
        }
        next[row.len()] = 1;
        row = next;
    }
    row
}

// ---------------------------------------------------------------------------
// Value tables
// ---------------------------------------------------------------------------

/// All q^n values of a function V -> F_q, indexed by encoded point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTable {
    field: Field,
    n: usize,
    values: Vec<u32>,
}

impl ValueTable {
    pub fn from_values(field: Field, n: usize, values: Vec<u32>) -> Result<Self> {
        let size = (field.q() as u128).pow(n as u32);
        if values.len() as u128 != size {
            return Err(Error::DimensionMismatch {
                expected: size as usize,
                got: values.len(),
            });
        }
        Ok(ValueTable { field, n, values })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, x: &VectorPoint) -> u64 {
        self.values[x.encode(&self.field) as usize] as u64
    }

    /// Values mapped through the trace down to F_p (identity when s = 1).
    pub fn traced_values(&self) -> Vec<u32> {
        match &self.field {
            Field::Prime(_) => self.values.clone(),
            Field::Extension(f) => self
                .values
                .iter()
                .map(|&v| f.trace(v as u64) as u32)
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Text grammar
// ---------------------------------------------------------------------------

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    n: usize,
    field: Field,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn integer(&mut self) -> Result<u128> {
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        text.parse::<u128>().map_err(|_| Error::Syntax {
            offset: start,
            message: "integer too large".into(),
        })
    }

    /// factor := INT | 'x' INT ('^' INT)?  Returns (coeff, Some((var, exp))).
    fn factor(&mut self) -> Result<(u64, Option<(usize, u32)>)> {
        self.skip_ws();
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let idx = self.integer().map_err(|_| Error::Syntax {
                    offset: start,
                    message: "expected a variable index after 'x'".into(),
                })?;
                if idx < 1 || idx as usize > self.n {
                    return Err(Error::IndexOutOfRange {
                        index: idx as usize,
                        n: self.n,
                    });
                }
                let var = idx as usize - 1;
                self.skip_ws();
                let exp = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let e = self.integer()?;
                    if e > u32::MAX as u128 {
                        return self.err("exponent too large");
                    }
                    e as u32
                } else {
                    1
                };
                Ok((1, Some((var, exp))))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(((v % self.field.p() as u128) as u64, None))
            }
            _ => self.err("expected a coefficient or a variable"),
        }
    }

    /// term := factor ('*' factor)*
    fn term(&mut self) -> Result<(MultiIndex, u64)> {
        let mut coeff = 1u64;
        let mut exps = vec![0u32; self.n];
        loop {
            let (c, var) = self.factor()?;
            coeff = self.field.mul(coeff, self.field.embed(c));
            if let Some((v, e)) = var {
                exps[v] += e;
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((MultiIndex::new(exps), coeff))
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut poly = Polynomial::zero(self.field.clone(), self.n);
        self.skip_ws();
        let mut sign_neg = false;
        if self.peek() == Some(b'-') {
            sign_neg = true;
            self.pos += 1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        loop {
            let (m, c) = self.term()?;
            let c = if sign_neg { self.field.neg(c) } else { c };
            poly.add_term(m, c);
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign_neg = false;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign_neg = true;
                    self.pos += 1;
                }
                Some(_) => return self.err("expected '+', '-', or end of input"),
            }
        }
        Ok(poly)
    }
}

/// Parse the text grammar: sum of terms `c*x<i>^e*...` with optional
/// coefficients and exponents, over F_p in n variables.
pub fn parse(text: &str, field: &Field, n: usize) -> Result<Polynomial> {
    let mut parser = Parser {
        input: text.as_bytes(),
        pos: 0,
        n,
        field: field.clone(),
    };
    parser.expr()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let ext = match &self.field {
            Field::Prime(_) => None,
            Field::Extension(e) => Some(e.clone()),
        };
        let mut first = true;
        for (m, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff_str = match &ext {
                None => {
                    if c == 1 && m.total_degree() > 0 {
                        None
                    } else {
                        Some(c.to_string())
                    }
                }
                Some(e) => {
                    let coeffs = e.decode(c).coeffs;
                    Some(format!(
                        "[{}]",
                        coeffs
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    ))
                }
            };
            let mut pieces: Vec<String> = Vec::new();
            if let Some(cs) = coeff_str {
                pieces.push(cs);
            }
            for (i, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => pieces.push(format!("x{}", i + 1)),
                    _ => pieces.push(format!("x{}^{}", i + 1, e)),
                }
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

/// { "p": 5, "s": 1, "n": 3, "terms": [ { "exps": [1,1,1], "coeff": 1 } ] }
/// For s > 1 each coeff is a length-s array; the modulus is the canonical
/// (lex-smallest) irreducible, so the encoding is unambiguous. Terms are
/// emitted in printer order (graded-lex, highest first).
#[derive(Debug, Clone, serde::Serialize)]
pub struct PolyJson {
    pub p: u64,
    pub s: u32,
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: Value,
}

impl Polynomial {
    pub fn to_json_repr(&self) -> PolyJson {
        let terms = self
            .terms
            .iter()
            .rev()
            .map(|(m, &c)| {
                let coeff = match &self.field {
                    Field::Prime(_) => json!(c),
                    Field::Extension(f) => json!(f.decode(c).coeffs),
                };
                TermJson {
                    exps: m.exps().to_vec(),
                    coeff,
                }
            })
            .collect();
        PolyJson {
            p: self.field.p(),
            s: self.field.s(),
            n: self.n,
            terms,
        }
    }
}

pub fn poly_to_json(p: &Polynomial) -> Value {
    serde_json::to_value(p.to_json_repr()).unwrap()
}

fn json_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be a nonnegative integer")))
}

pub fn poly_from_json(v: &Value) -> Result<Polynomial> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidInput("polynomial JSON must be an object".into()))?;
    let p = json_u64(
        obj.get("p")
            .ok_or_else(|| Error::InvalidInput("missing field \"p\"".into()))?,
        "p",
    )?;
    let s = obj.get("s").map(|v| json_u64(v, "s")).transpose()?.unwrap_or(1);
    let n = json_u64(
        obj.get("n")
            .ok_or_else(|| Error::InvalidInput("missing field \"n\"".into()))?,
        "n",
    )? as usize;
    let field = Field::extension(p, s as u32)?;
    let terms = obj
        .get("terms")
        .and_then(|t| t.as_array())
        .ok_or_else(|| Error::InvalidInput("missing or invalid \"terms\" array".into()))?;
    let mut poly = Polynomial::zero(field.clone(), n);
    for t in terms {
        let exps_v = t
            .get("exps")
            .and_then(|e| e.as_array())
            .ok_or_else(|| Error::InvalidInput("term missing \"exps\" array".into()))?;
        if exps_v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: exps_v.len(),
            });
        }
        let mut exps = Vec::with_capacity(n);
        for e in exps_v {
            exps.push(json_u64(e, "exponent")? as u32);
        }
        let coeff_v = t
            .get("coeff")
            .ok_or_else(|| Error::InvalidInput("term missing \"coeff\"".into()))?;
        let coeff = match &field {
            Field::Prime(_) => {
                let c = json_u64(coeff_v, "coeff")?;
                if c >= p {
                    return Err(Error::InvalidInput(format!(
                        "coefficient {c} is not a reduced residue mod {p}"
                    )));
                }
                c
            }
            Field::Extension(f) => {
                let arr = coeff_v.as_array().ok_or_else(|| {
                    Error::InvalidInput("extension coeff must be an array".into())
                })?;
                let mut coeffs = Vec::with_capacity(arr.len());
                for c in arr {
                    coeffs.push(json_u64(c, "coeff entry")?);
                }
                f.encode(&crate::field::ExtElement { coeffs })?
            }
        };
        poly.add_term(MultiIndex::new(exps), coeff);
    }
    Ok(poly)
}

/// Optional declared degree carried alongside a polynomial in JSON (field
/// "d"); rank-style operations need it when the top part may vanish.
pub fn declared_degree_from_json(v: &Value) -> Result<Option<u32>> {
    match v.get("d") {
        None => Ok(None),
        Some(d) => Ok(Some(json_u64(d, "d")? as u32)),
    }
}
