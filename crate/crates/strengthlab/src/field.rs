//! Exact arithmetic in prime fields F_p and small extensions F_{p^s}.
//!
//! Field elements are carried as `u64` encodings: a prime-field element is its
//! least nonnegative residue, and an extension element with polynomial-basis
//! coefficients `(a_0, ..., a_{s-1})` is encoded as `sum a_k * p^k`. The
//! encoding doubles as the enumeration index in `[0, q)`, which the value
//! tables and the analytic enumerations rely on.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Extension fields are capped at p^s <= 2^20; the rank-over-extension search
/// is exponential and only needed at desk scale.
pub const EXTENSION_SIZE_CAP: u64 = 1 << 20;

/// A checked prime modulus, 2 <= p <= 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=(1u64 << 31)).contains(&p) {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus { p })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Products fit in u64 because p <= 2^31.
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.p) {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Euler's criterion: 1 for nonzero squares, p-1 for non-squares, 0 for 0.
    pub fn euler(&self, a: u64) -> u64 {
        self.pow(a, (self.p - 1) / 2)
    }

    /// Square root of `a` mod p via Tonelli-Shanks, canonicalized to the
    /// smaller of the two roots. `None` when `a` is a non-square.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let p = self.p;
        let a = a % p;
        if a == 0 {
            return Some(0);
        }
        if p == 2 {
            return Some(a);
        }
        if self.euler(a) != 1 {
            return None;
        }
        let r = if p % 4 == 3 {
            self.pow(a, (p + 1) / 4)
        } else {
            // Tonelli-Shanks with the smallest quadratic non-residue as z.
            let mut q = p - 1;
            let mut s = 0u32;
            while q.is_multiple_of(2) {
                q /= 2;
                s += 1;
            }
            let mut z = 2;
            while self.euler(z) != p - 1 {
                z += 1;
            }
            let mut m = s;
            let mut c = self.pow(z, q);
            let mut t = self.pow(a, q);
            let mut r = self.pow(a, q.div_ceil(2));
            while t != 1 {
                let mut i = 0u32;
                let mut t2 = t;
                while t2 != 1 {
                    t2 = self.mul(t2, t2);
                    i += 1;
                }
                let mut b = c;
                for _ in 0..(m - i - 1) {
                    b = self.mul(b, b);
                }
                m = i;
                c = self.mul(b, b);
                t = self.mul(t, c);
                r = self.mul(r, b);
            }
            r
        };
        Some(r.min(p - r))
    }
}

// ---------------------------------------------------------------------------
// Raw polynomial arithmetic over F_p (dense coefficient vectors, used for
// extension-field construction and irreducibility testing)
// ---------------------------------------------------------------------------

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], pm: &PrimeModulus) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = pm.add(out[i + j], pm.mul(ai, bj));
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` by monic `f`.
fn poly_rem(a: &[u64], f: &[u64], pm: &PrimeModulus) -> Vec<u64> {
    debug_assert_eq!(*f.last().unwrap(), 1);
    let mut r = a.to_vec();
    let df = f.len() - 1;
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        if lead != 0 {
            for k in 0..df {
                r[shift + k] = pm.sub(r[shift + k], pm.mul(lead, f[k]));
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() <= df {
            break;
        }
    }
    r
}

fn poly_powmod(base: &[u64], mut exp: u64, f: &[u64], pm: &PrimeModulus) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, f, pm);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, pm), f, pm);
        }
        b = poly_rem(&poly_mul(&b, &b, pm), f, pm);
        exp >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], pm: &PrimeModulus) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // Make b monic before taking the remainder.
        let lead_inv = pm.inv(*b.last().unwrap()).unwrap();
        let monic: Vec<u64> = b.iter().map(|&c| pm.mul(c, lead_inv)).collect();
        let r = poly_rem(&a, &monic, pm);
        a = b;
        b = r;
    }
    a
}

fn poly_eval(f: &[u64], x: u64, pm: &PrimeModulus) -> u64 {
    let mut acc = 0u64;
    for &c in f.iter().rev() {
        acc = pm.add(pm.mul(acc, x), c);
    }
    acc
}

fn is_irreducible(f: &[u64], pm: &PrimeModulus) -> bool {
    let s = f.len() - 1;
    debug_assert!(s >= 2);
    if s <= 3 {
        // Degree 2 or 3: irreducible over F_p iff no root in F_p.
        return (0..pm.get()).all(|c| poly_eval(f, c, pm) != 0);
    }
    // f has an irreducible factor of degree k iff gcd(x^(p^k) - x, f) != 1;
    // checking k up to s/2 rules out every proper factorization.
    let x = vec![0u64, 1];
    let mut h = x.clone(); // x^(p^k) mod f, starting at k = 0
    for _ in 1..=(s / 2) {
        h = poly_powmod(&h, pm.get(), f, pm);
        let mut diff = h.clone();
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = pm.sub(diff[1], 1);
        poly_trim(&mut diff);
        let g = poly_gcd(&diff, f, pm);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Smallest (in lexicographic coefficient order, high degree first) monic
/// irreducible polynomial of degree `s` over F_p, as an ascending coefficient
/// list of length s+1. Deterministic so that certificates reproduce across
/// runs.
pub fn find_irreducible(p: PrimeModulus, s: u32) -> Result<Vec<u64>> {
    if s < 2 {
        return Err(Error::InvalidDegree(s));
    }
    let size = (p.get() as u128).checked_pow(s).unwrap_or(u128::MAX);
    if size > EXTENSION_SIZE_CAP as u128 {
        return Err(Error::SizeCap {
            what: "extension field size p^s",
            required: size,
            cap: EXTENSION_SIZE_CAP,
        });
    }
    let size = size as u64;
    for m in 0..size {
        let mut f = Vec::with_capacity(s as usize + 1);
        let mut rest = m;
        for _ in 0..s {
            f.push(rest % p.get());
            rest /= p.get();
        }
        f.push(1);
        if is_irreducible(&f, &p) {
            return Ok(f);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

// ---------------------------------------------------------------------------
// Extension fields
// ---------------------------------------------------------------------------

/// An extension element in decoded polynomial-basis form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElement {
    /// Length-s coefficient vector, `coeffs[k]` multiplying x^k.
    pub coeffs: Vec<u64>,
}

/// F_{p^s} with multiplication via discrete log/exp tables (q <= 2^20, so the
/// tables are small and every operation is a couple of lookups).
#[derive(Clone)]
pub struct ExtensionField {
    base: PrimeModulus,
    s: u32,
    modulus_poly: Vec<u64>,
    q: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl std::fmt::Debug for ExtensionField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExtensionField")
            .field("p", &self.base.get())
            .field("s", &self.s)
            .field("modulus_poly", &self.modulus_poly)
            .finish()
    }
}

impl PartialEq for ExtensionField {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.s == other.s && self.modulus_poly == other.modulus_poly
    }
}
impl Eq for ExtensionField {}

impl ExtensionField {
    /// F_{p^s} with the canonical (lex-smallest) irreducible modulus.
    pub fn canonical(p: PrimeModulus, s: u32) -> Result<Self> {
        let modulus = find_irreducible(p, s)?;
        Self::new(p, s, modulus)
    }

    pub fn new(p: PrimeModulus, s: u32, modulus_poly: Vec<u64>) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidDegree(s));
        }
        let q = (p.get() as u128).checked_pow(s).unwrap_or(u128::MAX);
        if q > EXTENSION_SIZE_CAP as u128 {
            return Err(Error::SizeCap {
                what: "extension field size p^s",
                required: q,
                cap: EXTENSION_SIZE_CAP,
            });
        }
        let q = q as u64;
        if modulus_poly.len() != s as usize + 1
            || modulus_poly.last() != Some(&1)
            || modulus_poly.iter().any(|&c| c >= p.get())
        {
            return Err(Error::InvalidInput(format!(
                "modulus must be monic of degree {s} with coefficients in [0, {})",
                p.get()
            )));
        }
        if !is_irreducible(&modulus_poly, &p) {
            return Err(Error::InvalidInput(
                "modulus polynomial is reducible".into(),
            ));
        }
        let mut field = ExtensionField {
            base: p,
            s,
            modulus_poly,
            q,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    fn decode_raw(&self, idx: u64) -> Vec<u64> {
        let p = self.base.get();
        let mut rest = idx;
        let mut coeffs = Vec::with_capacity(self.s as usize);
        for _ in 0..self.s {
            coeffs.push(rest % p);
            rest /= p;
        }
        coeffs
    }

    fn encode_raw(&self, coeffs: &[u64]) -> u64 {
        let p = self.base.get();
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * p + c;
        }
        idx
    }

    /// Multiplication by direct polynomial arithmetic; used to build the
    /// log/exp tables and as an independent oracle in tests.
    pub fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let pa = self.decode_raw(a);
        let pb = self.decode_raw(b);
        let prod = poly_mul(&pa, &pb, &self.base);
        let mut rem = poly_rem(&prod, &self.modulus_poly, &self.base);
        rem.resize(self.s as usize, 0);
        self.encode_raw(&rem)
    }

    fn pow_raw(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, b);
            }
            b = self.mul_raw(b, b);
            exp >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let mut factors = Vec::new();
        let mut m = q - 1;
        let mut d = 2u64;
        while d * d <= m {
            if m.is_multiple_of(d) {
                factors.push(d);
                while m.is_multiple_of(d) {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        let generator = (2..q)
            .find(|&g| factors.iter().all(|&f| self.pow_raw(g, (q - 1) / f) != 1))
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = acc as u32;
            log[acc as usize] = i as u32;
            acc = self.mul_raw(acc, generator);
        }
        debug_assert_eq!(acc, 1);
        self.exp = exp;
        self.log = log;
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.base.get()
    }

    #[inline]
    pub fn s(&self) -> u32 {
        self.s
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus_poly(&self) -> &[u64] {
        &self.modulus_poly
    }

    pub fn encode(&self, e: &ExtElement) -> Result<u64> {
        if e.coeffs.len() != self.s as usize {
            return Err(Error::DimensionMismatch {
                expected: self.s as usize,
                got: e.coeffs.len(),
            });
        }
        if e.coeffs.iter().any(|&c| c >= self.p()) {
            return Err(Error::InvalidInput("coefficient out of range".into()));
        }
        Ok(self.encode_raw(&e.coeffs))
    }

    pub fn decode(&self, idx: u64) -> ExtElement {
        ExtElement {
            coeffs: self.decode_raw(idx),
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let p = self.base.get();
        let (mut ra, mut rb) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.s {
            let da = ra % p;
            let db = rb % p;
            out += self.base.add(da, db) * place;
            place *= p;
            ra /= p;
            rb /= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let p = self.base.get();
        let mut ra = a;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.s {
            out += self.base.neg(ra % p) * place;
            place *= p;
            ra /= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let la = self.log[a as usize] as u64;
        let lb = self.log[b as usize] as u64;
        self.exp[((la + lb) % (self.q - 1)) as usize] as u64
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let la = self.log[a as usize] as u64;
        Ok(self.exp[((self.q - 1 - la) % (self.q - 1)) as usize] as u64)
    }

    pub fn pow(&self, a: u64, exp: u64) -> u64 {
        if a == 0 {
            return if exp == 0 { 1 } else { 0 };
        }
        let la = self.log[a as usize] as u128;
        let e = (la * exp as u128 % (self.q - 1) as u128) as usize;
        self.exp[e] as u64
    }

    /// Square root, canonicalized to the smaller encoding of the two roots;
    /// `None` for non-squares. For odd q this is the discrete-log parity
    /// test; in characteristic 2 the Frobenius inverse gives the unique root.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return Some(0);
        }
        if self.p() == 2 {
            return Some(self.pow(a, self.q / 2));
        }
        let k = self.log[a as usize] as u64;
        if !k.is_multiple_of(2) {
            return None;
        }
        let r = self.exp[(k / 2) as usize] as u64;
        Some(r.min(self.neg(r)))
    }

    /// tr_{F_q/F_p}(a) = sum of the Frobenius conjugates a^(p^k), k < s.
    /// The result is a prime-field residue.
    pub fn trace(&self, a: u64) -> u64 {
        let mut acc = 0u64;
        let mut conj = a;
        for _ in 0..self.s {
            acc = self.add(acc, conj);
            conj = self.pow(conj, self.p());
        }
        debug_assert_eq!(conj, a, "Frobenius has order s");
        debug_assert!(acc < self.p(), "trace lands in the prime field");
        acc
    }
}

// ---------------------------------------------------------------------------
// Unified runtime field
// ---------------------------------------------------------------------------

/// A runtime-chosen finite field: F_p or F_{p^s}. Elements are `u64`
/// encodings (see the module docs); the encoding is also the enumeration
/// index in `[0, q)`, with 0 the zero element and 1 the one element.
#[derive(Debug, Clone)]
pub enum Field {
    Prime(PrimeModulus),
    Extension(Arc<ExtensionField>),
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Field::Prime(a), Field::Prime(b)) => a == b,
            (Field::Extension(a), Field::Extension(b)) => a.as_ref() == b.as_ref(),
            _ => false,
        }
    }
}
impl Eq for Field {}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        Ok(Field::Prime(PrimeModulus::new(p)?))
    }

    /// F_{p^s} with the canonical modulus; s = 1 yields the prime field.
    pub fn extension(p: u64, s: u32) -> Result<Self> {
        let pm = PrimeModulus::new(p)?;
        if s <= 1 {
            return Ok(Field::Prime(pm));
        }
        Ok(Field::Extension(Arc::new(ExtensionField::canonical(pm, s)?)))
    }

    #[inline]
    pub fn p(&self) -> u64 {
        match self {
            Field::Prime(pm) => pm.get(),
            Field::Extension(f) => f.p(),
        }
    }

    #[inline]
    pub fn s(&self) -> u32 {
        match self {
            Field::Prime(_) => 1,
            Field::Extension(f) => f.s(),
        }
    }

    #[inline]
    pub fn q(&self) -> u64 {
        match self {
            Field::Prime(pm) => pm.get(),
            Field::Extension(f) => f.q(),
        }
    }

    pub fn prime_modulus(&self) -> PrimeModulus {
        match self {
            Field::Prime(pm) => *pm,
            Field::Extension(f) => PrimeModulus::new(f.p()).unwrap(),
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            Field::Prime(pm) => pm.add(a, b),
            Field::Extension(f) => f.add(a, b),
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        match self {
            Field::Prime(pm) => pm.sub(a, b),
            Field::Extension(f) => f.sub(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        match self {
            Field::Prime(pm) => pm.neg(a),
            Field::Extension(f) => f.neg(a),
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            Field::Prime(pm) => pm.mul(a, b),
            Field::Extension(f) => f.mul(a, b),
        }
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        match self {
            Field::Prime(pm) => pm.inv(a),
            Field::Extension(f) => f.inv(a),
        }
    }

    pub fn pow(&self, a: u64, exp: u64) -> u64 {
        match self {
            Field::Prime(pm) => pm.pow(a, exp),
            Field::Extension(f) => f.pow(a, exp),
        }
    }

    /// Embed an integer as a field constant (reduced mod p).
    #[inline]
    pub fn embed(&self, v: u64) -> u64 {
        v % self.p()
    }

    /// Trace down to F_p; the identity on a prime field.
    #[inline]
    pub fn trace_to_prime(&self, a: u64) -> u64 {
        match self {
            Field::Prime(_) => a,
            Field::Extension(f) => f.trace(a),
        }
    }

    /// d! as a field element, with the char(k) > d hypothesis enforced.
    pub fn factorial(&self, d: u32) -> Result<u64> {
        if self.p() <= d as u64 {
            return Err(Error::CharTooSmall { p: self.p(), degree: d });
        }
        let mut acc = 1u64;
        for k in 2..=d as u64 {
            acc = self.mul(acc, self.embed(k));
        }
        Ok(acc)
    }
}
