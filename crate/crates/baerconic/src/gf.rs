//! Arithmetic for GF(q), q an odd prime power, and for its quadratic
//! extension GF(q²) = GF(q)(ε) with ε² = ω, ω a fixed non-square of GF(q).
//!
//! Elements of GF(q) are indices into a canonical enumeration: for q = p^k
//! the index of c₀ + c₁x + … + c_{k−1}x^{k−1} is Σ cᵢ pⁱ, so 0 and 1 are the
//! additive and multiplicative identities for every field. All base-field
//! operations are table lookups, built once per [`FieldCtx`]; extension
//! elements are component pairs z = z₁ + εz₂ and never need tables of their
//! own. Everything is exact.

use serde::Serialize;
use thiserror::Error;

/// Largest supported field order. Tables are O(q²); the verification
/// workloads use q ≤ 9, this bound just keeps experiments sane.
pub const MAX_ORDER: u64 = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic must be an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported bound {MAX_ORDER}")]
    OrderTooLarge(u64),
    #[error("{0} is not an odd prime power")]
    NotPrimePower(u64),
}

/// Element of GF(q), stored as its index in the canonical enumeration.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct FieldElem(pub u16);

/// Element z = z₁ + ε·z₂ of GF(q²).
#[derive(Copy, Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct ExtElem {
    pub z1: FieldElem,
    pub z2: FieldElem,
}

/// Square class of a field element.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadClass {
    Zero,
    Square,
    NonSquare,
}

impl QuadClass {
    /// Multiplicative rule for nonzero classes; Zero absorbs.
    pub fn product(self, other: QuadClass) -> QuadClass {
        use QuadClass::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Square, Square) | (NonSquare, NonSquare) => Square,
            _ => NonSquare,
        }
    }
}

/// Immutable arithmetic context for GF(q) and GF(q²). Safe to share across
/// threads; every operation is a pure function of its inputs.
pub struct FieldCtx {
    p: u16,
    k: u32,
    q: u16,
    /// Non-leading coefficients of the monic reduction polynomial, low
    /// degree first (empty for prime fields).
    reduction: Vec<u16>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    chi: Vec<QuadClass>,
    omega: FieldElem,
    ext_nonsquare: ExtElem,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("omega", &self.omega)
            .finish_non_exhaustive()
    }
}

impl FieldCtx {
    /// Builds GF(p^k). The reduction polynomial is the monic irreducible of
    /// degree k with the least coefficient encoding, and ω is the least
    /// non-square of GF(q), so the construction is deterministic.
    pub fn new(p: u16, k: u32) -> Result<FieldCtx, FieldError> {
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p as u64));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q <= MAX_ORDER);
        let q = match q {
            Some(q) => q as u16,
            None => return Err(FieldError::OrderTooLarge((p as u64).pow(k.min(16)))),
        };

        let reduction = if k == 1 {
            Vec::new()
        } else {
            least_irreducible(p, k)
        };

        let qe = q as usize;
        let mut add = vec![0u16; qe * qe];
        let mut mul = vec![0u16; qe * qe];
        for a in 0..q {
            for b in 0..q {
                add[a as usize * qe + b as usize] = add_poly(p, k, a, b);
                mul[a as usize * qe + b as usize] = mul_poly(p, k, &reduction, a, b);
            }
        }
        let mut neg = vec![0u16; qe];
        let mut inv = vec![0u16; qe];
        for a in 0..q {
            for b in 0..q {
                if add[a as usize * qe + b as usize] == 0 {
                    neg[a as usize] = b;
                }
                if a != 0 && mul[a as usize * qe + b as usize] == 1 {
                    inv[a as usize] = b;
                }
            }
        }
        let mut chi = vec![QuadClass::NonSquare; qe];
        chi[0] = QuadClass::Zero;
        for a in 1..q {
            chi[mul[a as usize * qe + a as usize] as usize] = QuadClass::Square;
        }
        let omega = FieldElem(
            (1..q)
                .find(|&x| chi[x as usize] == QuadClass::NonSquare)
                .expect("odd field has a non-square"),
        );

        let mut ctx = FieldCtx {
            p,
            k,
            q,
            reduction,
            add,
            mul,
            neg,
            inv,
            chi,
            omega,
            ext_nonsquare: ExtElem::default(),
        };
        let qq = q as u32 * q as u32;
        let ns = (0..qq)
            .map(|i| ctx.ext_from_index(i))
            .find(|&z| ctx.ext_chi(z) == QuadClass::NonSquare)
            .expect("GF(q^2) has a non-square");
        ctx.ext_nonsquare = ns;
        Ok(ctx)
    }

    /// Builds the context for a given field order (factors q = p^k).
    pub fn for_order(q: u64) -> Result<FieldCtx, FieldError> {
        if q > MAX_ORDER {
            return Err(FieldError::OrderTooLarge(q));
        }
        let mut p = 2u64;
        while p * p <= q {
            if q % p == 0 {
                let mut k = 0u32;
                let mut rest = q;
                while rest % p == 0 {
                    rest /= p;
                    k += 1;
                }
                if rest != 1 {
                    return Err(FieldError::NotPrimePower(q));
                }
                return FieldCtx::new(p as u16, k);
            }
            p += 1;
        }
        // q itself is prime (or 1).
        if q < 3 {
            return Err(FieldError::NotPrimePower(q));
        }
        FieldCtx::new(q as u16, 1)
    }

    #[inline]
    pub fn q(&self) -> u16 {
        self.q
    }

    pub fn characteristic(&self) -> u16 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Non-leading coefficients of the reduction polynomial (low degree first).
    pub fn reduction_coeffs(&self) -> &[u16] {
        &self.reduction
    }

    /// The fixed non-square ω of GF(q) with ε² = ω.
    #[inline]
    pub fn omega(&self) -> FieldElem {
        self.omega
    }

    /// The least non-square of GF(q²) in the canonical element order.
    #[inline]
    pub fn ext_nonsquare(&self) -> ExtElem {
        self.ext_nonsquare
    }

    #[inline]
    pub fn elem(&self, idx: u16) -> FieldElem {
        assert!(idx < self.q, "element index {idx} out of range for GF({})", self.q);
        FieldElem(idx)
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    // ---- base field ----

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(a.0 != 0, "division by zero in GF({})", self.q);
        FieldElem(self.inv[a.0 as usize])
    }

    #[inline]
    pub fn div(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b))
    }

    #[inline]
    pub fn square(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    #[inline]
    pub fn double(&self, a: FieldElem) -> FieldElem {
        self.add(a, a)
    }

    /// Quadratic character of GF(q).
    #[inline]
    pub fn chi(&self, a: FieldElem) -> QuadClass {
        self.chi[a.0 as usize]
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(FieldElem)
    }

    // ---- quadratic extension ----

    #[inline]
    pub fn ext(&self, z1: FieldElem, z2: FieldElem) -> ExtElem {
        ExtElem { z1, z2 }
    }

    #[inline]
    pub fn embed(&self, x: FieldElem) -> ExtElem {
        ExtElem { z1: x, z2: FieldElem(0) }
    }

    #[inline]
    pub fn eps(&self) -> ExtElem {
        ExtElem { z1: FieldElem(0), z2: FieldElem(1) }
    }

    #[inline]
    pub fn ext_zero(&self) -> ExtElem {
        ExtElem::default()
    }

    #[inline]
    pub fn ext_one(&self) -> ExtElem {
        self.embed(self.one())
    }

    #[inline]
    pub fn is_in_base(&self, z: ExtElem) -> bool {
        z.z2.0 == 0
    }

    #[inline]
    pub fn ext_is_zero(&self, z: ExtElem) -> bool {
        z.z1.0 == 0 && z.z2.0 == 0
    }

    #[inline]
    pub fn ext_add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtElem { z1: self.add(a.z1, b.z1), z2: self.add(a.z2, b.z2) }
    }

    #[inline]
    pub fn ext_neg(&self, a: ExtElem) -> ExtElem {
        ExtElem { z1: self.neg(a.z1), z2: self.neg(a.z2) }
    }

    #[inline]
    pub fn ext_sub(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        self.ext_add(a, self.ext_neg(b))
    }

    /// (a + εb)(c + εd) = (ac + ωbd) + ε(ad + bc).
    #[inline]
    pub fn ext_mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        let ac = self.mul(a.z1, b.z1);
        let bd = self.mul(a.z2, b.z2);
        let ad = self.mul(a.z1, b.z2);
        let bc = self.mul(a.z2, b.z1);
        ExtElem {
            z1: self.add(ac, self.mul(self.omega, bd)),
            z2: self.add(ad, bc),
        }
    }

    #[inline]
    pub fn ext_square(&self, a: ExtElem) -> ExtElem {
        self.ext_mul(a, a)
    }

    #[inline]
    pub fn ext_scale(&self, s: FieldElem, a: ExtElem) -> ExtElem {
        ExtElem { z1: self.mul(s, a.z1), z2: self.mul(s, a.z2) }
    }

    /// Norm z·z^q = z₁² − ωz₂², an element of GF(q).
    #[inline]
    pub fn norm(&self, z: ExtElem) -> FieldElem {
        self.sub(self.square(z.z1), self.mul(self.omega, self.square(z.z2)))
    }

    /// Frobenius z ↦ z^q = z₁ − εz₂.
    #[inline]
    pub fn frobenius(&self, z: ExtElem) -> ExtElem {
        ExtElem { z1: z.z1, z2: self.neg(z.z2) }
    }

    #[inline]
    pub fn ext_inv(&self, z: ExtElem) -> ExtElem {
        let n = self.norm(z);
        assert!(n.0 != 0, "division by zero in GF({}^2)", self.q);
        let ninv = self.inv(n);
        ExtElem { z1: self.mul(z.z1, ninv), z2: self.neg(self.mul(z.z2, ninv)) }
    }

    #[inline]
    pub fn ext_div(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        self.ext_mul(a, self.ext_inv(b))
    }

    /// Quadratic character of GF(q²). z is a square there exactly when its
    /// norm is a square of GF(q), since z^((q²−1)/2) = N(z)^((q−1)/2).
    #[inline]
    pub fn ext_chi(&self, z: ExtElem) -> QuadClass {
        self.chi(self.norm(z))
    }

    pub fn ext_pow(&self, a: ExtElem, mut e: u64) -> ExtElem {
        let mut base = a;
        let mut acc = self.ext_one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.ext_mul(acc, base);
            }
            base = self.ext_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Canonical index of z in GF(q²): z₁ + q·z₂.
    #[inline]
    pub fn ext_index(&self, z: ExtElem) -> u32 {
        z.z1.0 as u32 + self.q as u32 * z.z2.0 as u32
    }

    #[inline]
    pub fn ext_from_index(&self, idx: u32) -> ExtElem {
        let q = self.q as u32;
        debug_assert!(idx < q * q);
        ExtElem { z1: FieldElem((idx % q) as u16), z2: FieldElem((idx / q) as u16) }
    }

    /// All of GF(q²) in canonical index order.
    pub fn ext_elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        (0..(self.q as u32 * self.q as u32)).map(|i| self.ext_from_index(i))
    }

    /// Decomposition z = z₁ + εz₂.
    #[inline]
    pub fn decompose(&self, z: ExtElem) -> (FieldElem, FieldElem) {
        (z.z1, z.z2)
    }
}

/// Canonical text form of an extension element: `z1` when rational over the
/// base field, otherwise `z1+e*z2`, with elements printed as their indices.
pub fn format_ext(z: ExtElem) -> String {
    if z.z2.0 == 0 {
        format!("{}", z.z1.0)
    } else {
        format!("{}+e*{}", z.z1.0, z.z2.0)
    }
}

/// Parses the canonical text form; `q` bounds the component indices.
pub fn parse_ext(s: &str, q: u16) -> Result<ExtElem, String> {
    let s = s.trim();
    let (c1, c2) = match s.split_once("+e*") {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    let z1: u16 = c1
        .parse()
        .map_err(|_| format!("bad field element component {c1:?}"))?;
    let z2: u16 = match c2 {
        Some(c2) => c2
            .parse()
            .map_err(|_| format!("bad field element component {c2:?}"))?,
        None => 0,
    };
    if z1 >= q || z2 >= q {
        return Err(format!("component out of range for GF({q}) in {s:?}"));
    }
    Ok(ExtElem { z1: FieldElem(z1), z2: FieldElem(z2) })
}

fn is_prime(n: u16) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n as u32 {
        if n as u32 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Digit-vector polynomial arithmetic over GF(p), used only while building
// the tables. Elements are encoded Σ cᵢ pⁱ.

fn digits(p: u16, k: u32, enc: u16) -> Vec<u16> {
    let mut v = vec![0u16; k as usize];
    let mut e = enc;
    for d in v.iter_mut() {
        *d = e % p;
        e /= p;
    }
    v
}

fn encode(p: u16, v: &[u16]) -> u16 {
    let mut enc = 0u32;
    for &d in v.iter().rev() {
        enc = enc * p as u32 + d as u32;
    }
    enc as u16
}

fn add_poly(p: u16, k: u32, a: u16, b: u16) -> u16 {
    let (da, db) = (digits(p, k, a), digits(p, k, b));
    let sum: Vec<u16> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    encode(p, &sum)
}

fn mul_poly(p: u16, k: u32, reduction: &[u16], a: u16, b: u16) -> u16 {
    if k == 1 {
        return ((a as u32 * b as u32) % p as u32) as u16;
    }
    let (da, db) = (digits(p, k, a), digits(p, k, b));
    let mut prod = vec![0u32; 2 * k as usize - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] += x as u32 * y as u32;
        }
    }
    // Reduce x^k = -(reduction), repeatedly from the top degree down.
    for i in (k as usize..prod.len()).rev() {
        let c = prod[i] % p as u32;
        prod[i] = 0;
        if c == 0 {
            continue;
        }
        for (j, &r) in reduction.iter().enumerate() {
            let sub = (c * r as u32) % p as u32;
            let slot = &mut prod[i - k as usize + j];
            *slot = (*slot + p as u32 - sub) % p as u32;
        }
    }
    let out: Vec<u16> = prod[..k as usize].iter().map(|&c| (c % p as u32) as u16).collect();
    encode(p, &out)
}

/// Remainder of `f` modulo monic `g` over GF(p); both carry their leading
/// coefficient explicitly, low degree first.
fn poly_rem(p: u32, mut f: Vec<u32>, g: &[u32]) -> Vec<u32> {
    let dg = g.len() - 1;
    loop {
        while matches!(f.last(), Some(&c) if c % p == 0) {
            f.pop();
        }
        if f.len() <= dg {
            return f;
        }
        let lead = *f.last().unwrap() % p;
        let shift = f.len() - 1 - dg;
        for i in 0..dg {
            let sub = (lead * (g[i] % p)) % p;
            f[shift + i] = (f[shift + i] % p + p - sub) % p;
        }
        f.pop();
    }
}

fn is_irreducible(p: u16, k: u32, trailing: &[u16]) -> bool {
    let pp = p as u32;
    let mut full: Vec<u32> = trailing.iter().map(|&c| c as u32).collect();
    full.push(1);
    // Monic degree-k polynomial is reducible iff it has a monic factor of
    // degree at most k/2; trial-divide them all (fields here are tiny).
    for d in 1..=k / 2 {
        let count = (pp as u64).pow(d);
        for enc in 0..count {
            let mut g: Vec<u32> = Vec::with_capacity(d as usize + 1);
            let mut e = enc;
            for _ in 0..d {
                g.push((e % pp as u64) as u32);
                e /= pp as u64;
            }
            g.push(1);
            if poly_rem(pp, full.clone(), &g).is_empty() {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u16, k: u32) -> Vec<u16> {
    let total = (p as u64).pow(k);
    for enc in 0..total {
        let trailing = digits(p, k, enc as u16);
        if is_irreducible(p, k, &trailing) {
            return trailing;
        }
    }
    unreachable!("an irreducible polynomial of degree {k} exists over GF({p})")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u16, k: u32) -> FieldCtx {
        FieldCtx::new(p, k).unwrap()
    }

    #[test]
    fn make_field_examples() {
        let f3 = gf(3, 1);
        assert_eq!(f3.q(), 3);
        // The only non-square of GF(3): squares are {0, 1}.
        assert_eq!(f3.omega(), FieldElem(2));

        let f9 = gf(3, 2);
        assert_eq!(f9.q(), 9);
        // x^2 + 1 is the least irreducible over GF(3).
        assert_eq!(f9.reduction_coeffs(), &[1, 0]);

        assert_eq!(FieldCtx::new(2, 1).unwrap_err(), FieldError::NotOddPrime(2));
        assert_eq!(FieldCtx::new(9, 1).unwrap_err(), FieldError::NotOddPrime(9));
        assert_eq!(FieldCtx::new(3, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(FieldCtx::new(3, 12), Err(FieldError::OrderTooLarge(_))));
    }

    #[test]
    fn for_order_factors() {
        assert_eq!(FieldCtx::for_order(9).unwrap().characteristic(), 3);
        assert_eq!(FieldCtx::for_order(7).unwrap().q(), 7);
        assert!(FieldCtx::for_order(15).is_err());
        assert!(FieldCtx::for_order(4).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let f = gf(p, k);
            let q = f.q();
            for a in f.elements() {
                assert_eq!(f.add(a, f.zero()), a);
                assert_eq!(f.mul(a, f.one()), a);
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if a.0 != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), f.one());
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        if q <= 7 {
                            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gf9_square_table() {
        // Derived by squaring all of GF(9) = GF(3)[x]/(x^2+1) by hand.
        let f9 = gf(3, 2);
        let squares: Vec<u16> = f9
            .elements()
            .filter(|&x| f9.chi(x) == QuadClass::Square)
            .map(|x| x.0)
            .collect();
        assert_eq!(squares, vec![1, 2, 3, 6]);
        assert_eq!(f9.omega(), FieldElem(4));
    }

    #[test]
    fn nonzero_square_count_is_half() {
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let f = gf(p, k);
            let n = f.elements().filter(|&x| f.chi(x) == QuadClass::Square).count();
            assert_eq!(n, (f.q() as usize - 1) / 2);
            // Same count in the extension field.
            let ne = f
                .ext_elements()
                .filter(|&z| f.ext_chi(z) == QuadClass::Square)
                .count();
            let qq = f.q() as usize * f.q() as usize;
            assert_eq!(ne, (qq - 1) / 2);
        }
    }

    #[test]
    fn chi_matches_euler_criterion() {
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let f = gf(p, k);
            let q = f.q() as u64;
            for x in f.elements() {
                let expect = if x.0 == 0 {
                    QuadClass::Zero
                } else if f.pow(x, (q - 1) / 2) == f.one() {
                    QuadClass::Square
                } else {
                    QuadClass::NonSquare
                };
                assert_eq!(f.chi(x), expect);
            }
            for z in f.ext_elements() {
                let expect = if f.ext_is_zero(z) {
                    QuadClass::Zero
                } else if f.ext_pow(z, (q * q - 1) / 2) == f.ext_one() {
                    QuadClass::Square
                } else {
                    QuadClass::NonSquare
                };
                assert_eq!(f.ext_chi(z), expect);
            }
        }
    }

    #[test]
    fn chi_agrees_with_exhaustive_square_search() {
        for (p, k) in [(3, 1), (5, 1), (3, 2)] {
            let f = gf(p, k);
            for z in f.ext_elements() {
                let has_root = f.ext_elements().any(|y| f.ext_mul(y, y) == z);
                match f.ext_chi(z) {
                    QuadClass::Zero => assert!(f.ext_is_zero(z)),
                    QuadClass::Square => assert!(has_root),
                    QuadClass::NonSquare => assert!(!has_root),
                }
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        let f = gf(3, 1);
        let z = f.ext(FieldElem(2), FieldElem(0));
        assert_eq!(f.frobenius(z), z);
        assert_eq!(f.frobenius(f.eps()), f.ext_neg(f.eps()));
        let w = f.ext(FieldElem(1), FieldElem(2));
        assert_eq!(f.frobenius(f.frobenius(w)), w);
        // eps + eps^q = 0.
        assert!(f.ext_is_zero(f.ext_add(f.eps(), f.frobenius(f.eps()))));
    }

    #[test]
    fn frobenius_is_field_automorphism() {
        for (p, k) in [(3, 1), (5, 1), (3, 2)] {
            let f = gf(p, k);
            for a in f.ext_elements() {
                for b in f.ext_elements() {
                    assert_eq!(
                        f.frobenius(f.ext_add(a, b)),
                        f.ext_add(f.frobenius(a), f.frobenius(b))
                    );
                    assert_eq!(
                        f.frobenius(f.ext_mul(a, b)),
                        f.ext_mul(f.frobenius(a), f.frobenius(b))
                    );
                }
            }
        }
    }

    #[test]
    fn base_elements_are_ext_squares() {
        // An element of GF(q) is a square (or zero) in GF(q^2).
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let f = gf(p, k);
            for x in f.elements() {
                let c = f.ext_chi(f.embed(x));
                assert_ne!(c, QuadClass::NonSquare, "GF(q) element {x:?} non-square in GF(q^2)");
            }
        }
    }

    #[test]
    fn ext_mul_rule_and_inverse() {
        let f = gf(3, 2);
        for a in f.ext_elements() {
            for b in f.ext_elements() {
                let prod = f.ext_mul(a, b);
                let expect_z1 = f.add(f.mul(a.z1, b.z1), f.mul(f.omega(), f.mul(a.z2, b.z2)));
                let expect_z2 = f.add(f.mul(a.z1, b.z2), f.mul(a.z2, b.z1));
                assert_eq!(prod, f.ext(expect_z1, expect_z2));
            }
            if !f.ext_is_zero(a) {
                assert_eq!(f.ext_mul(a, f.ext_inv(a)), f.ext_one());
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let f = gf(3, 2);
        let x = f.embed(FieldElem(5));
        assert_eq!(f.decompose(x), (FieldElem(5), FieldElem(0)));
        assert_eq!(f.decompose(f.eps()), (FieldElem(0), FieldElem(1)));
        let z = f.ext(FieldElem(1), FieldElem(2));
        assert_eq!(f.decompose(z), (FieldElem(1), FieldElem(2)));
    }

    #[test]
    fn quad_class_product_rule() {
        let f = gf(5, 1);
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.chi(f.mul(a, b)), f.chi(a).product(f.chi(b)));
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let f = gf(3, 2);
        for z in f.ext_elements() {
            let s = format_ext(z);
            assert_eq!(parse_ext(&s, f.q()).unwrap(), z);
        }
        assert!(parse_ext("9", 9).is_err());
        assert!(parse_ext("1+e*9", 9).is_err());
        assert!(parse_ext("x", 9).is_err());
        assert_eq!(parse_ext(" 2+e*0 ", 9).unwrap(), f.embed(FieldElem(2)));
    }
}
