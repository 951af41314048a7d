//! Projective spaces over the field tower: PG(2,q²) and its canonical Baer
//! subplane PG(2,q), plus PG(3,q) point enumeration for surface counting.
//!
//! Points and lines are normalized so that the first nonzero coordinate is 1,
//! which makes equality componentwise. The canonical enumeration order lists
//! representatives with leading coordinate 1 first, tails ascending in the
//! element order, then the shorter blocks; it is fixed so that runs are
//! reproducible.

use crate::gf::{ExtElem, FieldCtx, FieldElem};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjError {
    #[error("collineation matrix is singular")]
    SingularMatrix,
}

/// Point of PG(2,q²) (or of the embedded PG(2,q)), normalized.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjPoint {
    pub coords: [ExtElem; 3],
}

/// Line of PG(2,q²) in dual coordinates, normalized the same way.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjLine {
    pub coords: [ExtElem; 3],
}

fn normalize3(ctx: &FieldCtx, mut v: [ExtElem; 3]) -> [ExtElem; 3] {
    let lead = v
        .iter()
        .position(|&c| !ctx.ext_is_zero(c))
        .expect("projective coordinates must not all vanish");
    let s = ctx.ext_inv(v[lead]);
    for c in v.iter_mut() {
        *c = ctx.ext_mul(s, *c);
    }
    v
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, coords: [ExtElem; 3]) -> ProjPoint {
        ProjPoint { coords: normalize3(ctx, coords) }
    }

    /// Point with coordinates in the base field, given as element indices.
    pub fn from_base(ctx: &FieldCtx, idx: [u16; 3]) -> ProjPoint {
        ProjPoint::new(ctx, idx.map(|i| ctx.embed(ctx.elem(i))))
    }

    /// True when every coordinate of the normalized representative lies in
    /// GF(q), i.e. the point belongs to the Baer subplane.
    pub fn is_subplane(&self, ctx: &FieldCtx) -> bool {
        self.coords.iter().all(|&c| ctx.is_in_base(c))
    }
}

impl ProjLine {
    pub fn new(ctx: &FieldCtx, coords: [ExtElem; 3]) -> ProjLine {
        ProjLine { coords: normalize3(ctx, coords) }
    }

    pub fn contains(&self, ctx: &FieldCtx, p: &ProjPoint) -> bool {
        let mut acc = ctx.ext_zero();
        for i in 0..3 {
            acc = ctx.ext_add(acc, ctx.ext_mul(self.coords[i], p.coords[i]));
        }
        ctx.ext_is_zero(acc)
    }
}

/// Number of points of `pts` incident with the line.
pub fn incidence_count(ctx: &FieldCtx, line: &ProjLine, pts: &[ProjPoint]) -> usize {
    pts.iter().filter(|p| line.contains(ctx, p)).count()
}

/// Invertible 3×3 matrix acting on points by multiplication.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Collineation {
    pub m: [[ExtElem; 3]; 3],
}

pub fn det3(ctx: &FieldCtx, m: &[[ExtElem; 3]; 3]) -> ExtElem {
    let mut det = ctx.ext_zero();
    for (c0, c1, c2, sign) in [
        (0, 1, 2, false),
        (1, 2, 0, false),
        (2, 0, 1, false),
        (2, 1, 0, true),
        (1, 0, 2, true),
        (0, 2, 1, true),
    ] {
        let t = ctx.ext_mul(m[0][c0], ctx.ext_mul(m[1][c1], m[2][c2]));
        det = ctx.ext_add(det, if sign { ctx.ext_neg(t) } else { t });
    }
    det
}

impl Collineation {
    pub fn new(ctx: &FieldCtx, m: [[ExtElem; 3]; 3]) -> Result<Collineation, ProjError> {
        if ctx.ext_is_zero(det3(ctx, &m)) {
            return Err(ProjError::SingularMatrix);
        }
        Ok(Collineation { m })
    }

    pub fn identity(ctx: &FieldCtx) -> Collineation {
        let mut m = [[ctx.ext_zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ctx.ext_one();
        }
        Collineation { m }
    }

    /// (X:Y:Z) ↦ (Z:Y:X).
    pub fn swap_xz(ctx: &FieldCtx) -> Collineation {
        let o = ctx.ext_zero();
        let l = ctx.ext_one();
        Collineation { m: [[o, o, l], [o, l, o], [l, o, o]] }
    }

    pub fn apply(&self, ctx: &FieldCtx, p: &ProjPoint) -> ProjPoint {
        let mut out = [ctx.ext_zero(); 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] = ctx.ext_add(out[i], ctx.ext_mul(self.m[i][j], p.coords[j]));
            }
        }
        ProjPoint::new(ctx, out)
    }

    /// Composition: (self ∘ other)(P) = self(other(P)).
    pub fn compose(&self, ctx: &FieldCtx, other: &Collineation) -> Collineation {
        let mut m = [[ctx.ext_zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for (k, row) in other.m.iter().enumerate() {
                    m[i][j] = ctx.ext_add(m[i][j], ctx.ext_mul(self.m[i][k], row[j]));
                }
            }
        }
        Collineation { m }
    }

    pub fn is_over_base(&self, ctx: &FieldCtx) -> bool {
        self.m.iter().flatten().all(|&c| ctx.is_in_base(c))
    }
}

/// The q²+q+1 points of the Baer subplane PG(2,q), embedded in PG(2,q²),
/// in canonical order.
pub fn subplane_points(ctx: &FieldCtx) -> Vec<ProjPoint> {
    let q = ctx.q();
    let mut pts = Vec::with_capacity(q as usize * q as usize + q as usize + 1);
    let one = ctx.ext_one();
    for y in 0..q {
        for z in 0..q {
            pts.push(ProjPoint {
                coords: [one, ctx.embed(ctx.elem(y)), ctx.embed(ctx.elem(z))],
            });
        }
    }
    for z in 0..q {
        pts.push(ProjPoint {
            coords: [ctx.ext_zero(), one, ctx.embed(ctx.elem(z))],
        });
    }
    pts.push(ProjPoint { coords: [ctx.ext_zero(), ctx.ext_zero(), one] });
    pts
}

/// The q⁴+q²+1 points of PG(2,q²), in canonical order.
pub fn plane_points(ctx: &FieldCtx) -> Vec<ProjPoint> {
    let qq = ctx.q() as u32 * ctx.q() as u32;
    let mut pts = Vec::with_capacity((qq * qq + qq + 1) as usize);
    let one = ctx.ext_one();
    for y in 0..qq {
        for z in 0..qq {
            pts.push(ProjPoint {
                coords: [one, ctx.ext_from_index(y), ctx.ext_from_index(z)],
            });
        }
    }
    for z in 0..qq {
        pts.push(ProjPoint {
            coords: [ctx.ext_zero(), one, ctx.ext_from_index(z)],
        });
    }
    pts.push(ProjPoint { coords: [ctx.ext_zero(), ctx.ext_zero(), one] });
    pts
}

/// The q³+q²+q+1 points of PG(3,q), as normalized base-field 4-tuples.
pub fn pg3_points(ctx: &FieldCtx) -> Vec<[FieldElem; 4]> {
    let q = ctx.q();
    let n = (q as usize).pow(3) + (q as usize).pow(2) + q as usize + 1;
    let mut pts = Vec::with_capacity(n);
    let (zero, one) = (ctx.zero(), ctx.one());
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                pts.push([one, ctx.elem(a), ctx.elem(b), ctx.elem(c)]);
            }
        }
    }
    for b in 0..q {
        for c in 0..q {
            pts.push([zero, one, ctx.elem(b), ctx.elem(c)]);
        }
    }
    for c in 0..q {
        pts.push([zero, zero, one, ctx.elem(c)]);
    }
    pts.push([zero, zero, zero, one]);
    pts
}

/// All q²+1 points of PG(2,q²) on a line (two-point parametrization).
pub fn points_on_line(ctx: &FieldCtx, line: &ProjLine) -> Vec<ProjPoint> {
    let (p, r) = line_span(ctx, line);
    let qq = ctx.q() as u32 * ctx.q() as u32;
    let mut pts = Vec::with_capacity(qq as usize + 1);
    pts.push(ProjPoint::new(ctx, p));
    for t in 0..qq {
        let s = ctx.ext_from_index(t);
        let mut v = r;
        for i in 0..3 {
            v[i] = ctx.ext_add(v[i], ctx.ext_mul(s, p[i]));
        }
        pts.push(ProjPoint::new(ctx, v));
    }
    pts
}

/// Two independent points spanning the line ℓ: l₀x + l₁y + l₂z = 0.
pub fn line_span(ctx: &FieldCtx, line: &ProjLine) -> ([ExtElem; 3], [ExtElem; 3]) {
    let [l0, l1, l2] = line.coords;
    let o = ctx.ext_zero();
    if !ctx.ext_is_zero(l0) {
        (
            [ctx.ext_neg(l1), l0, o],
            [ctx.ext_neg(l2), o, l0],
        )
    } else if !ctx.ext_is_zero(l1) {
        ([ctx.ext_one(), o, o], [o, ctx.ext_neg(l2), l1])
    } else {
        ([ctx.ext_one(), o, o], [o, ctx.ext_one(), o])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::QuadClass;
    use std::collections::HashSet;

    #[test]
    fn enumeration_counts_and_uniqueness() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let sub = subplane_points(&f3);
        assert_eq!(sub.len(), 13);
        let full = plane_points(&f3);
        assert_eq!(full.len(), 91);
        let pg3 = pg3_points(&f3);
        assert_eq!(pg3.len(), 40);
        assert_eq!(sub.iter().collect::<HashSet<_>>().len(), 13);
        assert_eq!(full.iter().collect::<HashSet<_>>().len(), 91);
        assert_eq!(pg3.iter().collect::<HashSet<_>>().len(), 40);

        let f9 = FieldCtx::new(3, 2).unwrap();
        assert_eq!(subplane_points(&f9).len(), 91);

        let f5 = FieldCtx::new(5, 1).unwrap();
        assert_eq!(plane_points(&f5).len(), 651);

        // Every subplane point is detected as such; counts agree.
        assert!(sub.iter().all(|p| p.is_subplane(&f3)));
        assert_eq!(full.iter().filter(|p| p.is_subplane(&f3)).count(), 13);
    }

    #[test]
    fn enumeration_order_is_canonical() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let sub = subplane_points(&f3);
        assert_eq!(sub[0], ProjPoint::from_base(&f3, [1, 0, 0]));
        assert_eq!(sub[1], ProjPoint::from_base(&f3, [1, 0, 1]));
        assert_eq!(*sub.last().unwrap(), ProjPoint::from_base(&f3, [0, 0, 1]));
    }

    #[test]
    fn subplane_membership_examples() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let e = f3.eps();
        let one = f3.ext_one();
        let zero = f3.ext_zero();
        assert!(ProjPoint::new(&f3, [zero, one, zero]).is_subplane(&f3));
        assert!(!ProjPoint::new(&f3, [e, zero, one]).is_subplane(&f3));
        // (ε:ε:0) normalizes to (1:1:0).
        let p = ProjPoint::new(&f3, [e, e, zero]);
        assert_eq!(p, ProjPoint::from_base(&f3, [1, 1, 0]));
        assert!(p.is_subplane(&f3));
    }

    #[test]
    fn normalization_idempotent_and_scale_invariant() {
        let f = FieldCtx::new(3, 2).unwrap();
        for z in f.ext_elements().skip(1) {
            let p = ProjPoint::new(&f, [z, f.ext_mul(z, f.eps()), f.ext_one()]);
            let again = ProjPoint::new(&f, p.coords);
            assert_eq!(p, again);
            // Rescaling the underlying vector gives the same point.
            let scaled = ProjPoint::new(
                &f,
                [
                    f.ext_mul(z, z),
                    f.ext_mul(z, f.ext_mul(z, f.eps())),
                    z,
                ],
            );
            assert_eq!(p, scaled);
        }
    }

    #[test]
    fn incidence_rescale_invariant() {
        let f = FieldCtx::new(3, 1).unwrap();
        let line = ProjLine::new(&f, [f.ext_one(), f.eps(), f.ext_one()]);
        for p in plane_points(&f) {
            let hit = line.contains(&f, &p);
            for s in f.ext_elements().skip(1) {
                let l2 = ProjLine::new(&f, line.coords.map(|c| f.ext_mul(s, c)));
                assert_eq!(l2.contains(&f, &p), hit);
            }
            if hit {
                // sanity: the spanning pair really lies on the line
                let (a, b) = line_span(&f, &line);
                assert!(line.contains(&f, &ProjPoint::new(&f, a)));
                assert!(line.contains(&f, &ProjPoint::new(&f, b)));
            }
        }
    }

    #[test]
    fn line_has_q_squared_plus_one_points() {
        let f = FieldCtx::new(3, 1).unwrap();
        for coords in [
            [f.ext_one(), f.ext_zero(), f.ext_zero()],
            [f.ext_one(), f.eps(), f.ext_one()],
            [f.ext_zero(), f.ext_one(), f.eps()],
        ] {
            let line = ProjLine::new(&f, coords);
            let pts = points_on_line(&f, &line);
            assert_eq!(pts.len(), 10);
            assert_eq!(pts.iter().collect::<HashSet<_>>().len(), 10);
            assert!(pts.iter().all(|p| line.contains(&f, p)));
        }
    }

    #[test]
    fn collineation_examples() {
        let f = FieldCtx::new(3, 1).unwrap();
        let id = Collineation::identity(&f);
        let p = ProjPoint::new(&f, [f.eps(), f.ext_one(), f.ext_zero()]);
        assert_eq!(id.apply(&f, &p), p);

        let swap = Collineation::swap_xz(&f);
        let y_axis = ProjPoint::from_base(&f, [0, 1, 0]);
        assert_eq!(swap.apply(&f, &y_axis), y_axis);
        assert_eq!(
            swap.apply(&f, &ProjPoint::from_base(&f, [1, 2, 0])),
            ProjPoint::from_base(&f, [0, 2, 1])
        );

        let singular = [[f.ext_one(), f.ext_one(), f.ext_zero()]; 3];
        assert_eq!(Collineation::new(&f, singular), Err(ProjError::SingularMatrix));
    }

    #[test]
    fn base_collineations_preserve_subplane() {
        // Exhaustive over a few invertible GF(q) matrices and all points.
        let f = FieldCtx::new(3, 1).unwrap();
        let mats = [
            [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
            [[1, 2, 0], [0, 1, 1], [1, 0, 1]],
            [[2, 1, 1], [1, 1, 0], [0, 2, 1]],
        ];
        for m in mats {
            let mm = m.map(|row: [u16; 3]| row.map(|v| f.embed(f.elem(v))));
            let col = match Collineation::new(&f, mm) {
                Ok(c) => c,
                Err(_) => continue,
            };
            assert!(col.is_over_base(&f));
            for p in plane_points(&f) {
                assert_eq!(p.is_subplane(&f), col.apply(&f, &p).is_subplane(&f));
            }
        }
    }

    #[test]
    fn incidence_count_examples() {
        // Conic XZ − Y² = 0 over GF(9): its points against test lines.
        let f = FieldCtx::new(3, 1).unwrap();
        let conic_pts: Vec<ProjPoint> = plane_points(&f)
            .into_iter()
            .filter(|p| {
                let [x, y, z] = p.coords;
                f.ext_is_zero(f.ext_sub(f.ext_mul(x, z), f.ext_mul(y, y)))
            })
            .collect();
        assert_eq!(conic_pts.len(), 10); // q² + 1

        let x0 = ProjLine::new(&f, [f.ext_one(), f.ext_zero(), f.ext_zero()]);
        assert_eq!(incidence_count(&f, &x0, &conic_pts), 1); // tangent at (0:0:1)
        let y0 = ProjLine::new(&f, [f.ext_zero(), f.ext_one(), f.ext_zero()]);
        assert_eq!(incidence_count(&f, &y0, &conic_pts), 2); // (1:0:0), (0:0:1)
        assert_eq!(incidence_count(&f, &y0, &[]), 0);

        // Quadratic-character sanity for the same conic's tangent line count.
        assert_eq!(f.ext_chi(f.ext_one()), QuadClass::Square);
    }
}
