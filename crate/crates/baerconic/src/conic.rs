//! Conics over GF(q²): nonsingularity, external/internal/on classification,
//! the brute-force count of external subplane points (the oracle the whole
//! repository is validated against), and reduction to the normalized form
//! aX² + bXY + cXZ + dYZ + eZ² through (0:1:0).

use crate::gf::{format_ext, parse_ext, ExtElem, FieldCtx, QuadClass};
use crate::proj::{Collineation, ProjLine, ProjPoint};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConicError {
    #[error("conic is singular (zero determinant)")]
    Singular,
    #[error("coefficients must not all vanish")]
    AllZero,
    #[error("conic has no rational point in the subplane")]
    NoSubplanePoint,
    #[error("cannot parse conic: {0}")]
    Parse(String),
}

/// Which field the square classes are taken in. A conic with base-field
/// coefficients can be classified inside its own plane PG(2,q); the
/// arithmetic is identical and only the quadratic character changes.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum FieldView {
    Base,
    Ext,
}

fn chi_in(ctx: &FieldCtx, view: FieldView, z: ExtElem) -> QuadClass {
    match view {
        FieldView::Ext => ctx.ext_chi(z),
        FieldView::Base => {
            debug_assert!(ctx.is_in_base(z));
            ctx.chi(z.z1)
        }
    }
}

/// Position of a point relative to a nonsingular conic.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    OnConic,
    External,
    Internal,
}

/// Nonsingular conic aX² + bXY + cY² + dXZ + eYZ + fZ² = 0 over GF(q²).
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Conic {
    pub coeffs: [ExtElem; 6],
}

/// Brute-force census of the subplane relative to a conic.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub struct Census {
    pub external: u64,
    pub internal: u64,
    pub on_conic: u64,
}

impl Conic {
    pub fn new(ctx: &FieldCtx, coeffs: [ExtElem; 6]) -> Result<Conic, ConicError> {
        if coeffs.iter().all(|&c| ctx.ext_is_zero(c)) {
            return Err(ConicError::AllZero);
        }
        let conic = Conic { coeffs };
        if ctx.ext_is_zero(conic.det_scaled(ctx)) {
            return Err(ConicError::Singular);
        }
        Ok(conic)
    }

    /// Conic in the five-coefficient normalized shape (no Y² term), i.e.
    /// aX² + bXY + cXZ + dYZ + eZ².
    pub fn from_eq1(ctx: &FieldCtx, c: [ExtElem; 5]) -> Result<Conic, ConicError> {
        let [a, b, cc, d, e] = c;
        Conic::new(ctx, [a, b, ctx.ext_zero(), cc, d, e])
    }

    /// Conic from a symmetric matrix given doubled (entries of 2𝒜).
    pub fn from_scaled_matrix(ctx: &FieldCtx, m: &[[ExtElem; 3]; 3]) -> Result<Conic, ConicError> {
        let half = ctx.embed(ctx.inv(ctx.elem(2)));
        let h = |z| ctx.ext_scale(half.z1, z);
        Conic::new(
            ctx,
            [h(m[0][0]), m[0][1], h(m[1][1]), m[0][2], m[1][2], h(m[2][2])],
        )
    }

    /// det(2𝒜) = 8·det 𝒜; zero exactly when the conic is singular.
    fn det_scaled(&self, ctx: &FieldCtx) -> ExtElem {
        let m = self.scaled_matrix(ctx);
        crate::proj::det3(ctx, &m)
    }

    /// The matrix 2𝒜: diagonal 2a, 2c, 2f and off-diagonal b, d, e. Using the
    /// doubled matrix avoids divisions; every classification below is
    /// invariant under this scaling.
    pub fn scaled_matrix(&self, ctx: &FieldCtx) -> [[ExtElem; 3]; 3] {
        let [a, b, c, d, e, f] = self.coeffs;
        let two = |z| ctx.ext_add(z, z);
        [
            [two(a), b, d],
            [b, two(c), e],
            [d, e, two(f)],
        ]
    }

    /// The symmetric matrix 𝒜 itself (diagonal a_ii, off-diagonal a_ij/2).
    pub fn matrix(&self, ctx: &FieldCtx) -> [[ExtElem; 3]; 3] {
        let half = ctx.inv(ctx.elem(2));
        self.scaled_matrix(ctx).map(|row| row.map(|z| ctx.ext_scale(half, z)))
    }

    /// Evaluates the defining form at P. Zero exactly when P is on the conic.
    #[inline]
    pub fn eval(&self, ctx: &FieldCtx, p: &ProjPoint) -> ExtElem {
        let [a, b, c, d, e, f] = self.coeffs;
        let [x, y, z] = p.coords;
        let mut acc = ctx.ext_mul(a, ctx.ext_mul(x, x));
        acc = ctx.ext_add(acc, ctx.ext_mul(b, ctx.ext_mul(x, y)));
        acc = ctx.ext_add(acc, ctx.ext_mul(c, ctx.ext_mul(y, y)));
        acc = ctx.ext_add(acc, ctx.ext_mul(d, ctx.ext_mul(x, z)));
        acc = ctx.ext_add(acc, ctx.ext_mul(e, ctx.ext_mul(y, z)));
        acc = ctx.ext_add(acc, ctx.ext_mul(f, ctx.ext_mul(z, z)));
        acc
    }

    /// 2·Pᵗ𝒜Q, the polarization of the form.
    #[inline]
    fn bilinear_scaled(&self, ctx: &FieldCtx, p: &[ExtElem; 3], r: &[ExtElem; 3]) -> ExtElem {
        let [a, b, c, d, e, f] = self.coeffs;
        let two = |z| ctx.ext_add(z, z);
        let mut acc = ctx.ext_mul(two(a), ctx.ext_mul(p[0], r[0]));
        acc = ctx.ext_add(acc, ctx.ext_mul(two(c), ctx.ext_mul(p[1], r[1])));
        acc = ctx.ext_add(acc, ctx.ext_mul(two(f), ctx.ext_mul(p[2], r[2])));
        let sym = |u: ExtElem, i: usize, j: usize| {
            ctx.ext_mul(
                u,
                ctx.ext_add(ctx.ext_mul(p[i], r[j]), ctx.ext_mul(p[j], r[i])),
            )
        };
        acc = ctx.ext_add(acc, sym(b, 0, 1));
        acc = ctx.ext_add(acc, sym(d, 0, 2));
        acc = ctx.ext_add(acc, sym(e, 1, 2));
        acc
    }

    /// Polar line of P (gradient coordinates, 2𝒜·P).
    pub fn polar(&self, ctx: &FieldCtx, p: &ProjPoint) -> ProjLine {
        let m = self.scaled_matrix(ctx);
        let mut coords = [ctx.ext_zero(); 3];
        for i in 0..3 {
            for j in 0..3 {
                coords[i] = ctx.ext_add(coords[i], ctx.ext_mul(m[i][j], p.coords[j]));
            }
        }
        ProjLine::new(ctx, coords)
    }

    /// Number of points of the conic on the given line: 0, 1, or 2.
    pub fn line_intersections(&self, ctx: &FieldCtx, view: FieldView, line: &ProjLine) -> u8 {
        let (pa, pb) = crate::proj::line_span(ctx, line);
        // Restrict the form to λ·pa + μ·pb; the (doubled) discriminant of
        // the binary quadratic decides the number of rational roots.
        let s = self.eval(ctx, &ProjPoint { coords: pa });
        let t = self.eval(ctx, &ProjPoint { coords: pb });
        let m = self.bilinear_scaled(ctx, &pa, &pb);
        let four_st = {
            let st = ctx.ext_mul(s, t);
            let st2 = ctx.ext_add(st, st);
            ctx.ext_add(st2, st2)
        };
        let disc = ctx.ext_sub(ctx.ext_mul(m, m), four_st);
        match chi_in(ctx, view, disc) {
            QuadClass::Square => 2,
            QuadClass::Zero => 1,
            QuadClass::NonSquare => 0,
        }
    }

    /// Classification by the polar-line method: P is on the conic when the
    /// form vanishes, external when its polar is a secant, internal when the
    /// polar misses the conic.
    pub fn classify_in(&self, ctx: &FieldCtx, view: FieldView, p: &ProjPoint) -> PointClass {
        if ctx.ext_is_zero(self.eval(ctx, p)) {
            return PointClass::OnConic;
        }
        let polar = self.polar(ctx, p);
        match self.line_intersections(ctx, view, &polar) {
            2 => PointClass::External,
            0 => PointClass::Internal,
            _ => unreachable!(
                "polar of an off-conic point is tangent: impossible for a nonsingular conic in odd characteristic"
            ),
        }
    }

    /// Classification of a point of PG(2,q²).
    pub fn classify_point(&self, ctx: &FieldCtx, p: &ProjPoint) -> PointClass {
        self.classify_in(ctx, FieldView::Ext, p)
    }

    /// Square class of Pᵗ𝒜P in GF(q²). External points share one class and
    /// internal points the other; which is which depends on the scaling of
    /// the conic equation.
    pub fn joachimsthal_class(&self, ctx: &FieldCtx, p: &ProjPoint) -> QuadClass {
        // eval is Pᵗ𝒜P itself; scaling by 4 (from the doubled matrix
        // elsewhere) never changes a square class.
        ctx.ext_chi(self.eval(ctx, p))
    }

    /// Brute-force census of the subplane: E_q is `external` and k is
    /// `on_conic`. This is the oracle; it never looks at the pipeline.
    pub fn count_externals_in_subplane(&self, ctx: &FieldCtx, subplane: &[ProjPoint]) -> Census {
        let mut census = Census::default();
        for p in subplane {
            match self.classify_point(ctx, p) {
                PointClass::External => census.external += 1,
                PointClass::Internal => census.internal += 1,
                PointClass::OnConic => census.on_conic += 1,
            }
        }
        census
    }

    /// First subplane point on the conic in canonical order, if any.
    pub fn find_subplane_point(&self, ctx: &FieldCtx, subplane: &[ProjPoint]) -> Option<ProjPoint> {
        subplane
            .iter()
            .copied()
            .find(|p| ctx.ext_is_zero(self.eval(ctx, p)))
    }

    /// True when some scalar multiple of the coefficient vector lies in
    /// GF(q)⁶, i.e. the conic is defined over the base field.
    pub fn is_defined_over_fq(&self, ctx: &FieldCtx) -> bool {
        let lead = self
            .coeffs
            .iter()
            .find(|&&c| !ctx.ext_is_zero(c))
            .expect("conic has a nonzero coefficient");
        let inv = ctx.ext_inv(*lead);
        self.coeffs
            .iter()
            .all(|&c| ctx.is_in_base(ctx.ext_mul(c, inv)))
    }

    /// Canonical text form: six comma-separated extension elements.
    pub fn to_text(&self) -> String {
        self.coeffs
            .iter()
            .map(|&c| format_ext(c))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Conic, ConicError> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 6 {
            return Err(ConicError::Parse(format!(
                "expected 6 comma-separated coefficients, got {}",
                parts.len()
            )));
        }
        let mut coeffs = [ctx.ext_zero(); 6];
        for (slot, part) in coeffs.iter_mut().zip(&parts) {
            *slot = parse_ext(part, ctx.q()).map_err(ConicError::Parse)?;
        }
        Conic::new(ctx, coeffs)
    }

    /// Reduces the conic to the five-coefficient form through (0:1:0) by a
    /// base-field collineation, with b ≠ 0 (swapping X and Z if needed) and
    /// with −bcd + ad² + b²e a square of GF(q²) (rescaling by a non-square
    /// otherwise). Base-field collineations permute the subplane, so the
    /// external count is untouched; rescaling fixes which square class the
    /// external points carry.
    pub fn normalize(
        &self,
        ctx: &FieldCtx,
        subplane: &[ProjPoint],
    ) -> Result<NormalizedConic, ConicError> {
        let y_axis = ProjPoint::from_base(ctx, [0, 1, 0]);
        let col = if ctx.ext_is_zero(self.eval(ctx, &y_axis)) {
            Collineation::identity(ctx)
        } else {
            let p0 = self
                .find_subplane_point(ctx, subplane)
                .ok_or(ConicError::NoSubplanePoint)?;
            basis_through(ctx, &p0)
        };

        // Transform 2𝒜 ↦ Mᵗ(2𝒜)M and read the five coefficients off it.
        let m2 = transform_scaled(ctx, &self.scaled_matrix(ctx), &col);
        debug_assert!(ctx.ext_is_zero(m2[1][1]), "image conic must pass through (0:1:0)");
        let half = ctx.inv(ctx.elem(2));
        let mut a = ctx.ext_scale(half, m2[0][0]);
        let mut b = m2[0][1];
        let c = m2[0][2];
        let mut d = m2[1][2];
        let mut e = ctx.ext_scale(half, m2[2][2]);

        let mut col = col;
        if ctx.ext_is_zero(b) {
            // Apply (X:Y:Z) ↦ (Z:Y:X), which swaps b with d and a with e.
            col = col.compose(ctx, &Collineation::swap_xz(ctx));
            std::mem::swap(&mut a, &mut e);
            std::mem::swap(&mut b, &mut d);
        }
        assert!(
            !ctx.ext_is_zero(b),
            "b = d = 0 would make the conic singular"
        );

        // Square-class normalization of −bcd + ad² + b²e.
        let mut coeffs = [a, b, c, d, e];
        let v = eq1_disc(ctx, &coeffs);
        assert!(!ctx.ext_is_zero(v), "nonsingular conic has nonzero class value");
        let scalar = if ctx.ext_chi(v) == QuadClass::NonSquare {
            let alpha = ctx.ext_nonsquare();
            for cf in coeffs.iter_mut() {
                *cf = ctx.ext_mul(alpha, *cf);
            }
            alpha
        } else {
            ctx.ext_one()
        };
        debug_assert_eq!(ctx.ext_chi(eq1_disc(ctx, &coeffs)), QuadClass::Square);

        Ok(NormalizedConic { coeffs, collineation: col, scalar })
    }
}

/// −bcd + ad² + b²e for five-coefficient conics; this is −4·det 𝒜, so it is
/// nonzero exactly for nonsingular conics, and it is the Pᵗ𝒜P value of a
/// distinguished external point on the tangent at (0:1:0).
pub fn eq1_disc(ctx: &FieldCtx, c: &[ExtElem; 5]) -> ExtElem {
    let [a, b, cc, d, e] = *c;
    let ad2 = ctx.ext_mul(a, ctx.ext_mul(d, d));
    let b2e = ctx.ext_mul(ctx.ext_mul(b, b), e);
    let bcd = ctx.ext_mul(b, ctx.ext_mul(cc, d));
    ctx.ext_sub(ctx.ext_add(ad2, b2e), bcd)
}

/// Base-field collineation with P as the image of (0:1:0), completed by the
/// two standard basis vectors with smallest indices keeping it invertible.
fn basis_through(ctx: &FieldCtx, p: &ProjPoint) -> Collineation {
    debug_assert!(p.is_subplane(ctx));
    let std_basis: [[u16; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let ei = std_basis[i].map(|v| ctx.embed(ctx.elem(v)));
            let ej = std_basis[j].map(|v| ctx.embed(ctx.elem(v)));
            let m = [
                [ei[0], p.coords[0], ej[0]],
                [ei[1], p.coords[1], ej[1]],
                [ei[2], p.coords[2], ej[2]],
            ];
            if let Ok(col) = Collineation::new(ctx, m) {
                return col;
            }
        }
    }
    unreachable!("a nonzero point extends to some standard basis pair")
}

/// Mᵗ S M for the doubled conic matrix S.
fn transform_scaled(
    ctx: &FieldCtx,
    s: &[[ExtElem; 3]; 3],
    col: &Collineation,
) -> [[ExtElem; 3]; 3] {
    let mut sm = [[ctx.ext_zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                sm[i][j] = ctx.ext_add(sm[i][j], ctx.ext_mul(s[i][k], col.m[k][j]));
            }
        }
    }
    let mut out = [[ctx.ext_zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] = ctx.ext_add(out[i][j], ctx.ext_mul(col.m[k][i], sm[k][j]));
            }
        }
    }
    out
}

/// Conic in the shape aX² + bXY + cXZ + dYZ + eZ² = 0 (through (0:1:0)),
/// together with the base-field collineation and scalar that produced it.
#[derive(Clone, Debug)]
pub struct NormalizedConic {
    /// (a, b, c, d, e) with b ≠ 0 and −bcd + ad² + b²e a square of GF(q²).
    pub coeffs: [ExtElem; 5],
    pub collineation: Collineation,
    pub scalar: ExtElem,
}

impl NormalizedConic {
    pub fn to_conic(&self, ctx: &FieldCtx) -> Conic {
        Conic::from_eq1(ctx, self.coeffs).expect("normalized conic stays nonsingular")
    }
}
