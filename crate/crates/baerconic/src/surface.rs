//! The cubic surface of PG(3,q) attached to a normalized conic.
//!
//! Writing each coefficient of aX² + bXY + cXZ + dYZ + eZ² as z₁ + εz₂ and
//! the unknown square as (t₁ + εt₂)², eliminating Y turns the external-point
//! condition into the surface
//!
//!   2t₁t₂(b₁X + d₁Z) − (t₁² + ωt₂²)(b₂X + d₂Z) + c₃₀X³ + c₂₁X²Z + c₁₂XZ² + c₀₃Z³ = 0
//!
//! with cubic coefficients built from the conic components. Point counting is
//! done by exhaustive evaluation over PG(3,q), so the closed point-count
//! formulas asserted elsewhere are measured rather than assumed.

use crate::conic::NormalizedConic;
use crate::gf::{FieldCtx, FieldElem};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("cubic part vanishes identically; the source conic is singular")]
    DegenerateCubic,
}

/// GF(q) components of the five conic coefficients, zᵢ = zᵢ₁ + εzᵢ₂.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct ComponentCoeffs {
    pub a1: FieldElem,
    pub a2: FieldElem,
    pub b1: FieldElem,
    pub b2: FieldElem,
    pub c1: FieldElem,
    pub c2: FieldElem,
    pub d1: FieldElem,
    pub d2: FieldElem,
    pub e1: FieldElem,
    pub e2: FieldElem,
}

impl ComponentCoeffs {
    pub fn decompose(nc: &NormalizedConic) -> ComponentCoeffs {
        let [a, b, c, d, e] = nc.coeffs;
        ComponentCoeffs {
            a1: a.z1,
            a2: a.z2,
            b1: b.z1,
            b2: b.z2,
            c1: c.z1,
            c2: c.z2,
            d1: d.z1,
            d2: d.z2,
            e1: e.z1,
            e2: e.z2,
        }
    }

    /// Reassembles the conic coefficients; exact by construction.
    pub fn reassemble(&self, ctx: &FieldCtx) -> [crate::gf::ExtElem; 5] {
        [
            ctx.ext(self.a1, self.a2),
            ctx.ext(self.b1, self.b2),
            ctx.ext(self.c1, self.c2),
            ctx.ext(self.d1, self.d2),
            ctx.ext(self.e1, self.e2),
        ]
    }
}

/// Coefficient record of the cubic surface.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct CubicSurface {
    pub b1: FieldElem,
    pub b2: FieldElem,
    pub d1: FieldElem,
    pub d2: FieldElem,
    /// Coefficients of X³, X²Z, XZ², Z³.
    pub c30: FieldElem,
    pub c21: FieldElem,
    pub c12: FieldElem,
    pub c03: FieldElem,
    pub omega: FieldElem,
}

/// Point totals from exhaustive evaluation over PG(3,q).
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct SurfaceCounts {
    pub s_q: u64,
    /// Points with t₁ = t₂ = 0 (they correspond to subplane points of the
    /// conic other than the eliminated (0:1:0)).
    pub n0: u64,
    /// Points with X = Z = 0; always q + 1.
    pub n_inf: u64,
}

/// Shape of the tangent cone at a double point.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum ConeKind {
    QuadricCone,
    PlanePairRational,
    PlanePairConjugate,
}

impl ConeKind {
    /// Rational lines through the singular point inside the tangent cone.
    pub fn lines_in_cone(&self, q: u64) -> u64 {
        match self {
            ConeKind::QuadricCone => q + 1,
            ConeKind::PlanePairRational => 2 * q + 1,
            ConeKind::PlanePairConjugate => 1,
        }
    }
}

/// Result of the singularity search.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Singularity {
    Smooth,
    Double {
        point: [FieldElem; 4],
        /// X/Z of the singular point; `None` means (0:0:1:0).
        beta: Option<FieldElem>,
        /// Discriminant of the t-part of the tangent cone; its square class
        /// separates rational from conjugate plane pairs.
        beta1: FieldElem,
        cone: ConeKind,
        /// Lines through the double point contained in the surface.
        alpha_lines: u64,
    },
}

impl CubicSurface {
    /// Builds the surface record; the four cubic coefficients come from the
    /// cross-component products of the conic coefficients.
    pub fn build(ctx: &FieldCtx, cc: &ComponentCoeffs) -> Result<CubicSurface, SurfaceError> {
        let m = |x, y| ctx.mul(x, y);
        let sub = |x, y| ctx.sub(x, y);
        // c30 = a₁b₂ − a₂b₁
        let c30 = sub(m(cc.a1, cc.b2), m(cc.a2, cc.b1));
        // c21 = b₂c₁ − b₁c₂ − a₂d₁ + a₁d₂
        let c21 = ctx.add(
            sub(m(cc.b2, cc.c1), m(cc.b1, cc.c2)),
            sub(m(cc.a1, cc.d2), m(cc.a2, cc.d1)),
        );
        // c12 = c₁d₂ − c₂d₁ + b₂e₁ − b₁e₂
        let c12 = ctx.add(
            sub(m(cc.c1, cc.d2), m(cc.c2, cc.d1)),
            sub(m(cc.b2, cc.e1), m(cc.b1, cc.e2)),
        );
        // c03 = d₂e₁ − d₁e₂
        let c03 = sub(m(cc.d2, cc.e1), m(cc.d1, cc.e2));
        let zero = ctx.zero();
        if c30 == zero && c21 == zero && c12 == zero && c03 == zero {
            return Err(SurfaceError::DegenerateCubic);
        }
        Ok(CubicSurface {
            b1: cc.b1,
            b2: cc.b2,
            d1: cc.d1,
            d2: cc.d2,
            c30,
            c21,
            c12,
            c03,
            omega: ctx.omega(),
        })
    }

    /// The surface splits off the tangent plane exactly when b₁d₂ = b₂d₁.
    pub fn is_reducible(&self, ctx: &FieldCtx) -> bool {
        ctx.mul(self.b1, self.d2) == ctx.mul(self.b2, self.d1)
    }

    /// The binary cubic g(X,Z) on the t₁ = t₂ = 0 line.
    #[inline]
    pub fn cubic_at(&self, ctx: &FieldCtx, x: FieldElem, z: FieldElem) -> FieldElem {
        let xx = ctx.mul(x, x);
        let zz = ctx.mul(z, z);
        let mut acc = ctx.mul(self.c30, ctx.mul(xx, x));
        acc = ctx.add(acc, ctx.mul(self.c21, ctx.mul(xx, z)));
        acc = ctx.add(acc, ctx.mul(self.c12, ctx.mul(x, zz)));
        ctx.add(acc, ctx.mul(self.c03, ctx.mul(z, zz)))
    }

    /// Full form F(t₁,t₂,X,Z).
    #[inline]
    pub fn eval(
        &self,
        ctx: &FieldCtx,
        t1: FieldElem,
        t2: FieldElem,
        x: FieldElem,
        z: FieldElem,
    ) -> FieldElem {
        let t1t2 = ctx.mul(t1, t2);
        let lin1 = ctx.add(ctx.mul(self.b1, x), ctx.mul(self.d1, z));
        let lin2 = ctx.add(ctx.mul(self.b2, x), ctx.mul(self.d2, z));
        let quad = ctx.add(ctx.mul(t1, t1), ctx.mul(self.omega, ctx.mul(t2, t2)));
        let mut acc = ctx.mul(ctx.double(t1t2), lin1);
        acc = ctx.sub(acc, ctx.mul(quad, lin2));
        ctx.add(acc, self.cubic_at(ctx, x, z))
    }

    /// Exhaustive point count over PG(3,q).
    pub fn count_points(&self, ctx: &FieldCtx) -> SurfaceCounts {
        let q = ctx.q();
        let zero = ctx.zero();
        let one = ctx.one();
        let mut counts = SurfaceCounts { s_q: 0, n0: 0, n_inf: 0 };
        let mut tally = |ctx: &FieldCtx, t1, t2, x, z| {
            if self.eval(ctx, t1, t2, x, z) == zero {
                counts.s_q += 1;
                if t1 == zero && t2 == zero {
                    counts.n0 += 1;
                }
                if x == zero && z == zero {
                    counts.n_inf += 1;
                }
            }
        };
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    tally(ctx, one, ctx.elem(a), ctx.elem(b), ctx.elem(c));
                }
            }
        }
        for b in 0..q {
            for c in 0..q {
                tally(ctx, zero, one, ctx.elem(b), ctx.elem(c));
            }
        }
        for c in 0..q {
            tally(ctx, zero, zero, one, ctx.elem(c));
        }
        tally(ctx, zero, zero, zero, one);
        assert_eq!(counts.n_inf, q as u64 + 1, "the X = Z = 0 line lies on the surface");
        counts
    }

    /// Rational singular points can only sit on the t₁ = t₂ = 0 line (the
    /// t-gradient forces t₁² = ωt₂² or X = Z = 0, and ω is a non-square, and
    /// X = Z = 0 leads back to t₁ = t₂ = 0). A point there is singular when
    /// the binary cubic and both its partials vanish; the coefficients 3·c₃₀
    /// etc. are reduced in the field, which handles characteristic 3 as
    /// written.
    pub fn find_singularity(&self, ctx: &FieldCtx) -> Singularity {
        let q = ctx.q();
        let zero = ctx.zero();
        let one = ctx.one();
        let three = ctx.add(one, ctx.double(one));
        let mut found: Option<(FieldElem, FieldElem)> = None;

        let mut check = |x: FieldElem, z: FieldElem| {
            let g = self.cubic_at(ctx, x, z);
            // g_X = 3c₃₀X² + 2c₂₁XZ + c₁₂Z²
            let gx = ctx.add(
                ctx.add(
                    ctx.mul(ctx.mul(three, self.c30), ctx.mul(x, x)),
                    ctx.mul(ctx.double(self.c21), ctx.mul(x, z)),
                ),
                ctx.mul(self.c12, ctx.mul(z, z)),
            );
            // g_Z = c₂₁X² + 2c₁₂XZ + 3c₀₃Z²
            let gz = ctx.add(
                ctx.add(
                    ctx.mul(self.c21, ctx.mul(x, x)),
                    ctx.mul(ctx.double(self.c12), ctx.mul(x, z)),
                ),
                ctx.mul(ctx.mul(three, self.c03), ctx.mul(z, z)),
            );
            if g == zero && gx == zero && gz == zero {
                if let Some(prev) = found {
                    panic!(
                        "two singular points found at ({:?}:{:?}) and ({:?}:{:?}); contradicts uniqueness",
                        prev.0, prev.1, x, z
                    );
                }
                found = Some((x, z));
            }
        };
        for t in 0..q {
            check(one, ctx.elem(t));
        }
        check(zero, one);

        let (x0, z0) = match found {
            None => return Singularity::Smooth,
            Some(p) => p,
        };

        let (shift, beta) = self.shift_to_origin(ctx, x0, z0);
        let beta1 = ctx.sub(
            ctx.square(shift.v),
            ctx.mul(ctx.omega(), ctx.square(shift.u)),
        );
        assert_ne!(beta1, zero, "t-part of the tangent cone is nondegenerate");
        let cone = if shift.c22 != zero {
            ConeKind::QuadricCone
        } else if ctx.chi(beta1) == crate::gf::QuadClass::Square {
            ConeKind::PlanePairRational
        } else {
            ConeKind::PlanePairConjugate
        };
        let alpha_lines = shift.count_surface_lines(ctx);
        assert!(
            alpha_lines == 0 || alpha_lines == 2 || alpha_lines == 4,
            "lines through the double point must number 0, 2 or 4, got {alpha_lines}"
        );

        Singularity::Double {
            point: [zero, zero, x0, z0],
            beta,
            beta1,
            cone,
            alpha_lines,
        }
    }

    /// Moves the singular point to (0:0:0:1). After the move the form reads
    /// Z·φ₂(t₁,t₂,X) + φ₃(t₁,t₂,X); φ₂ is the tangent cone and the common
    /// zeros of φ₂, φ₃ in PG(2,q) are exactly the lines through the double
    /// point contained in the surface.
    fn shift_to_origin(
        &self,
        ctx: &FieldCtx,
        x0: FieldElem,
        z0: FieldElem,
    ) -> (ShiftedSurface, Option<FieldElem>) {
        if z0 != ctx.zero() {
            let beta = ctx.div(x0, z0);
            // X ↦ X + βZ: the linear part becomes b·X + (bβ + d)·Z and the
            // cubic picks up the shifted coefficients; after centering, the
            // Z³ and XZ²-equivalent coefficients vanish by singularity.
            let v = ctx.add(ctx.mul(self.b1, beta), self.d1);
            let u = ctx.add(ctx.mul(self.b2, beta), self.d2);
            let three = ctx.add(ctx.one(), ctx.double(ctx.one()));
            let c22 = ctx.add(ctx.mul(ctx.mul(three, self.c30), beta), self.c21);
            (
                ShiftedSurface {
                    u,
                    v,
                    c22,
                    r1: self.b1,
                    r2: self.b2,
                    cubic_top: self.c30,
                    omega: self.omega,
                },
                Some(beta),
            )
        } else {
            // Singular point at (0:0:1:0): swap X and Z.
            (
                ShiftedSurface {
                    u: self.b2,
                    v: self.b1,
                    c22: self.c12,
                    r1: self.d1,
                    r2: self.d2,
                    cubic_top: self.c03,
                    omega: self.omega,
                },
                None,
            )
        }
    }

    /// Full-gradient scan over PG(3,q): the independent route used by tests
    /// to confirm `find_singularity`. Returns every rational point where F
    /// and all four partials vanish.
    pub fn gradient_scan_singular_points(&self, ctx: &FieldCtx) -> Vec<[FieldElem; 4]> {
        let zero = ctx.zero();
        let mut out = Vec::new();
        for p in crate::proj::pg3_points(ctx) {
            let [t1, t2, x, z] = p;
            if self.eval(ctx, t1, t2, x, z) != zero {
                continue;
            }
            let lin1 = ctx.add(ctx.mul(self.b1, x), ctx.mul(self.d1, z));
            let lin2 = ctx.add(ctx.mul(self.b2, x), ctx.mul(self.d2, z));
            // ∂F/∂t₁ = 2t₂·lin1 − 2t₁·lin2, ∂F/∂t₂ = 2t₁·lin1 − 2ωt₂·lin2
            let ft1 = ctx.sub(
                ctx.mul(ctx.double(t2), lin1),
                ctx.mul(ctx.double(t1), lin2),
            );
            let ft2 = ctx.sub(
                ctx.mul(ctx.double(t1), lin1),
                ctx.mul(ctx.double(ctx.mul(self.omega, t2)), lin2),
            );
            let quad = ctx.add(ctx.mul(t1, t1), ctx.mul(self.omega, ctx.mul(t2, t2)));
            let t1t2 = ctx.mul(t1, t2);
            let three = ctx.add(ctx.one(), ctx.double(ctx.one()));
            // ∂F/∂X = 2t₁t₂b₁ − quad·b₂ + g_X, ∂F/∂Z likewise with d and g_Z.
            let gx = ctx.add(
                ctx.add(
                    ctx.mul(ctx.mul(three, self.c30), ctx.mul(x, x)),
                    ctx.mul(ctx.double(self.c21), ctx.mul(x, z)),
                ),
                ctx.mul(self.c12, ctx.mul(z, z)),
            );
            let gz = ctx.add(
                ctx.add(
                    ctx.mul(self.c21, ctx.mul(x, x)),
                    ctx.mul(ctx.double(self.c12), ctx.mul(x, z)),
                ),
                ctx.mul(ctx.mul(three, self.c03), ctx.mul(z, z)),
            );
            let fx = ctx.add(
                ctx.sub(ctx.mul(ctx.double(t1t2), self.b1), ctx.mul(quad, self.b2)),
                gx,
            );
            let fz = ctx.add(
                ctx.sub(ctx.mul(ctx.double(t1t2), self.d1), ctx.mul(quad, self.d2)),
                gz,
            );
            if ft1 == zero && ft2 == zero && fx == zero && fz == zero {
                out.push(p);
            }
        }
        out
    }
}

/// Surface after moving the double point to (0:0:0:1):
/// Z·φ₂ + φ₃ with φ₂ = −u·t₁² + 2v·t₁t₂ − uω·t₂² + c22·X² and
/// φ₃ = X·(−r₂·t₁² + 2r₁·t₁t₂ − r₂ω·t₂² + cubic_top·X²).
pub(crate) struct ShiftedSurface {
    u: FieldElem,
    v: FieldElem,
    c22: FieldElem,
    r1: FieldElem,
    r2: FieldElem,
    cubic_top: FieldElem,
    omega: FieldElem,
}

impl ShiftedSurface {
    fn phi2(&self, ctx: &FieldCtx, t1: FieldElem, t2: FieldElem, x: FieldElem) -> FieldElem {
        let mut acc = ctx.neg(ctx.mul(self.u, ctx.mul(t1, t1)));
        acc = ctx.add(acc, ctx.mul(ctx.double(self.v), ctx.mul(t1, t2)));
        acc = ctx.sub(acc, ctx.mul(ctx.mul(self.u, self.omega), ctx.mul(t2, t2)));
        ctx.add(acc, ctx.mul(self.c22, ctx.mul(x, x)))
    }

    fn phi3(&self, ctx: &FieldCtx, t1: FieldElem, t2: FieldElem, x: FieldElem) -> FieldElem {
        let mut acc = ctx.neg(ctx.mul(self.r2, ctx.mul(t1, t1)));
        acc = ctx.add(acc, ctx.mul(ctx.double(self.r1), ctx.mul(t1, t2)));
        acc = ctx.sub(acc, ctx.mul(ctx.mul(self.r2, self.omega), ctx.mul(t2, t2)));
        acc = ctx.add(acc, ctx.mul(self.cubic_top, ctx.mul(x, x)));
        ctx.mul(x, acc)
    }

    /// Brute force over the q²+q+1 direction points.
    fn count_surface_lines(&self, ctx: &FieldCtx) -> u64 {
        let q = ctx.q();
        let zero = ctx.zero();
        let one = ctx.one();
        let mut n = 0;
        let mut check = |t1, t2, x| {
            if self.phi2(ctx, t1, t2, x) == zero && self.phi3(ctx, t1, t2, x) == zero {
                n += 1;
            }
        };
        for a in 0..q {
            for b in 0..q {
                check(one, ctx.elem(a), ctx.elem(b));
            }
        }
        for b in 0..q {
            check(zero, one, ctx.elem(b));
        }
        check(zero, zero, one);
        n
    }

    /// Points of the tangent cone among the direction points; used by tests
    /// to confirm the rational line count through the double point.
    #[cfg(test)]
    pub(crate) fn cone_directions(&self, ctx: &FieldCtx) -> u64 {
        let q = ctx.q();
        let zero = ctx.zero();
        let one = ctx.one();
        let mut n = 0;
        let mut check = |t1, t2, x| {
            if self.phi2(ctx, t1, t2, x) == zero {
                n += 1;
            }
        };
        for a in 0..q {
            for b in 0..q {
                check(one, ctx.elem(a), ctx.elem(b));
            }
        }
        for b in 0..q {
            check(zero, one, ctx.elem(b));
        }
        check(zero, zero, one);
        n
    }
}

#[cfg(test)]
pub(crate) fn shifted_for_tests(
    ctx: &FieldCtx,
    s: &CubicSurface,
    x0: FieldElem,
    z0: FieldElem,
) -> ShiftedSurface {
    s.shift_to_origin(ctx, x0, z0).0
}
