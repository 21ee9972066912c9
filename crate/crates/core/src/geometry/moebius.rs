use num_complex::Complex64;

use super::point::{dot, norm, scale, sub, BoundaryPoint, InteriorPoint, ModelDim, Vec3};
use crate::error::{Error, Result};
use crate::policy::POLICY;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Entries below this modulus count as zero when picking the sign representative.
const SIGN_EPS: f64 = 1e-12;

/// Pole of the ball/half-space Cayley map: the image of infinity on the sphere.
const SOUTH_POLE: Vec3 = [0.0, 0.0, -1.0];

/// Ball <-> upper half-space, inversion in the sphere of radius `sqrt 2` about
/// the south pole. It is an involution, sends `0` to `j = (0, 0, 1)` and the
/// unit sphere to the plane `x_3 = 0`.
pub(crate) fn cayley(x: &Vec3) -> Vec3 {
    let v = sub(x, &SOUTH_POLE);
    let s = 2.0 / dot(&v, &v);
    [v[0] * s, v[1] * s, v[2] * s - 1.0]
}

/// A point of the Riemann sphere `C u {oo}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Extended {
    Finite(Complex64),
    Infinity,
}

/// Classification of a non-trivial isometry by the square of its trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum MapClass {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// An orientation preserving isometry of the disc or ball, stored as a
/// unit-determinant complex 2x2 matrix.
///
/// For the disc the matrix acts on the disc directly and has the form
/// `[[a, b], [conj b, conj a]]`. For the ball it acts on the upper half-space
/// with the quaternion formula and is transported by [`cayley`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    model: ModelDim,
}

impl MoebiusMap {
    /// Builds a map from row-major entries in the model's native chart (disc for
    /// `n = 2`, upper half-space for `n = 3`), renormalizing to determinant one.
    pub fn new(model: ModelDim, entries: [Complex64; 4]) -> Result<Self> {
        let [a, b, c, d] = entries;
        if entries.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::usage("non-finite matrix entry"));
        }
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::usage("singular matrix"));
        }
        let s = det.sqrt();
        let (a, b, c, d) = (a / s, b / s, c / s, d / s);
        if model == ModelDim::Two {
            let size = a.norm().max(b.norm()).max(1.0);
            let off = (c - b.conj()).norm().max((d - a.conj()).norm());
            if off > POLICY.construction * size {
                return Err(Error::usage("matrix does not preserve the unit disc"));
            }
            return Ok(Self::disc_unchecked(a, b));
        }
        Ok(MoebiusMap { a, b, c, d, model }.canonical())
    }

    /// Disc map `z -> (a z + b) / (conj(b) z + conj(a))`.
    pub fn disc(a: Complex64, b: Complex64) -> Result<Self> {
        if a.norm_sqr() - b.norm_sqr() <= 0.0 {
            return Err(Error::usage("disc map requires |a| > |b|"));
        }
        Ok(Self::disc_unchecked(a, b))
    }

    fn disc_unchecked(a: Complex64, b: Complex64) -> Self {
        let s = (a.norm_sqr() - b.norm_sqr()).sqrt();
        let (a, b) = (a / s, b / s);
        MoebiusMap {
            a,
            b,
            c: b.conj(),
            d: a.conj(),
            model: ModelDim::Two,
        }
        .canonical()
    }

    /// Builds a map from a matrix acting on the upper half-plane (`n = 2`, real
    /// entries) or upper half-space (`n = 3`).
    pub fn from_halfspace(model: ModelDim, entries: [Complex64; 4]) -> Result<Self> {
        match model {
            ModelDim::Three => Self::new(model, entries),
            ModelDim::Two => {
                let [a, b, c, d] = entries;
                // K = [[1, -i], [1, i]] sends the half-plane to the disc; conjugate by it.
                let k = [ONE, -I, ONE, I];
                let k_inv = [I, I, -ONE, ONE];
                let m = mul(&mul(&k, &[a, b, c, d]), &k_inv);
                Self::new(model, m)
            }
        }
    }

    pub fn identity(model: ModelDim) -> Self {
        MoebiusMap {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
            model,
        }
    }

    /// Hyperbolic translation of length `length` along the diameter through the
    /// boundary point at angle `angle` (disc) or along the vertical axis of the
    /// half-space chart (ball, `angle` ignored). The origin lies on the axis.
    pub fn axial_translation(model: ModelDim, length: f64, angle: f64) -> Self {
        let (ch, sh) = ((length / 2.0).cosh(), (length / 2.0).sinh());
        match model {
            ModelDim::Two => Self::disc_unchecked(ONE * ch, Complex64::from_polar(sh, angle)),
            ModelDim::Three => {
                let e = (length / 2.0).exp();
                MoebiusMap {
                    a: ONE * e,
                    b: ZERO,
                    c: ZERO,
                    d: ONE / e,
                    model,
                }
            }
        }
    }

    /// The isometry sending the origin to `w`, with derivative at the origin a
    /// positive multiple of the identity (disc) or of a fixed linear map (ball).
    pub fn origin_to(w: &InteriorPoint) -> Self {
        let v = w.vec();
        match w.dim() {
            ModelDim::Two => {
                let z = Complex64::new(v[0], v[1]);
                Self::disc_unchecked(ONE, z)
            }
            ModelDim::Three => {
                let q = cayley(v);
                let st = q[2].sqrt();
                let z = Complex64::new(q[0], q[1]);
                MoebiusMap {
                    a: ONE * st,
                    b: z / st,
                    c: ZERO,
                    d: ONE / st,
                    model: ModelDim::Three,
                }
                .canonical()
            }
        }
    }

    /// Elliptic rotation by `angle` about an interior point of the disc.
    pub fn disc_rotation(center: &InteriorPoint, angle: f64) -> Result<Self> {
        if center.dim() != ModelDim::Two {
            return Err(Error::usage("disc_rotation requires the disc model"));
        }
        let t = Self::origin_to(center);
        let r = Self::disc_unchecked(Complex64::from_polar(1.0, angle / 2.0), ZERO);
        t.compose(&r)?.compose(&t.inverse())
    }

    pub fn model(&self) -> ModelDim {
        self.model
    }

    /// Row-major entries `[a, b, c, d]`.
    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    fn canonical(self) -> Self {
        for e in [self.a, self.b, self.c, self.d] {
            if e.norm() <= SIGN_EPS {
                continue;
            }
            let flip = if e.re.abs() > SIGN_EPS { e.re < 0.0 } else { e.im < 0.0 };
            return if flip { self.negated() } else { self };
        }
        self
    }

    fn negated(self) -> Self {
        MoebiusMap {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            model: self.model,
        }
    }

    /// Restores disc form for `n = 2` and the sign convention. No rescaling:
    /// the determinant of a long product is 1 to rounding, while recomputing it
    /// loses all precision.
    fn renormalized(self) -> Self {
        match self.model {
            ModelDim::Two => {
                let a = (self.a + self.d.conj()) * 0.5;
                let b = (self.b + self.c.conj()) * 0.5;
                MoebiusMap {
                    a,
                    b,
                    c: b.conj(),
                    d: a.conj(),
                    model: ModelDim::Two,
                }
                .canonical()
            }
            ModelDim::Three => self.canonical(),
        }
    }

    /// `self o other`: first `other`, then `self`.
    pub fn compose(&self, other: &MoebiusMap) -> Result<MoebiusMap> {
        if self.model != other.model {
            return Err(Error::usage(format!(
                "cannot compose maps of dimension {} and {}",
                self.model, other.model
            )));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &MoebiusMap) -> MoebiusMap {
        let m = mul(&self.entries(), &other.entries());
        MoebiusMap {
            a: m[0],
            b: m[1],
            c: m[2],
            d: m[3],
            model: self.model,
        }
        .renormalized()
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
            model: self.model,
        }
        .canonical()
    }

    /// Largest entrywise difference, minimized over the sign ambiguity `M ~ -M`.
    pub fn matrix_distance(&self, other: &MoebiusMap) -> f64 {
        let (p, q) = (self.entries(), other.entries());
        let mut plus = 0.0f64;
        let mut minus = 0.0f64;
        for i in 0..4 {
            plus = plus.max((p[i] - q[i]).norm());
            minus = minus.max((p[i] + q[i]).norm());
        }
        plus.min(minus)
    }

    /// Hyperbolic distance from the origin to its image, from the matrix alone:
    /// `sinh^2(d/2) = (|a - conj d|^2 + |b + conj c|^2) / 4` in the native chart.
    pub fn origin_displacement(&self) -> f64 {
        let u = (self.a - self.d.conj()).norm_sqr() + (self.b + self.c.conj()).norm_sqr();
        2.0 * (u.sqrt() / 2.0).asinh()
    }

    pub fn classify(&self) -> MapClass {
        let tol = POLICY.construction;
        if self.matrix_distance(&MoebiusMap::identity(self.model)) < tol {
            return MapClass::Identity;
        }
        let tau = self.trace() * self.trace();
        if (tau - 4.0).norm() < tol {
            MapClass::Parabolic
        } else if tau.im.abs() < tol && tau.re >= -tol && tau.re < 4.0 {
            MapClass::Elliptic
        } else {
            MapClass::Loxodromic
        }
    }

    /// Raw chart evaluation of an interior point; no boundary check.
    pub(crate) fn eval_interior(&self, x: &Vec3) -> Vec3 {
        match self.model {
            ModelDim::Two => {
                let z = Complex64::new(x[0], x[1]);
                let w = (self.a * z + self.b) / (self.c * z + self.d);
                [w.re, w.im, 0.0]
            }
            ModelDim::Three => {
                let q = cayley(x);
                let z = Complex64::new(q[0], q[1]);
                let t = q[2];
                let den = self.c * z + self.d;
                let n = den.norm_sqr() + self.c.norm_sqr() * t * t;
                let w = ((self.a * z + self.b) * den.conj() + self.a * self.c.conj() * t * t) / n;
                cayley(&[w.re, w.im, t / n])
            }
        }
    }

    pub fn apply_interior(&self, z: &InteriorPoint) -> Result<InteriorPoint> {
        if z.dim() != self.model {
            return Err(Error::usage("point and map have different dimensions"));
        }
        InteriorPoint::from_vec(self.model, self.eval_interior(z.vec()))
    }

    fn eval_extended(&self, z: Extended) -> Extended {
        match z {
            Extended::Infinity => {
                if self.c.norm() < POLICY.pole {
                    Extended::Infinity
                } else {
                    Extended::Finite(self.a / self.c)
                }
            }
            Extended::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() < POLICY.pole {
                    Extended::Infinity
                } else {
                    Extended::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Boundary image before the final projection back onto the sphere.
    pub(crate) fn boundary_image_raw(&self, x: &Vec3) -> Vec3 {
        to_sphere(self.model, self.eval_extended(chart_coordinate(self.model, x)))
    }

    pub fn apply_boundary(&self, x: &BoundaryPoint) -> Result<BoundaryPoint> {
        if x.dim() != self.model {
            return Err(Error::usage("point and map have different dimensions"));
        }
        Ok(BoundaryPoint::normalized(self.model, self.boundary_image_raw(x.vec())))
    }

    /// Boundary fixed points, attracting first for loxodromic maps.
    pub fn fixed_points(&self) -> Result<Vec<BoundaryPoint>> {
        let class = self.classify();
        if !matches!(class, MapClass::Parabolic | MapClass::Loxodromic) {
            return Err(Error::usage(format!(
                "fixed_points needs a parabolic or loxodromic map, got {class:?}"
            )));
        }
        // Roots of c z^2 + (d - a) z - b = 0.
        let bq = self.d - self.a;
        let roots: Vec<Extended> = if self.c.norm() < POLICY.construction {
            if class == MapClass::Parabolic || bq.norm() < POLICY.construction {
                vec![Extended::Infinity]
            } else {
                vec![Extended::Infinity, Extended::Finite(self.b / bq)]
            }
        } else if class == MapClass::Parabolic {
            vec![Extended::Finite((self.a - self.d) / (self.c * 2.0))]
        } else {
            let disc = (bq * bq + self.b * self.c * 4.0).sqrt();
            let q = if (bq + disc).norm() >= (bq - disc).norm() {
                -(bq + disc) * 0.5
            } else {
                -(bq - disc) * 0.5
            };
            vec![Extended::Finite(q / self.c), Extended::Finite(-self.b / q)]
        };
        let mut roots = roots;
        if roots.len() == 2 && !self.is_attracting(roots[0]) {
            roots.swap(0, 1);
        }
        Ok(roots
            .into_iter()
            .map(|r| BoundaryPoint::normalized(self.model, to_sphere(self.model, r)))
            .collect())
    }

    fn is_attracting(&self, p: Extended) -> bool {
        match p {
            // Near a fixed infinity the map is z -> (a/d) z + ...
            Extended::Infinity => self.a.norm() > self.d.norm(),
            Extended::Finite(z) => (self.c * z + self.d).norm() > 1.0,
        }
    }
}

pub(crate) fn mul(p: &[Complex64; 4], q: &[Complex64; 4]) -> [Complex64; 4] {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}

fn chart_coordinate(model: ModelDim, x: &Vec3) -> Extended {
    match model {
        ModelDim::Two => Extended::Finite(Complex64::new(x[0], x[1])),
        ModelDim::Three => {
            if norm(&sub(x, &SOUTH_POLE)) < 1e-12 {
                Extended::Infinity
            } else {
                let p = cayley(x);
                Extended::Finite(Complex64::new(p[0], p[1]))
            }
        }
    }
}

fn to_sphere(model: ModelDim, z: Extended) -> Vec3 {
    match (model, z) {
        (ModelDim::Two, Extended::Finite(w)) => [w.re, w.im, 0.0],
        // Disc maps never send a circle point to infinity; keep a finite fallback.
        (ModelDim::Two, Extended::Infinity) => scale(&[1.0, 0.0, 0.0], 1.0),
        (ModelDim::Three, Extended::Finite(w)) => cayley(&[w.re, w.im, 0.0]),
        (ModelDim::Three, Extended::Infinity) => SOUTH_POLE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(p: &MoebiusMap, q: &MoebiusMap, tol: f64) -> bool {
        p.matrix_distance(q) < tol
    }

    fn shift() -> MoebiusMap {
        MoebiusMap::new(ModelDim::Three, [ONE, ONE, ZERO, ONE]).unwrap()
    }

    #[test]
    fn cayley_is_an_involution_fixing_the_sphere_setwise() {
        let x = [0.3, -0.1, 0.4];
        let back = cayley(&cayley(&x));
        for i in 0..3 {
            assert_abs_diff_eq!(back[i], x[i], epsilon = 1e-14);
        }
        assert_eq!(cayley(&[0.0; 3]), [0.0, 0.0, 1.0]);
        let s = cayley(&[0.6, 0.0, 0.8]);
        assert_abs_diff_eq!(s[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_product() {
        let (t, s) = (0.4, 1.1);
        let m = |x: f64| MoebiusMap::new(ModelDim::Three, [ONE * x.exp(), ZERO, ZERO, ONE * (-x).exp()]).unwrap();
        let p = m(t).compose(&m(s)).unwrap();
        assert!(close(&p, &m(t + s), 1e-12));
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let g = MoebiusMap::disc(c(1.3, 0.2), c(0.5, -0.7)).unwrap();
        let id = MoebiusMap::identity(ModelDim::Two);
        assert!(close(&g.compose(&id).unwrap(), &g, 1e-12));
        assert_eq!(g.compose(&g.inverse()).unwrap().classify(), MapClass::Identity);
    }

    #[test]
    fn compose_rejects_model_mismatch() {
        let g = MoebiusMap::identity(ModelDim::Two);
        let h = MoebiusMap::identity(ModelDim::Three);
        assert!(matches!(g.compose(&h), Err(Error::Usage(_))));
    }

    #[test]
    fn inverse_examples() {
        let id = MoebiusMap::identity(ModelDim::Three);
        assert_eq!(id.inverse(), id);
        let inv = shift().inverse();
        let expected = MoebiusMap::new(ModelDim::Three, [ONE, -ONE, ZERO, ONE]).unwrap();
        assert!(close(&inv, &expected, 1e-15));
    }

    #[test]
    fn disc_translation_sends_origin_to_tanh() {
        let t = 3f64.ln();
        let g = MoebiusMap::disc(c(t.cosh(), 0.0), c(t.sinh(), 0.0)).unwrap();
        let w = g.apply_interior(&InteriorPoint::origin(ModelDim::Two)).unwrap();
        assert_abs_diff_eq!(w.coords()[0], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(w.coords()[1], 0.0, epsilon = 1e-15);
        let o = InteriorPoint::origin(ModelDim::Two);
        assert_abs_diff_eq!(super::super::hyperbolic_distance(&o, &w), 2.0 * t, epsilon = 1e-12);
        assert_abs_diff_eq!(g.origin_displacement(), 2.0 * t, epsilon = 1e-12);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(shift().classify(), MapClass::Parabolic);
        let lox = MoebiusMap::new(ModelDim::Three, [ONE * 3.0, ZERO, ZERO, ONE / 3.0]).unwrap();
        assert_eq!(lox.classify(), MapClass::Loxodromic);
        let q = std::f64::consts::FRAC_PI_4;
        let rot = MoebiusMap::disc(Complex64::from_polar(1.0, q), ZERO).unwrap();
        assert_eq!(rot.classify(), MapClass::Elliptic);
        assert_eq!(MoebiusMap::identity(ModelDim::Two).classify(), MapClass::Identity);
        // Half turn: trace 0.
        let half = MoebiusMap::disc(I, ZERO).unwrap();
        assert_eq!(half.classify(), MapClass::Elliptic);
    }

    #[test]
    fn fixed_points_of_real_disc_translation() {
        let t: f64 = 0.8;
        let g = MoebiusMap::disc(c(t.cosh(), 0.0), c(t.sinh(), 0.0)).unwrap();
        let fp = g.fixed_points().unwrap();
        assert_eq!(fp.len(), 2);
        // z -> (cosh z + sinh) / (sinh z + cosh) pushes towards +1.
        assert_abs_diff_eq!(fp[0].coords()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fp[1].coords()[0], -1.0, epsilon = 1e-12);
        let img = g.apply_boundary(&fp[0]).unwrap();
        assert_abs_diff_eq!(img.distance(&fp[0]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn parabolic_shift_fixes_infinity() {
        let fp = shift().fixed_points().unwrap();
        assert_eq!(fp.len(), 1);
        assert_eq!(fp[0].coords(), &SOUTH_POLE[..]);
    }

    #[test]
    fn fixed_points_reject_elliptic() {
        let rot = MoebiusMap::disc(Complex64::from_polar(1.0, 0.3), ZERO).unwrap();
        assert!(rot.fixed_points().is_err());
        assert!(MoebiusMap::identity(ModelDim::Two).fixed_points().is_err());
    }

    #[test]
    fn disc_check_rejects_non_disc_matrices() {
        assert!(MoebiusMap::new(ModelDim::Two, [ONE, ONE, ZERO, ONE]).is_err());
        assert!(MoebiusMap::new(ModelDim::Two, [ONE * 2.0, ZERO, ZERO, ONE * 0.5]).is_err());
    }

    #[test]
    fn halfplane_chart_conversion() {
        // z -> 2z on the half-plane fixes 0 and oo, which land on -1 and +1.
        let g = MoebiusMap::from_halfspace(
            ModelDim::Two,
            [ONE * 2f64.sqrt(), ZERO, ZERO, ONE / 2f64.sqrt()],
        )
        .unwrap();
        assert_eq!(g.classify(), MapClass::Loxodromic);
        let fp = g.fixed_points().unwrap();
        assert_abs_diff_eq!(fp[0].coords()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fp[1].coords()[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.origin_displacement(), 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn sign_canonicalization() {
        let g = MoebiusMap::new(ModelDim::Three, [-ONE, -ONE, ZERO, -ONE]).unwrap();
        assert!(g.entries()[0].re > 0.0);
        let h = MoebiusMap::new(ModelDim::Three, [ZERO, c(0.0, -1.0), c(0.0, -1.0), ZERO]).unwrap();
        assert!(h.entries()[1].im > 0.0);
    }

    #[test]
    fn boundary_injectivity_spot_check() {
        let g = MoebiusMap::disc(c(1.2, 0.3), c(0.4, 0.6)).unwrap();
        let pts: Vec<_> = [0.1, 2.0, 4.0]
            .iter()
            .map(|&t: &f64| BoundaryPoint::new(ModelDim::Two, &[t.cos(), t.sin()]).unwrap())
            .map(|p| g.apply_boundary(&p).unwrap())
            .collect();
        assert!(pts[0].distance(&pts[1]) > 1e-3);
        assert!(pts[1].distance(&pts[2]) > 1e-3);
        assert!(pts[0].distance(&pts[2]) > 1e-3);
    }

    #[test]
    fn ball_origin_to_hits_target() {
        let w = InteriorPoint::new(ModelDim::Three, &[0.2, -0.5, 0.3]).unwrap();
        let t = MoebiusMap::origin_to(&w);
        let img = t.apply_interior(&InteriorPoint::origin(ModelDim::Three)).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(img.coords()[i], w.coords()[i], epsilon = 1e-14);
        }
        assert_abs_diff_eq!(
            t.origin_displacement(),
            super::super::distance_from_origin(&w),
            epsilon = 1e-12
        );
    }

    #[test]
    fn boundary_pole_goes_to_infinity() {
        // z -> -1/z on the half-space sends 0 (the north pole) to oo (the south pole).
        let g = MoebiusMap::new(ModelDim::Three, [ZERO, -ONE, ONE, ZERO]).unwrap();
        let north = BoundaryPoint::new(ModelDim::Three, &[0.0, 0.0, 1.0]).unwrap();
        let img = g.apply_boundary(&north).unwrap();
        assert_eq!(img.coords(), &SOUTH_POLE[..]);
        let back = g.apply_boundary(&img).unwrap();
        assert_abs_diff_eq!(back.distance(&north), 0.0, epsilon = 1e-12);
    }
}
