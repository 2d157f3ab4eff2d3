use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;
use crate::scalar::{c, Real};

/// Declarative nonlinearity weight `f(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    /// `f(u) = c`.
    Const { c: f64 },
    /// `f(u) = k u`.
    Linear { k: f64 },
    /// `f(u) = sin u`.
    Sin,
    /// `f(u) = -arctan u`.
    NegArctan,
    /// Piecewise linear through `(u, f)` pairs, constant beyond the ends.
    Tabulated { u: Vec<f64>, f: Vec<f64> },
}

impl ProfileSpec {
    pub fn name(&self) -> String {
        match self {
            ProfileSpec::Const { c } => format!("const({c})"),
            ProfileSpec::Linear { k } => format!("linear({k})"),
            ProfileSpec::Sin => "sin".into(),
            ProfileSpec::NegArctan => "neg_arctan".into(),
            ProfileSpec::Tabulated { u, .. } => format!("tabulated({} points)", u.len()),
        }
    }

    /// The weight `f` as a plain function.
    pub fn weight<T: Real>(&self) -> Result<ScalarFn<T>> {
        Ok(match self {
            ProfileSpec::Const { c: k } => {
                let k = T::lit(*k);
                Arc::new(move |_| k)
            }
            ProfileSpec::Linear { k } => {
                let k = T::lit(*k);
                Arc::new(move |u| k * u)
            }
            ProfileSpec::Sin => Arc::new(|u: T| u.sin()),
            ProfileSpec::NegArctan => Arc::new(|u: T| -u.atan()),
            ProfileSpec::Tabulated { u, f } => {
                if u.len() != f.len() || u.len() < 2 {
                    return Err(Error::Profile("tabulated f needs matching u/f of length >= 2".into()));
                }
                if u.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Profile("tabulated u must increase strictly".into()));
                }
                let us: Vec<T> = u.iter().map(|&x| T::lit(x)).collect();
                let fs: Vec<T> = f.iter().map(|&x| T::lit(x)).collect();
                Arc::new(move |x| piecewise_linear(&us, &fs, x))
            }
        })
    }

    /// Analytic finiteness of the endpoints, known for the builtins.
    fn tail_hint(&self) -> Option<TailHint> {
        let hint = |m: bool, p: bool| TailHint {
            minus_finite: Some(m),
            plus_finite: Some(p),
        };
        match self {
            ProfileSpec::Const { c: k } => Some(hint(*k < 0.0, *k > 0.0)),
            ProfileSpec::Linear { k } => Some(hint(*k > 0.0, *k > 0.0)),
            ProfileSpec::Sin | ProfileSpec::NegArctan => Some(hint(false, false)),
            ProfileSpec::Tabulated { .. } => None,
        }
    }
}

/// Limit of `F` at one end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Endpoint<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Endpoint<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Endpoint::Finite(v) => Some(v),
            Endpoint::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Endpoint::Finite(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    /// Finiteness known analytically (builtin or user-supplied tail).
    Resolved,
    /// Inferred from a tail fit at the cutoff.
    Heuristic,
}

/// One of the four possible endpoint cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointCase {
    /// `F(-∞) = -∞`, `F(+∞) = +∞`.
    BothInfinite,
    /// `F(-∞) = a` finite, `F(+∞) = +∞`.
    FiniteBelow,
    /// `F(-∞) = -∞`, `F(+∞) = b` finite.
    FiniteAbove,
    BothFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct EndpointClassification<T> {
    /// `a = F(-∞)`.
    pub minus_infinity: Endpoint<T>,
    /// `b = F(+∞)`.
    pub plus_infinity: Endpoint<T>,
    pub confidence: Confidence,
}

impl<T: Real> EndpointClassification<T> {
    pub fn case(&self) -> EndpointCase {
        match (self.minus_infinity.is_finite(), self.plus_infinity.is_finite()) {
            (false, false) => EndpointCase::BothInfinite,
            (true, false) => EndpointCase::FiniteBelow,
            (false, true) => EndpointCase::FiniteAbove,
            (true, true) => EndpointCase::BothFinite,
        }
    }
}

/// Analytic finiteness of the ends, overriding the tail fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailHint {
    pub minus_finite: Option<bool>,
    pub plus_finite: Option<bool>,
}

/// Affine map `v = offset + scale F(u)` between the canonical picture `F(u)`
/// and another normalization (e.g. `v = e^{-u} = 1 - F(u)` for `f ≡ 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orientation<T> {
    pub offset: T,
    pub scale: T,
}

impl<T: Real> Orientation<T> {
    pub fn canonical() -> Self {
        Self {
            offset: T::zero(),
            scale: T::one(),
        }
    }

    /// `v = 1 - F(u)`.
    pub fn nirenberg() -> Self {
        Self {
            offset: T::one(),
            scale: -T::one(),
        }
    }
}

impl<T: Real> Default for Orientation<T> {
    fn default() -> Self {
        Self::canonical()
    }
}

/// Build options for [`NonlinearityProfile`].
#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions<T> {
    /// Cache and classification cutoff `|u| <= cutoff`.
    pub cutoff: T,
    /// Cache spacing.
    pub step: T,
    pub tail_hint: TailHint,
}

impl<T: Real> Default for ProfileOptions<T> {
    fn default() -> Self {
        Self {
            cutoff: c(50.0),
            step: c(0.005),
            tail_hint: TailHint::default(),
        }
    }
}

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// `f`, `F(t) = ∫_0^t exp(-∫_0^s f) ds`, `F'`, `F''`, `F^{-1}` and the
/// endpoint classification.
///
/// `Φ(s) = ∫_0^s f` is tabulated on `[-cutoff, cutoff]` with cell-wise
/// Gauss–Legendre sums and interpolated by cubic Hermite with slope `f`; `F`
/// is tabulated the same way with slope `F' = e^{-Φ}`. Outside the table both
/// are integrated on demand from the nearest end.
#[derive(Clone)]
pub struct NonlinearityProfile<T> {
    name: String,
    f: ScalarFn<T>,
    lo: T,
    hi: T,
    trimmed: (bool, bool),
    step: T,
    phi: Vec<T>,
    fv: Vec<T>,
    big_f: Vec<T>,
    fprime: Vec<T>,
    classification: EndpointClassification<T>,
    orientation: Orientation<T>,
}

impl<T> fmt::Debug for NonlinearityProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearityProfile")
            .field("name", &self.name)
            .field("nodes", &self.phi.len())
            .finish_non_exhaustive()
    }
}

const GL_ORDER: usize = 8;

impl<T: Real> NonlinearityProfile<T> {
    /// Profile from a declarative spec; builtins carry analytic tail hints.
    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        Self::from_spec_with(spec, ProfileOptions::default())
    }

    pub fn from_spec_with(spec: &ProfileSpec, mut opts: ProfileOptions<T>) -> Result<Self> {
        let f = spec.weight::<T>()?;
        let analytic = spec.tail_hint();
        if let Some(h) = analytic {
            if opts.tail_hint == TailHint::default() {
                opts.tail_hint = h;
            }
        }
        Self::build(spec.name(), move |u| f(u), opts)
    }

    /// Profile for an arbitrary smooth `f`.
    pub fn build(
        name: impl Into<String>,
        f: impl Fn(T) -> T + Send + Sync + 'static,
        opts: ProfileOptions<T>,
    ) -> Result<Self> {
        let f: ScalarFn<T> = Arc::new(f);
        let name = name.into();
        let half = (opts.cutoff / opts.step).round().to_usize().unwrap_or(0).max(4);
        let n = 2 * half + 1;
        let step = opts.cutoff / T::of(half);
        let lo = -opts.cutoff;
        let gl = GaussLegendre::<T>::new(GL_ORDER);
        let node = |i: usize| lo + step * T::of(i);

        let mut fv = Vec::with_capacity(n);
        for i in 0..n {
            let v = f(node(i));
            if !v.is_finite() {
                return Err(Error::Profile(format!("f is not finite at u = {}", node(i))));
            }
            fv.push(v);
        }
        let mut phi = vec![T::zero(); n];
        for i in half + 1..n {
            phi[i] = phi[i - 1] + gl.integrate(node(i - 1), node(i), |s| f(s));
        }
        for i in (0..half).rev() {
            phi[i] = phi[i + 1] - gl.integrate(node(i), node(i + 1), |s| f(s));
        }
        if phi.iter().any(|p| !p.is_finite()) {
            return Err(Error::Profile("∫f is not finite on the cutoff range".into()));
        }
        let fprime: Vec<T> = phi.iter().map(|&p| (-p).exp()).collect();
        let mut big_f = vec![T::zero(); n];
        let phi_at = |x: T, i: usize| hermite(phi[i], phi[i + 1], fv[i], fv[i + 1], step, (x - node(i)) / step);
        for i in half + 1..n {
            big_f[i] = big_f[i - 1] + gl.integrate(node(i - 1), node(i), |s| (-phi_at(s, i - 1)).exp());
        }
        for i in (0..half).rev() {
            big_f[i] = big_f[i + 1] - gl.integrate(node(i), node(i + 1), |s| (-phi_at(s, i)).exp());
        }
        for i in 1..n {
            if big_f[i] < big_f[i - 1] {
                return Err(Error::Profile(format!(
                    "numerical F decreases near u = {}",
                    node(i)
                )));
            }
        }
        // keep the range where F and F' stay representable
        let big = T::max_value() * c(1e-12);
        let ok = |i: usize| big_f[i].abs() < big && fprime[i] < big;
        let mut first = half;
        while first > 0 && ok(first - 1) {
            first -= 1;
        }
        let mut last = half;
        while last + 1 < n && ok(last + 1) {
            last += 1;
        }
        if last - first < 8 {
            return Err(Error::Profile("F overflows next to the origin".into()));
        }
        let keep = |v: Vec<T>| v[first..=last].to_vec();
        let mut p = Self {
            name,
            f,
            lo: node(first),
            hi: node(last),
            trimmed: (first > 0, last + 1 < n),
            step,
            phi: keep(phi),
            fv: keep(fv),
            big_f: keep(big_f),
            fprime: keep(fprime),
            classification: EndpointClassification {
                minus_infinity: Endpoint::Infinite,
                plus_infinity: Endpoint::Infinite,
                confidence: Confidence::Heuristic,
            },
            orientation: Orientation::canonical(),
        };
        p.classification = p.classify(opts.tail_hint);
        Ok(p)
    }

    pub fn with_orientation(mut self, orientation: Orientation<T>) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn orientation(&self) -> Orientation<T> {
        self.orientation
    }

    pub fn classification(&self) -> EndpointClassification<T> {
        self.classification
    }

    /// Tabulated range of `u`.
    pub fn table_range(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    /// `a = F(-∞)` when finite.
    pub fn a(&self) -> Option<T> {
        self.classification.minus_infinity.finite()
    }

    /// `b = F(+∞)` when finite.
    pub fn b(&self) -> Option<T> {
        self.classification.plus_infinity.finite()
    }

    pub fn f(&self, u: T) -> T {
        (self.f)(u)
    }

    fn last(&self) -> usize {
        self.phi.len() - 1
    }

    fn hi(&self) -> T {
        self.hi
    }

    fn cell(&self, u: T) -> (usize, T) {
        let x = ((u - self.lo) / self.step).to_f64().unwrap_or(0.0);
        let i = (x.floor().max(0.0) as usize).min(self.last() - 1);
        (i, (u - self.lo) / self.step - T::of(i))
    }

    /// `Φ(u) = ∫_0^u f`.
    pub fn phi(&self, u: T) -> T {
        if u >= self.lo && u <= self.hi() {
            let (i, s) = self.cell(u);
            return hermite(self.phi[i], self.phi[i + 1], self.fv[i], self.fv[i + 1], self.step, s);
        }
        let (end, base) = self.end_for(u);
        base + self.quad(end, u, |s| self.f(s))
    }

    fn end_for(&self, u: T) -> (T, T) {
        if u > self.hi() {
            (self.hi(), self.phi[self.last()])
        } else {
            (self.lo, self.phi[0])
        }
    }

    fn quad(&self, a: T, b: T, g: impl Fn(T) -> T) -> T {
        let gl = GaussLegendre::<T>::new(GL_ORDER);
        let panels = ((b - a).abs() / c::<T>(0.05)).ceil().to_usize().unwrap_or(1).max(1);
        let w = (b - a) / T::of(panels);
        (0..panels).fold(T::zero(), |acc, k| {
            let x0 = a + w * T::of(k);
            acc + gl.integrate(x0, x0 + w, &g)
        })
    }

    /// `F'(u) = e^{-Φ(u)}`.
    pub fn fprime(&self, u: T) -> T {
        (-self.phi(u)).exp()
    }

    /// `F''(u) = -f(u) F'(u)`.
    pub fn fsecond(&self, u: T) -> T {
        -self.f(u) * self.fprime(u)
    }

    /// `F(u)`.
    #[allow(non_snake_case)]
    pub fn F(&self, u: T) -> T {
        if u == T::zero() {
            return T::zero();
        }
        if u >= self.lo && u <= self.hi() {
            let (i, s) = self.cell(u);
            return hermite(
                self.big_f[i],
                self.big_f[i + 1],
                self.fprime[i],
                self.fprime[i + 1],
                self.step,
                s,
            );
        }
        let (end, base) = if u > self.hi() {
            (self.hi(), self.big_f[self.last()])
        } else {
            (self.lo, self.big_f[0])
        };
        base + self.quad(end, u, |s| self.fprime(s))
    }

    /// `F^{-1}(v)` for `a < v < b`, to relative tolerance 1e-12.
    pub fn f_inverse(&self, v: T) -> Result<T> {
        let out = |v: T| {
            Error::OutsideInvertibility {
                index: 0,
                r: 0.0,
                value: v.f64(),
                lo: self.a().map_or(f64::NEG_INFINITY, |x| x.f64()),
                hi: self.b().map_or(f64::INFINITY, |x| x.f64()),
            }
        };
        if !v.is_finite() || self.a().is_some_and(|a| v <= a) || self.b().is_some_and(|b| v >= b) {
            return Err(out(v));
        }
        let n = self.big_f.len();
        let (mut lo, mut hi);
        if v >= self.big_f[0] && v <= self.big_f[n - 1] {
            let j = self.big_f.partition_point(|&x| x <= v).clamp(1, n - 1);
            lo = self.lo + self.step * T::of(j - 1);
            hi = self.lo + self.step * T::of(j);
        } else {
            // beyond the table: expand a bracket geometrically
            let outward = if v > self.big_f[n - 1] { T::one() } else { -T::one() };
            let start = if outward > T::zero() { self.hi() } else { self.lo };
            let mut width = self.hi();
            let mut far = start + outward * width;
            let mut tries = 0;
            while (self.F(far) - v) * outward < T::zero() {
                width = width + width;
                far = start + outward * width;
                tries += 1;
                if tries > 40 || !self.F(far).is_finite() {
                    return Err(out(v));
                }
            }
            lo = start.min(far);
            hi = start.max(far);
        }
        let tol = c::<T>(1e-12);
        let mut u = (lo + hi) * c(0.5);
        for _ in 0..200 {
            let g = self.F(u) - v;
            if g == T::zero() {
                return Ok(u);
            }
            if g > T::zero() {
                hi = u;
            } else {
                lo = u;
            }
            let d = self.fprime(u);
            let mut next = u - g / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = (lo + hi) * c(0.5);
            }
            let scale = T::one().max(next.abs());
            if (next - u).abs() <= tol * scale || (hi - lo) <= tol * scale {
                return Ok(next);
            }
            u = next;
        }
        Ok(u)
    }

    /// `(F(u) - a) / F'(u) = ∫_{-∞}^u e^{Φ(u)-Φ(s)} ds`, when `a` is finite.
    pub fn gap_below(&self, u: T) -> Option<T> {
        let a = self.a()?;
        let direct = self.F(u) - a;
        if direct > c::<T>(1e-6) * a.abs().max(T::one()) {
            return Some(direct / self.fprime(u));
        }
        Some(self.tail_integral(u, -T::one()))
    }

    /// `(b - F(u)) / F'(u) = ∫_u^∞ e^{Φ(u)-Φ(s)} ds`, when `b` is finite.
    pub fn gap_above(&self, u: T) -> Option<T> {
        let b = self.b()?;
        let direct = b - self.F(u);
        if direct > c::<T>(1e-6) * b.abs().max(T::one()) {
            return Some(direct / self.fprime(u));
        }
        Some(self.tail_integral(u, T::one()))
    }

    fn tail_integral(&self, u: T, outward: T) -> T {
        let gl = GaussLegendre::<T>::new(GL_ORDER);
        let base = self.phi(u);
        let mut w = c::<T>(0.05);
        let mut s0 = u;
        let mut acc = T::zero();
        for _ in 0..20_000 {
            let s1 = s0 + outward * w;
            let piece = gl.integrate(s0.min(s1), s0.max(s1), |s| (base - self.phi(s)).exp());
            acc += piece;
            if piece <= T::epsilon() * c(0.1) * acc {
                break;
            }
            s0 = s1;
            w *= c(1.01);
        }
        acc
    }

    /// `v = offset + scale F(u)` in the profile's orientation.
    pub fn v_of(&self, u: T) -> T {
        self.orientation.offset + self.orientation.scale * self.F(u)
    }

    /// `dv/du`.
    pub fn dv_du(&self, u: T) -> T {
        self.orientation.scale * self.fprime(u)
    }

    /// `d²v/du²`.
    pub fn d2v_du2(&self, u: T) -> T {
        self.orientation.scale * self.fsecond(u)
    }

    /// Inverse of [`Self::v_of`].
    pub fn u_of(&self, v: T) -> Result<T> {
        let canon = (v - self.orientation.offset) / self.orientation.scale;
        self.f_inverse(canon).map_err(|e| match e {
            Error::OutsideInvertibility { index, r, .. } => {
                let (lo, hi) = self.v_levels();
                Error::OutsideInvertibility {
                    index,
                    r,
                    value: v.f64(),
                    lo: lo.map_or(f64::NEG_INFINITY, |x| x.f64()),
                    hi: hi.map_or(f64::INFINITY, |x| x.f64()),
                }
            }
            e => e,
        })
    }

    /// Invertibility levels `(lower, upper)` of `v` in the profile's
    /// orientation; `None` for an infinite level.
    pub fn v_levels(&self) -> (Option<T>, Option<T>) {
        let o = self.orientation;
        let map = |x: Option<T>| x.map(|x| o.offset + o.scale * x);
        if o.scale > T::zero() {
            (map(self.a()), map(self.b()))
        } else {
            (map(self.b()), map(self.a()))
        }
    }

    fn classify(&self, hint: TailHint) -> EndpointClassification<T> {
        let n = self.phi.len();
        let zero = (-self.lo / self.step).round().to_usize().unwrap_or(0);
        let mid_plus = zero + (n - 1 - zero) / 2;
        let mid_minus = zero / 2;
        let end_plus = if self.trimmed.1 && hint.plus_finite.is_none() {
            Endpoint::Infinite
        } else {
            self.tail_end(n - 1, mid_plus, T::one(), hint.plus_finite)
        };
        let end_minus = if self.trimmed.0 && hint.minus_finite.is_none() {
            Endpoint::Infinite
        } else {
            self.tail_end(0, mid_minus, -T::one(), hint.minus_finite)
        };
        let resolved = hint.minus_finite.is_some() && hint.plus_finite.is_some();
        EndpointClassification {
            minus_infinity: end_minus,
            plus_infinity: end_plus,
            confidence: if resolved {
                Confidence::Resolved
            } else {
                Confidence::Heuristic
            },
        }
    }

    /// Tail of `F` beyond the table end `e`, fitting `F' ~ |u|^{-p}` between
    /// the nodes `m` (at half the cutoff) and `e`.
    fn tail_end(&self, e: usize, m: usize, outward: T, hint: Option<bool>) -> Endpoint<T> {
        let u_end = self.lo + self.step * T::of(e);
        let (g_end, g_mid) = (self.fprime[e], self.fprime[m]);
        let f_end = self.big_f[e];
        let p = if g_end > T::zero() {
            -(g_end / g_mid).ln() / c::<T>(2.0).ln()
        } else {
            T::infinity()
        };
        let fit_finite = p > c(1.05) && f_end.is_finite();
        let finite = hint.unwrap_or(fit_finite);
        if !finite {
            return Endpoint::Infinite;
        }
        let tail = if p.is_finite() && p > T::one() {
            g_end * u_end.abs() / (p - T::one())
        } else {
            T::zero()
        };
        Endpoint::Finite(f_end + outward * tail)
    }
}

fn hermite<T: Real>(y0: T, y1: T, d0: T, d1: T, h: T, s: T) -> T {
    let s2 = s * s;
    let s3 = s2 * s;
    let two = c::<T>(2.0);
    let three = c::<T>(3.0);
    (two * s3 - three * s2 + T::one()) * y0
        + (s3 - two * s2 + s) * h * d0
        + (three * s2 - two * s3) * y1
        + (s3 - s2) * h * d1
}

fn piecewise_linear<T: Real>(x: &[T], y: &[T], at: T) -> T {
    let n = x.len();
    if at <= x[0] {
        return y[0];
    }
    if at >= x[n - 1] {
        return y[n - 1];
    }
    let j = x.partition_point(|&v| v <= at).clamp(1, n - 1);
    let t = (at - x[j - 1]) / (x[j] - x[j - 1]);
    y[j - 1] + t * (y[j] - y[j - 1])
}
