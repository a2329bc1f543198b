use std::fmt::Debug;

/// Arithmetic needed by code that runs on both plain floats and Taylor jets.
///
/// Methods take references because jets own their coefficient storage.
pub trait Scalar: Clone + Debug + Send + Sync {
    /// Constant term (the value at the expansion point).
    fn value(&self) -> f64;
    /// A constant living in the same space as `self`.
    fn constant_like(&self, c: f64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn negate(&self) -> Self {
        self.scale(-1.0)
    }
    /// `self^p` for a positive base.
    fn powf(&self, p: f64) -> Self;
    fn recip(&self) -> Self {
        self.powf(-1.0)
    }
    fn divide(&self, o: &Self) -> Self {
        self.times(&o.recip())
    }
    fn sqrt(&self) -> Self {
        self.powf(0.5)
    }
    /// `self + c`.
    fn offset(&self, c: f64) -> Self {
        self.plus(&self.constant_like(c))
    }
    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }
    /// `g(self)` from `derivs[k] = g^{(k)}(self.value())`; jets use as many
    /// terms as their degree, floats only `derivs[0]`.
    fn compose(&self, derivs: &[f64]) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    #[inline]
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    #[inline]
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    #[inline]
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    #[inline]
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    #[inline]
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    #[inline]
    fn recip(&self) -> Self {
        1.0 / self
    }
    #[inline]
    fn divide(&self, o: &Self) -> Self {
        self / o
    }
    #[inline]
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    #[inline]
    fn compose(&self, derivs: &[f64]) -> Self {
        derivs[0]
    }
}
