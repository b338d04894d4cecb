//! Quotient rings `F[x]/(m)` with `m` monic and square-free.
//!
//! Such a ring is a product of fields. Computation proceeds as if it were a
//! field; when an inversion hits a zero divisor the error carries the factor
//! of `m` found, and [`split_components`] reruns the computation on both parts.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::field::{ArithError, ArithResult, Field, GaussianRational};
use crate::upoly::UPoly;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub struct ExtCtx<F: Field> {
    id: u64,
    modulus: UPoly<F>,
    base: F::Ctx,
}

impl<F: Field> fmt::Debug for ExtCtx<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext#{}({:?})", self.id, self.modulus)
    }
}

impl<F: Field> ExtCtx<F> {
    /// `modulus` must be nonconstant; it is made monic here.
    pub fn new(modulus: &UPoly<F>) -> ArithResult<Arc<Self>> {
        let m = modulus.monic()?;
        assert!(m.deg() >= 1, "extension modulus must be nonconstant");
        Ok(Arc::new(ExtCtx { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), base: m.ctx().clone(), modulus: m }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn modulus(&self) -> &UPoly<F> {
        &self.modulus
    }

    pub fn base_ctx(&self) -> &F::Ctx {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }
}

#[derive(Clone)]
pub struct Ext<F: Field> {
    rep: UPoly<F>,
    ctx: Arc<ExtCtx<F>>,
}

impl<F: Field> PartialEq for Ext<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep
    }
}

impl<F: Field> fmt::Debug for Ext<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} mod #{}]", self.rep.coeffs(), self.ctx.id)
    }
}

impl<F: Field> Ext<F> {
    pub fn from_poly(ctx: &Arc<ExtCtx<F>>, p: &UPoly<F>) -> Self {
        let rep = if p.deg() < ctx.modulus.deg() {
            p.clone()
        } else {
            p.rem(&ctx.modulus).expect("monic modulus")
        };
        Ext { rep, ctx: ctx.clone() }
    }

    pub fn embed(ctx: &Arc<ExtCtx<F>>, c: F) -> Self {
        Ext { rep: UPoly::constant(&ctx.base, c), ctx: ctx.clone() }
    }

    /// The class of the variable (a root of the modulus).
    pub fn generator(ctx: &Arc<ExtCtx<F>>) -> Self {
        Self::from_poly(ctx, &UPoly::x(&ctx.base))
    }

    pub fn rep(&self) -> &UPoly<F> {
        &self.rep
    }

    pub fn ext_ctx(&self) -> &Arc<ExtCtx<F>> {
        &self.ctx
    }
}

impl<F: Field> Field for Ext<F> {
    type Ctx = Arc<ExtCtx<F>>;

    fn ctx(&self) -> Self::Ctx {
        self.ctx.clone()
    }

    fn zero(ctx: &Self::Ctx) -> Self {
        Ext { rep: UPoly::zero(&ctx.base), ctx: ctx.clone() }
    }

    fn one(ctx: &Self::Ctx) -> Self {
        Ext { rep: UPoly::one(&ctx.base), ctx: ctx.clone() }
    }

    fn from_gaussian(ctx: &Self::Ctx, g: &GaussianRational) -> Self {
        Self::embed(ctx, F::from_gaussian(&ctx.base, g))
    }

    fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        Ext { rep: self.rep.add(&o.rep), ctx: self.ctx.clone() }
    }

    fn sub(&self, o: &Self) -> Self {
        Ext { rep: self.rep.sub(&o.rep), ctx: self.ctx.clone() }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.rep.is_zero() || o.rep.is_zero() {
            return Self::zero(&self.ctx);
        }
        Self::from_poly(&self.ctx, &self.rep.mul(&o.rep))
    }

    fn neg(&self) -> Self {
        Ext { rep: self.rep.neg(), ctx: self.ctx.clone() }
    }

    fn inv(&self) -> ArithResult<Self> {
        if self.rep.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if self.rep.deg() == 0 {
            let c = self.rep.lc().inv()?;
            return Ok(Self::embed(&self.ctx, c));
        }
        let (g, s, _) = self.rep.xgcd(&self.ctx.modulus)?;
        if g.deg() > 0 {
            return Err(ArithError::ZeroDivisor { ext_id: self.ctx.id, factor: Arc::new(g) });
        }
        Ok(Self::from_poly(&self.ctx, &s))
    }
}

/// Run `f` over `F[x]/(modulus)`, splitting the modulus whenever `f` hits a
/// zero divisor of this extension. Returns one result per final factor; the
/// factors multiply to the (monic) modulus.
pub fn split_components<F: Field, T>(
    modulus: &UPoly<F>,
    mut f: impl FnMut(&Arc<ExtCtx<F>>) -> ArithResult<T>,
) -> ArithResult<Vec<(UPoly<F>, T)>> {
    let mut out = Vec::new();
    let mut work = vec![modulus.monic()?];
    while let Some(m) = work.pop() {
        if m.deg() == 0 {
            continue;
        }
        let ctx = ExtCtx::new(&m)?;
        match f(&ctx) {
            Ok(t) => out.push((m, t)),
            Err(ArithError::ZeroDivisor { ext_id, factor }) if ext_id == ctx.id => {
                let g = factor.downcast_ref::<UPoly<F>>().expect("factor type matches extension").monic()?;
                let h = m.exact_div(&g)?.monic()?;
                // Keep the original order: push the cofactor first so `g` is processed next.
                work.push(h);
                work.push(g);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
