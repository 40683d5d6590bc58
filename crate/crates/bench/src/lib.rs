//! Shared inputs for the benchmarks.

use rsff_core::{FieldCtx, Poly, PolySetSpec};

pub fn f3() -> FieldCtx {
    FieldCtx::new(3, 1).expect("F_3")
}

pub fn f9() -> FieldCtx {
    FieldCtx::new(3, 2).expect("F_9")
}

/// A dense polynomial of degree `n` cycling through the field's elements.
pub fn dense(field: &FieldCtx, n: usize) -> Poly {
    let elems: Vec<_> = field.elements().collect();
    Poly::from_coeffs((0..=n).map(|i| elems[(i * 7 + 1) % elems.len()]).collect())
}

/// The `idx`-th monic polynomial of degree `n`, clamped into range.
pub fn monic(field: &FieldCtx, n: usize, idx: u64) -> Poly {
    let set = PolySetSpec::monic(n);
    set.nth(field, idx % set.scan_size(field.q()) as u64)
}
