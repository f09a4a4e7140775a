//! Index-ordered maps used for candidate evaluation.
//!
//! [`map_indexed`] and [`for_each_mut`] dispatch to [`parallel`] when the
//! `parallel` feature is enabled and to [`sequential`] otherwise. Both
//! produce output in index order, so results never depend on which one runs
//! or on the worker count.

pub mod sequential {
    pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
    where
        F: Fn(usize) -> T,
    {
        (0..n).map(f).collect()
    }

    pub fn for_each_mut<T, F>(items: &mut [T], f: F)
    where
        F: Fn(usize, &mut T),
    {
        items.iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
}

#[cfg(feature = "parallel")]
pub mod parallel {
    use rayon::prelude::*;

    pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }

    pub fn for_each_mut<T, F>(items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        items.par_iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
}

#[cfg(feature = "parallel")]
pub use parallel::{for_each_mut, map_indexed};
#[cfg(not(feature = "parallel"))]
pub use sequential::{for_each_mut, map_indexed};
