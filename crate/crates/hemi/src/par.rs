//! Data-parallel helpers. With the `parallel` feature the work is spread
//! over rayon's pool; without it, or inside [`with_exec`] with
//! [`Exec::Sequential`], the same closures run on the calling thread.
//! Results are always returned in index order, so both paths agree.

use std::cell::Cell;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Parallel,
    Sequential,
}

thread_local! {
    static OVERRIDE: Cell<Option<Exec>> = const { Cell::new(None) };
}

/// Execution mode for calls made from this thread.
pub fn current() -> Exec {
    let chosen = OVERRIDE.with(|c| c.get()).unwrap_or(Exec::Parallel);
    if cfg!(feature = "parallel") {
        chosen
    } else {
        Exec::Sequential
    }
}

/// Run `f` with the execution mode pinned for this thread.
pub fn with_exec<R>(exec: Exec, f: impl FnOnce() -> R) -> R {
    let prev = OVERRIDE.with(|c| c.replace(Some(exec)));
    let out = f();
    OVERRIDE.with(|c| c.set(prev));
    out
}

pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match current() {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// First index (in order) for which `f` yields `Some`.
pub fn find_first<T, F>(n: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    match current() {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().find_map_first(f)
        }
        _ => (0..n).find_map(f),
    }
}

/// Fold over `0..n` with an associative, commutative combiner.
pub fn reduce<T, F, C>(n: usize, identity: T, f: F, combine: C) -> T
where
    T: Send + Sync + Clone,
    F: Fn(usize) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    match current() {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .map(f)
                .reduce(|| identity.clone(), &combine)
        }
        _ => (0..n).map(f).fold(identity, combine),
    }
}

/// SplitMix64 step, used to derive independent stream seeds.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
