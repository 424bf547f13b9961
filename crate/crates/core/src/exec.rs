//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the helpers dispatch to rayon unless
//! the calling thread has switched to [`Mode::Sequential`]. Without the feature
//! every helper is a plain iterator loop. Results never depend on the mode:
//! searches return the lowest-index hit, reductions are order independent.

use std::cell::Cell;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Parallel,
    Sequential,
}

thread_local! {
    static MODE: Cell<Mode> = const { Cell::new(Mode::Parallel) };
}

/// Runs `f` with the given execution mode on the current thread.
pub fn with_mode<R>(mode: Mode, f: impl FnOnce() -> R) -> R {
    let prev = MODE.with(|m| m.replace(mode));
    let out = f();
    MODE.with(|m| m.set(prev));
    out
}

pub fn current_mode() -> Mode {
    MODE.with(|m| m.get())
}

fn parallel() -> bool {
    cfg!(feature = "parallel") && current_mode() == Mode::Parallel
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Returns the smallest `i < n` for which `f(i)` yields `Some`, with its value.
pub fn find_first<T, F>(n: usize, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel() {
        use rayon::prelude::*;
        return (0..n)
            .into_par_iter()
            .filter_map(|i| f(i).map(|t| (i, t)))
            .find_first(|_| true);
    }
    (0..n).find_map(|i| f(i).map(|t| (i, t)))
}

/// True iff `f(i)` holds for every `i < n`.
pub fn all<F>(n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    find_first(n, |i| if f(i) { None } else { Some(()) }).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = with_mode(Mode::Sequential, || map_range(100, |i| i * i));
        let par = map_range(100, |i| i * i);
        assert_eq!(seq, par);
        let hit = |i: usize| (i % 7 == 3).then_some(i);
        assert_eq!(find_first(50, hit), Some((3, 3)));
        assert_eq!(with_mode(Mode::Sequential, || find_first(50, hit)), Some((3, 3)));
        assert!(all(10, |i| i < 10));
        assert!(!all(10, |i| i < 9));
    }

    #[test]
    fn mode_is_restored() {
        with_mode(Mode::Sequential, || assert_eq!(current_mode(), Mode::Sequential));
        assert_eq!(current_mode(), Mode::Parallel);
    }
}
