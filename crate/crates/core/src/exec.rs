//! Data-parallel map over independent jobs, with a sequential fallback.
//!
//! Results always come back in input order, so the choice of mode never
//! changes any output.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is on, otherwise sequential.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

pub fn map_indexed<I, T, F>(exec: Exec, items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(usize, I) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items
                .into_par_iter()
                .enumerate()
                .map(|(i, x)| f(i, x))
                .collect()
        }
        _ => items
            .into_iter()
            .enumerate()
            .map(|(i, x)| f(i, x))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let items: Vec<u64> = (0..100).collect();
        let f = |i: usize, x: u64| x * x + i as u64;
        let a = map_indexed(Exec::Sequential, items.clone(), f);
        let b = map_indexed(Exec::Parallel, items, f);
        assert_eq!(a, b);
        assert_eq!(a[7], 56);
    }
}
