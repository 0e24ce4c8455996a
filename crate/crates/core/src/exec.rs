//! Execution policy for the data-parallel kernels.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chooses between the rayon-backed and the plain sequential code path.
///
/// `Parallel` silently degrades to `Sequential` when the crate is built
/// without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }

    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Fills `out[i] = f(i)`.
    pub fn fill_indexed<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }

    /// Runs two closures, concurrently when allowed.
    pub fn join<A, B, RA, RB>(self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return rayon::join(a, b);
        }
        (a(), b())
    }

    /// Runs three closures, concurrently when allowed.
    pub fn join3<A, B, C, RA, RB, RC>(self, a: A, b: B, c: C) -> (RA, RB, RC)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        C: FnOnce() -> RC + Send,
        RA: Send,
        RB: Send,
        RC: Send,
    {
        let (ra, (rb, rc)) = self.join(a, || self.join(b, c));
        (ra, rb, rc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = ExecPolicy::Sequential.map_indexed(1000, f);
        let b = ExecPolicy::Parallel.map_indexed(1000, f);
        assert_eq!(a, b);

        let mut c = vec![0.0; 1000];
        ExecPolicy::Parallel.fill_indexed(&mut c, f);
        assert_eq!(a, c);
    }

    #[test]
    fn join3_preserves_order() {
        let (a, b, c) = ExecPolicy::Parallel.join3(|| 1, || 2, || 3);
        assert_eq!((a, b, c), (1, 2, 3));
    }
}
