//! Index-partitioned folds over enumeration streams.
//!
//! Worker `t` of `T` visits the indices `i` with `i % T == t`. Accumulators
//! are merged in worker order, and every merge used in this crate is an
//! integer sum, so results do not depend on the worker count.

use std::thread;

pub fn fold_indices<A, I, F, M>(total: u64, workers: usize, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, u64) + Sync,
    M: Fn(A, A) -> A,
{
    let workers = workers.max(1) as u64;
    if workers == 1 || total < 2 * workers {
        let mut acc = init();
        for i in 0..total {
            fold(&mut acc, i);
        }
        return acc;
    }
    let partials: Vec<A> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|t| {
                let (init, fold) = (&init, &fold);
                s.spawn(move || {
                    let mut acc = init();
                    let mut i = t;
                    while i < total {
                        fold(&mut acc, i);
                        i += workers;
                    }
                    acc
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    partials.into_iter().reduce(merge).unwrap_or_else(init)
}

/// Element-wise sum, the merge step for histogram accumulators.
pub fn merge_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}
